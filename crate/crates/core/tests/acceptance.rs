//! The acceptance suite: one test per criterion, each writing a PASS/FAIL
//! line to stderr (written directly so it shows even when output is captured).
//! Criterion 8 reuses the criterion-4 run. Criteria run one at a time so
//! their wall-clock budgets are not shared between concurrent tests.

use std::io::Write;
use std::sync::{Mutex, OnceLock};

use cmspectra::validate::{ValidateOptions, Validator};

fn validator() -> &'static Validator {
    static V: OnceLock<Validator> = OnceLock::new();
    V.get_or_init(|| Validator::new(ValidateOptions::default()))
}

fn check(id: u8) {
    static SERIAL: Mutex<()> = Mutex::new(());
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let outcome = validator()
        .run(id)
        .unwrap_or_else(|e| panic!("criterion {id} could not run: {e}"));
    let _ = writeln!(std::io::stderr(), "{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_oracle_identities() {
    check(1);
}

#[test]
fn criterion_2_simplicity_and_uniformity() {
    check(2);
}

#[test]
fn criterion_3_regular_invariance() {
    check(3);
}

#[test]
fn criterion_4_ensemble_gap() {
    check(4);
}

#[test]
fn criterion_5_concentration() {
    check(5);
}

#[test]
fn criterion_6_limit_laws() {
    check(6);
}

#[test]
fn criterion_7_moments() {
    check(7);
}

#[test]
fn criterion_8_determinism() {
    check(8);
}
