//! Closed-form predictions: expected largest eigenvalue in both ensembles,
//! limiting spectral densities, and the moments of the centered quadratic
//! forms `⟨ẽ, H ẽ⟩` and `⟨ẽ, H² ẽ⟩`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::DegreeSequence;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u64),
    #[error("formula needs m1 >= 3, got {m1}")]
    DegenerateSequence { m1: u128 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionKind {
    /// Holds exactly at every `n` under the stated law.
    Exact,
    /// Leading order as `n → ∞`; finite-`n` corrections are not modelled.
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub name: String,
    pub value: f64,
    pub kind: PredictionKind,
    pub citation: String,
}

impl Prediction {
    fn new(name: &str, value: f64, kind: PredictionKind, citation: &str) -> Self {
        Self {
            name: name.to_string(),
            value,
            kind,
            citation: citation.to_string(),
        }
    }
}

fn m(seq: &DegreeSequence, k: u32) -> f64 {
    seq.moment_f64(k)
}

/// `m2/m1 + m1 m3 / m2² − 1`.
pub fn lambda1_microcanonical(seq: &DegreeSequence) -> Prediction {
    let v = m(seq, 2) / m(seq, 1) + m(seq, 1) * m(seq, 3) / m(seq, 2).powi(2) - 1.0;
    Prediction::new(
        "lambda1_microcanonical",
        v,
        PredictionKind::Asymptotic,
        "E[lambda1] of the uniform simple graph with degrees d: m2/m1 + m1*m3/m2^2 - 1 + o(1)",
    )
}

/// `m2/m1 + m1 m3 / m2²`.
pub fn lambda1_canonical(seq: &DegreeSequence) -> Prediction {
    let v = m(seq, 2) / m(seq, 1) + m(seq, 1) * m(seq, 3) / m(seq, 2).powi(2);
    Prediction::new(
        "lambda1_canonical",
        v,
        PredictionKind::Asymptotic,
        "E[lambda1] of the Chung-Lu graph with weights d: m2/m1 + m1*m3/m2^2 + o(1)",
    )
}

/// Kesten-McKay density of the random `d`-regular graph.
pub fn kesten_mckay_pdf(d: u64, x: f64) -> Result<f64, TheoryError> {
    if d < 2 {
        return Err(TheoryError::InvalidDegree(d));
    }
    let d = d as f64;
    let r2 = 4.0 * (d - 1.0);
    if x * x >= r2 {
        return Ok(0.0);
    }
    Ok(d * (r2 - x * x).sqrt() / (2.0 * std::f64::consts::PI * (d * d - x * x)))
}

/// Semicircle density on `[−2, 2]` (variance one).
pub fn semicircle_pdf(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// `2√(d − 1)`.
pub fn alon_boppana_bound(d: u64) -> Result<f64, TheoryError> {
    if d < 2 {
        return Err(TheoryError::InvalidDegree(d));
    }
    Ok(2.0 * ((d - 1) as f64).sqrt())
}

/// `∫_a^b f` for a density supported on `[−radius, radius]` that vanishes
/// like a square root (or blows up like its inverse) at the edges. The
/// substitution `x = radius · sin θ` removes the edge behaviour; the smooth
/// integrand in `θ` is then handled by composite five-point Gauss-Legendre.
pub fn integrate_on_support(f: impl Fn(f64) -> f64, radius: f64, a: f64, b: f64) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664_0,
        0.906_179_845_938_664_0,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let lo = a.max(-radius);
    let hi = b.min(radius);
    if hi <= lo || radius <= 0.0 {
        return 0.0;
    }
    let t0 = (lo / radius).clamp(-1.0, 1.0).asin();
    let t1 = (hi / radius).clamp(-1.0, 1.0).asin();
    let panels = 64;
    let h = (t1 - t0) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = t0 + h * (p as f64 + 0.5);
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            let t = mid + 0.5 * h * x;
            total += w * f(radius * t.sin()) * radius * t.cos();
        }
    }
    total * 0.5 * h
}

/// Mass the Kesten-McKay law puts on `[a, b]`, with `x` rescaled by `1/scale`.
pub fn kesten_mckay_mass(d: u64, a: f64, b: f64, scale: f64) -> Result<f64, TheoryError> {
    let radius = alon_boppana_bound(d)?;
    Ok(integrate_on_support(
        |x| kesten_mckay_pdf(d, x).unwrap_or(0.0),
        radius,
        a * scale,
        b * scale,
    ))
}

pub fn semicircle_mass(a: f64, b: f64) -> f64 {
    integrate_on_support(semicircle_pdf, 2.0, a, b)
}

/// `−m3 / (m1 − 1)²`: exact mean of `⟨ẽ, (A − ẽẽᵀ) ẽ⟩` under the
/// unconditioned matching law (the diagonal of `E[A]` is what is left over).
pub fn expected_h_quadratic_k1(seq: &DegreeSequence) -> Prediction {
    let d = m(seq, 1) - 1.0;
    Prediction::new(
        "expected_h_quadratic_k1",
        -m(seq, 3) / (d * d),
        PredictionKind::Exact,
        "mean of <e~,(A - e~e~^T)e~> under the uniform half-edge matching: -m3/(m1-1)^2",
    )
}

/// Numerator of the wedge-sum formula, exactly in integers when it fits.
fn wedge_numerator(seq: &DegreeSequence) -> f64 {
    let exact = || -> Option<i128> {
        let mk = |k: u32| i128::try_from(seq.moment(k)).ok();
        let (m1, m2, m3, m4, m5) = (mk(1)?, mk(2)?, mk(3)?, mk(4)?, mk(5)?);
        let m2sq = m2.checked_mul(m2)?;
        let terms = [
            m2sq.checked_mul(m2)?,
            -m2.checked_mul(m4)?,
            -m1.checked_mul(m2sq)?,
            m1.checked_mul(m4)?,
            m3.checked_mul(m2)?.checked_mul(-4)?,
            m5.checked_mul(4)?,
            m2sq.checked_mul(4)?,
            m4.checked_mul(-4)?,
        ];
        terms.iter().try_fold(0i128, |acc, &t| acc.checked_add(t))
    };
    match exact() {
        Some(v) => v as f64,
        None => {
            let (m1, m2, m3, m4, m5) = (m(seq, 1), m(seq, 2), m(seq, 3), m(seq, 4), m(seq, 5));
            m2.powi(3) - m2 * m4 - m1 * m2 * m2 + m1 * m4 - 4.0 * m3 * m2 + 4.0 * m5 + 4.0 * m2 * m2 - 4.0 * m4
        }
    }
}

/// Expected wedge sum `Σ_k Σ_{i≠j} a_ki a_kj d_i d_j`, leading-order formula
/// `(m2³ − m2m4 − m1m2² + m1m4 − 4m3m2 + 4m5 + 4m2² − 4m4) / ((m1−1)(m1−2))`.
pub fn expected_wedge_sum(seq: &DegreeSequence) -> Result<Prediction, TheoryError> {
    let m1 = seq.m1();
    if m1 < 3 {
        return Err(TheoryError::DegenerateSequence { m1 });
    }
    let m1 = m1 as f64;
    Ok(Prediction::new(
        "expected_wedge_sum",
        wedge_numerator(seq) / ((m1 - 1.0) * (m1 - 2.0)),
        PredictionKind::Asymptotic,
        "expected degree-weighted wedge count with pair probabilities 1/((m1-1)(m1-2))",
    ))
}

/// `(m3 + wedge − m2³/(m1−1)²) / (m1 − 1)`, the leading-order mean of `⟨ẽ, H² ẽ⟩`.
pub fn expected_h_quadratic_k2(seq: &DegreeSequence) -> Result<Prediction, TheoryError> {
    let wedge = expected_wedge_sum(seq)?.value;
    let d = m(seq, 1) - 1.0;
    let v = (m(seq, 3) + wedge - m(seq, 2).powi(3) / (d * d)) / d;
    Ok(Prediction::new(
        "expected_h_quadratic_k2",
        v,
        PredictionKind::Asymptotic,
        "mean of <e~,H^2 e~>: (m3 + wedge - m2^3/(m1-1)^2)/(m1-1)",
    ))
}

/// `m1 m3 / m2² − 1`, the limit of `E⟨ẽ, H² ẽ⟩ / (m2/(m1−1))²`.
pub fn normalized_h2_leading(seq: &DegreeSequence) -> Prediction {
    Prediction::new(
        "normalized_h2_leading",
        m(seq, 1) * m(seq, 3) / m(seq, 2).powi(2) - 1.0,
        PredictionKind::Asymptotic,
        "limit of E<e~,H^2 e~>/(m2/(m1-1))^2: m1*m3/m2^2 - 1",
    )
}

/// Every prediction defined for `seq`.
pub fn all_predictions(seq: &DegreeSequence) -> Vec<Prediction> {
    let mut out = vec![
        lambda1_microcanonical(seq),
        lambda1_canonical(seq),
        expected_h_quadratic_k1(seq),
        normalized_h2_leading(seq),
    ];
    if let Ok(p) = expected_wedge_sum(seq) {
        out.push(p);
    }
    if let Ok(p) = expected_h_quadratic_k2(seq) {
        out.push(p);
    }
    out
}

pub fn predictions_json(predictions: &[Prediction]) -> String {
    serde_json::to_string_pretty(predictions).expect("plain records serialize")
}
