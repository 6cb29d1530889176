use cmspectra::degree::DegreeFamily;
use cmspectra::ensemble::Ensemble;
use cmspectra::harness::{
    run, run_concentration_sweep, run_ensemble_gap, run_esd_experiment, run_moment_checks, summarize, write_report,
    EmptySample, ExperimentConfig, ExperimentKind, HarnessError, Law, OutputFormat, Report,
};

fn small_gap() -> ExperimentConfig {
    ExperimentConfig {
        family: DegreeFamily::Band { lo: 4, hi: 8 },
        n: 400,
        replicates: 6,
        timing: false,
        ..ExperimentConfig::preset(ExperimentKind::Gap)
    }
}

#[test]
fn regular_microcanonical_lambda1_is_the_degree() {
    let cfg = ExperimentConfig {
        family: DegreeFamily::Regular { d: 3 },
        n: 1000,
        replicates: 50,
        h_norm: false,
        ..ExperimentConfig::preset(ExperimentKind::Gap)
    };
    let report = run_ensemble_gap(&cfg).unwrap();
    let micro: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| r.ensemble == Ensemble::Microcanonical)
        .map(|r| r.lambda1)
        .collect();
    assert_eq!(micro.len(), 50);
    assert!(micro.iter().all(|l| (l - 3.0).abs() < 1e-8), "{micro:?}");
    assert!(report.microcanonical.sd < 1e-8);
    assert!(report.rows.iter().all(|r| r.h_norm.is_none() && r.lambda2.is_none()));
}

#[test]
fn gap_rows_do_not_depend_on_worker_count() {
    let one = run_ensemble_gap(&small_gap()).unwrap();
    let three = run_ensemble_gap(&ExperimentConfig {
        workers: 3,
        ..small_gap()
    })
    .unwrap();
    assert_eq!(one.rows, three.rows);
    let csv = |r| Report::Gap(r).to_csv().unwrap();
    let first = csv(one);
    assert_eq!(first, csv(run_ensemble_gap(&small_gap()).unwrap()));
    let header = first.lines().next().unwrap();
    assert_eq!(
        header,
        "experiment,ensemble,n,replicate,seed_stream,lambda1,lambda2,lambda_n,h_norm,attempts_or_swaps,wall_ms"
    );
    assert_eq!(first.lines().count(), 1 + 12);
    assert!(first.lines().nth(1).unwrap().starts_with("gap,microcanonical,400,0,0,"));
}

#[test]
fn seeds_change_the_sample() {
    let a = run_ensemble_gap(&small_gap()).unwrap();
    let b = run_ensemble_gap(&ExperimentConfig { seed: 2, ..small_gap() }).unwrap();
    assert_ne!(a.rows, b.rows);
}

#[test]
fn gap_report_contents() {
    let cfg = ExperimentConfig {
        lambda2: true,
        ..small_gap()
    };
    let r = run_ensemble_gap(&cfg).unwrap();
    assert_eq!(r.rows.len(), 12);
    for row in &r.rows {
        let l2 = row.lambda2.unwrap();
        assert!(row.lambda_n <= l2 && l2 <= row.lambda1);
        assert!(row.h_norm.unwrap() > 0.0);
    }
    assert!((r.gap - (r.canonical.mean - r.microcanonical.mean)).abs() < 1e-12);
    assert!((r.gap_stderr.powi(2) - r.canonical.stderr.powi(2) - r.microcanonical.stderr.powi(2)).abs() < 1e-12);
    assert_eq!(r.meta.seed, 1);
    assert_eq!(r.meta.config, cfg);
    assert_eq!(r.meta.version, cmspectra::VERSION);
    assert_eq!(r.meta.sequences[0].n, 400);
    assert!(r.prediction("lambda1_canonical").unwrap() - r.prediction("lambda1_microcanonical").unwrap() == 1.0);
}

#[test]
fn zero_replicates_is_an_error() {
    for kind in [ExperimentKind::Gap, ExperimentKind::Sweep, ExperimentKind::Esd, ExperimentKind::Moments] {
        let cfg = ExperimentConfig {
            replicates: 0,
            ..ExperimentConfig::preset(kind)
        };
        let err = run(&cfg).unwrap_err();
        assert!(matches!(err, HarnessError::EmptyExperiment));
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn infeasible_sequence_reports_replicate_and_exit_code() {
    let cfg = ExperimentConfig {
        family: DegreeFamily::TwoBlock { low: 1, high: 5 },
        n: 6,
        replicates: 2,
        sampler: "cm-mcmc".into(),
        h_norm: false,
        ..ExperimentConfig::preset(ExperimentKind::Gap)
    };
    let err = run_ensemble_gap(&cfg).unwrap_err();
    assert!(matches!(err, HarnessError::Sample { replicate: 0, .. }), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn solver_budget_exhaustion_has_its_own_exit_code() {
    let cfg = ExperimentConfig {
        max_iter: Some(3),
        ..small_gap()
    };
    let err = run_ensemble_gap(&cfg).unwrap_err();
    assert!(matches!(err, HarnessError::Solver { .. }), "{err}");
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn single_point_sweep() {
    let cfg = ExperimentConfig {
        sizes: vec![300],
        replicates: 3,
        ..ExperimentConfig::preset(ExperimentKind::Sweep)
    };
    let r = run_concentration_sweep(&cfg).unwrap();
    assert_eq!(r.points.len(), 1);
    assert_eq!(r.rows.len(), 3);
    assert_eq!(r.h_norm_trend, 0.0);
    let mean_rel: f64 = r.rows.iter().map(|row| row.lambda1_relative).sum::<f64>() / 3.0;
    assert!((mean_rel - 1.0).abs() < 1e-12);
    assert!(r.points[0].max_h_norm_scaled > 0.0);
}

#[test]
fn esd_small_regular() {
    let cfg = ExperimentConfig {
        n: 600,
        replicates: 2,
        bins: 40,
        ..ExperimentConfig::preset(ExperimentKind::Esd)
    };
    let r = run_esd_experiment(&cfg).unwrap();
    assert_eq!(r.histogram.total, 1200);
    assert!((r.histogram.area() - 1.0).abs() < 1e-12);
    assert!(r.l1_distance.unwrap() < 0.2);
    assert_eq!(r.overlay.len(), 40);
    assert!((r.alon_boppana.unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!(r.lambda1.iter().all(|l| (l - 3.0).abs() < 1e-8));

    let one_bin = run_esd_experiment(&ExperimentConfig { bins: 1, ..cfg }).unwrap();
    assert!(one_bin.degenerate_binning);
    assert!(one_bin.l1_distance.is_none());
}

#[test]
fn moments_fixture_matches_enumeration() {
    let cfg = ExperimentConfig {
        n: 300,
        family: DegreeFamily::Band { lo: 3, hi: 6 },
        replicates: 20,
        fixture_samples: 5000,
        ..ExperimentConfig::preset(ExperimentKind::Moments)
    };
    let r = run_moment_checks(&cfg).unwrap();
    assert_eq!(r.rows.len(), 40);
    let rank1 = r
        .fixture
        .iter()
        .find(|c| c.law == Law::Matching && c.functional == "quadratic_rank1")
        .unwrap();
    assert!((rank1.exact + 10.0 / 9.0).abs() < 1e-12);
    assert!(rank1.within_3_sigma, "{rank1:?}");
    assert!(r.fixture.iter().all(|c| c.within_3_sigma), "{:?}", r.fixture);
    assert!(r.comparison(Law::Matching, "k1_full", "expected_h_quadratic_k1_full").is_some());

    let err = run_moment_checks(&ExperimentConfig { forms: vec![], ..cfg }).unwrap_err();
    assert!(matches!(err, HarnessError::Config(_)));
}

#[test]
fn reports_are_written_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&small_gap()).unwrap();
    let mut sink = Vec::new();
    let files = write_report(&report, OutputFormat::Csv, Some(dir.path()), &mut sink).unwrap();
    assert_eq!(files.len(), 2);
    assert!(sink.is_empty());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gap_summary.json")).unwrap()).unwrap();
    assert!(summary.get("rows").is_none());
    assert_eq!(summary["meta"]["config"]["n"], 400);
    assert!(summary["meta"]["sequences"][0]["assumptions"]["sparsity"].is_string());

    let files = write_report(&report, OutputFormat::Json, Some(dir.path()), &mut sink).unwrap();
    let full: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(full["rows"].as_array().unwrap().len(), 12);
    assert_eq!(full["experiment"], "gap");

    write_report(&report, OutputFormat::Csv, None, &mut sink).unwrap();
    assert_eq!(String::from_utf8(sink).unwrap(), report.to_csv().unwrap());
}

#[test]
fn summary_statistics() {
    let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!((s.mean, s.sd), (2.0, 1.0));
    assert!((s.stderr - 0.5774).abs() < 1e-4);
    assert!((s.ci_low - (2.0 - 1.96 * s.stderr)).abs() < 1e-15);
    assert_eq!(summarize(&[7.5; 4]).unwrap().sd, 0.0);
    assert_eq!(summarize(&[]), Err(EmptySample));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.toml");
    std::fs::write(
        &path,
        "n = 500\nreplicates = 3\nfamily = { kind = \"two_block\", low = 5, high = 10 }\nformat = \"json\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&path, ExperimentKind::Gap).unwrap();
    assert_eq!(cfg.n, 500);
    assert_eq!(cfg.format, OutputFormat::Json);
    assert_eq!(cfg.family, DegreeFamily::TwoBlock { low: 5, high: 10 });
    assert_eq!(cfg.max_attempts, 100_000);
    assert!(ExperimentConfig::load(&dir.path().join("missing.toml"), ExperimentKind::Gap).is_err());
    assert!(ExperimentConfig::from_toml("n = \"many\"", ExperimentKind::Gap).is_err());
}
