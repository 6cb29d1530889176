use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::degree::DegreeSequence;
use crate::ensemble::sample_cm_multigraph;
use crate::oracle::{exact_cm_law, Functional};
use crate::rng::{RngStream, StreamRole};
use crate::spectral::{
    centered_multigraph_operator, centered_operator, quadratic_form, CenteredOperator, Centering, SpectralError,
    SymmetricOperator,
};
use crate::theory::{expected_h_quadratic_k1, expected_h_quadratic_k2, normalized_h2_leading, Prediction};

use super::config::{ExperimentConfig, MomentForm};
use super::gap::build_sampler;
use super::report::{sequence_for, ReportMeta};
use super::stats::{summarize, SummaryStats};
use super::{run_replicates, wall_ms, HarnessError};

/// Offset keeping the fixture streams clear of the replicate streams.
const FIXTURE_STREAM_OFFSET: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    /// Uniform simple graph with the given degrees.
    Simple,
    /// Multigraph of a uniform half-edge matching.
    Matching,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub experiment: String,
    pub law: Law,
    pub n: usize,
    pub replicate: usize,
    pub seed_stream: u64,
    /// `⟨ẽ, (A − ẽẽᵀ) ẽ⟩`
    pub k1_rank1: Option<f64>,
    /// `⟨ẽ, (A − E[A]) ẽ⟩`
    pub k1_full: Option<f64>,
    /// `⟨ẽ, H² ẽ⟩ / (m2/(m1−1))²`
    pub k2_normalized: Option<f64>,
    pub attempts_or_swaps: u64,
    pub wall_ms: f64,
}

/// Monte Carlo mean of one form under one law next to a prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub law: Law,
    pub form: String,
    pub prediction: Prediction,
    pub stats: SummaryStats,
    /// `(mean − prediction) / stderr`.
    pub z: f64,
    /// `(mean − prediction) / |prediction|`; infinite when the prediction is zero.
    pub relative_error: f64,
}

/// Monte Carlo against exact enumeration on a tiny sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub degrees: Vec<u64>,
    pub law: Law,
    pub functional: String,
    pub exact: f64,
    pub stats: SummaryStats,
    pub z: f64,
    pub within_3_sigma: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentsReport {
    pub meta: ReportMeta,
    pub rows: Vec<MomentRow>,
    pub comparisons: Vec<MomentComparison>,
    pub fixture: Vec<FixtureCheck>,
}

impl MomentsReport {
    pub fn comparison(&self, law: Law, form: &str, prediction: &str) -> Option<&MomentComparison> {
        self.comparisons
            .iter()
            .find(|c| c.law == law && c.form == form && c.prediction.name == prediction)
    }
}

fn z_score(mean: f64, stderr: f64, target: f64) -> f64 {
    // Rounding noise alone must not make a constant sample look significant.
    let floor = 1e-10 * target.abs().max(1.0);
    (mean - target) / stderr.max(floor)
}

struct Forms {
    k1_rank1: Option<f64>,
    k1_full: Option<f64>,
    k2_normalized: Option<f64>,
}

fn evaluate_forms<G: SymmetricOperator + ?Sized>(
    rank1: &CenteredOperator<'_, G>,
    full: &CenteredOperator<'_, G>,
    forms: &[MomentForm],
    k2_scale: f64,
) -> Result<Forms, SpectralError> {
    let e = full.rank1_vector();
    let mut out = Forms {
        k1_rank1: None,
        k1_full: None,
        k2_normalized: None,
    };
    if forms.contains(&MomentForm::K1) {
        out.k1_rank1 = Some(quadratic_form(rank1, e, 1)?);
        out.k1_full = Some(quadratic_form(full, e, 1)?);
    }
    if forms.contains(&MomentForm::K2) {
        out.k2_normalized = Some(quadratic_form(full, e, 2)? / k2_scale);
    }
    Ok(out)
}

/// `(m2 / (m1 − 1))²`.
fn k2_scale(seq: &DegreeSequence) -> f64 {
    (seq.moment_f64(2) / (seq.moment_f64(1) - 1.0)).powi(2)
}

/// Quadratic forms of the centered adjacency along `ẽ`, on uniform simple
/// graphs and on raw matchings, against their predictions; plus the same
/// forms on a tiny fixture against exact enumeration.
pub fn run_moment_checks(cfg: &ExperimentConfig) -> Result<MomentsReport, HarnessError> {
    cfg.validate()?;
    let (seq, info) = sequence_for(cfg, cfg.n)?;
    let sampler = build_sampler(&cfg.sampler, cfg)?;
    let scale = k2_scale(&seq);
    let r = cfg.replicates;

    let rows = run_replicates(cfg.workers, 2 * r, |job| {
        let start = Instant::now();
        let (law, replicate) = if job < r { (Law::Simple, job) } else { (Law::Matching, job - r) };
        let solver_err = |source| HarnessError::Solver { replicate, source };
        let (forms, stream, effort) = match law {
            Law::Simple => {
                let mut rng = RngStream::for_role(cfg.seed, StreamRole::Microcanonical, replicate as u64);
                let sampled = sampler
                    .sample(&seq, &mut rng)
                    .map_err(|source| HarnessError::Sample { replicate, source })?;
                let g = &sampled.graph;
                let rank1 = centered_operator(g, &seq, Centering::Rank1).map_err(solver_err)?;
                let full = centered_operator(g, &seq, Centering::Full).map_err(solver_err)?;
                let forms = evaluate_forms(&rank1, &full, &cfg.forms, scale).map_err(solver_err)?;
                (forms, rng.stream_id(), sampled.effort)
            }
            Law::Matching => {
                let mut rng = RngStream::for_role(cfg.seed, StreamRole::Matching, replicate as u64);
                let g = sample_cm_multigraph(&seq, &mut rng);
                let rank1 = centered_multigraph_operator(&g, &seq, Centering::Rank1).map_err(solver_err)?;
                let full = centered_multigraph_operator(&g, &seq, Centering::Full).map_err(solver_err)?;
                let forms = evaluate_forms(&rank1, &full, &cfg.forms, scale).map_err(solver_err)?;
                (forms, rng.stream_id(), 1)
            }
        };
        Ok(MomentRow {
            experiment: "moments".into(),
            law,
            n: seq.len(),
            replicate,
            seed_stream: stream,
            k1_rank1: forms.k1_rank1,
            k1_full: forms.k1_full,
            k2_normalized: forms.k2_normalized,
            attempts_or_swaps: effort,
            wall_ms: wall_ms(start, cfg.timing),
        })
    })?;

    let mut comparisons = Vec::new();
    let k1 = expected_h_quadratic_k1(&seq);
    let zero_full = Prediction {
        name: "expected_h_quadratic_k1_full".into(),
        value: 0.0,
        kind: crate::theory::PredictionKind::Exact,
        citation: "mean of <e~,(A - E[A])e~> under the uniform half-edge matching is zero".into(),
    };
    let leading = normalized_h2_leading(&seq);
    let k2_formula = match expected_h_quadratic_k2(&seq) {
        Ok(mut p) => {
            p.name = "expected_h_quadratic_k2_normalized".into();
            p.value /= scale;
            Some(p)
        }
        Err(_) => None,
    };
    for law in [Law::Simple, Law::Matching] {
        let of_law = |f: fn(&MomentRow) -> Option<f64>| -> Vec<f64> {
            rows.iter().filter(|row| row.law == law).filter_map(f).collect()
        };
        let mut compare = |form: &str, values: Vec<f64>, prediction: &Prediction| -> Result<(), HarnessError> {
            if values.is_empty() {
                return Ok(());
            }
            let stats = summarize(&values)?;
            comparisons.push(MomentComparison {
                law,
                form: form.into(),
                z: z_score(stats.mean, stats.stderr, prediction.value),
                relative_error: (stats.mean - prediction.value) / prediction.value.abs(),
                prediction: prediction.clone(),
                stats,
            });
            Ok(())
        };
        compare("k1_rank1", of_law(|r| r.k1_rank1), &k1)?;
        compare("k1_full", of_law(|r| r.k1_full), &zero_full)?;
        compare("k2_normalized", of_law(|r| r.k2_normalized), &leading)?;
        if let Some(p) = &k2_formula {
            compare("k2_normalized", of_law(|r| r.k2_normalized), p)?;
        }
    }

    let fixture = match &cfg.fixture {
        Some(raw) => fixture_checks(&DegreeSequence::new(raw)?, cfg)?,
        None => Vec::new(),
    };

    Ok(MomentsReport {
        meta: ReportMeta::new(cfg, vec![info]),
        rows,
        comparisons,
        fixture,
    })
}

fn fixture_checks(seq: &DegreeSequence, cfg: &ExperimentConfig) -> Result<Vec<FixtureCheck>, HarnessError> {
    let mut functionals = Vec::new();
    if cfg.forms.contains(&MomentForm::K1) {
        functionals.extend([Functional::QuadraticRank1, Functional::QuadraticFull]);
    }
    if cfg.forms.contains(&MomentForm::K2) {
        functionals.push(Functional::QuadraticFullSquared);
    }
    let law = exact_cm_law(seq, &functionals)?;
    let rejection = build_sampler("cm-rejection", cfg)?;
    let samples = cfg.fixture_samples.max(1);

    let mut matching_values = vec![Vec::with_capacity(samples); functionals.len()];
    let mut simple_values = vec![Vec::with_capacity(samples); functionals.len()];
    for j in 0..samples as u64 {
        let mut rng = RngStream::for_role(cfg.seed, StreamRole::Matching, FIXTURE_STREAM_OFFSET + j);
        let g = sample_cm_multigraph(seq, &mut rng);
        for (k, f) in functionals.iter().enumerate() {
            matching_values[k].push(f.evaluate(&g, seq));
        }
        if law.simple_count > 0 {
            let mut rng = RngStream::for_role(cfg.seed, StreamRole::Microcanonical, FIXTURE_STREAM_OFFSET + j);
            let g = rejection
                .sample(seq, &mut rng)
                .map_err(|source| HarnessError::Sample {
                    replicate: j as usize,
                    source,
                })?
                .graph
                .to_multigraph();
            for (k, f) in functionals.iter().enumerate() {
                simple_values[k].push(f.evaluate(&g, seq));
            }
        }
    }

    let mut out = Vec::new();
    for (k, f) in functionals.iter().enumerate() {
        let expectation = law.get(*f).expect("requested functional");
        let targets = [
            (Law::Matching, Some(expectation.unconditioned), &matching_values[k]),
            (Law::Simple, expectation.conditioned, &simple_values[k]),
        ];
        for (which, exact, values) in targets {
            let Some(exact) = exact else { continue };
            let stats = summarize(values)?;
            let z = z_score(stats.mean, stats.stderr, exact);
            out.push(FixtureCheck {
                degrees: seq.degrees().to_vec(),
                law: which,
                functional: f.label(),
                exact,
                within_3_sigma: z.abs() <= 3.0,
                z,
                stats,
            });
        }
    }
    Ok(out)
}
