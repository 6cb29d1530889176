use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ensemble::{Ensemble, GraphSampler, SamplerRegistry};
use crate::rng::{RngStream, StreamRole};
use crate::spectral::{canonical_centered_operator, centered_operator, Centering, Eigensolver, SolverRegistry};
use crate::theory::{lambda1_canonical, lambda1_microcanonical, Prediction};

use super::config::ExperimentConfig;
use super::report::{sequence_for, ReportMeta};
use super::stats::{summarize, SummaryStats};
use super::{run_replicates, wall_ms, HarnessError};

/// One replicate of the gap experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub experiment: String,
    pub ensemble: Ensemble,
    pub n: usize,
    pub replicate: usize,
    pub seed_stream: u64,
    pub lambda1: f64,
    pub lambda2: Option<f64>,
    pub lambda_n: f64,
    pub h_norm: Option<f64>,
    pub attempts_or_swaps: u64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub meta: ReportMeta,
    pub rows: Vec<GapRow>,
    pub microcanonical: SummaryStats,
    pub canonical: SummaryStats,
    /// Canonical mean minus microcanonical mean.
    pub gap: f64,
    /// `√(se_mic² + se_can²)`.
    pub gap_stderr: f64,
    pub gap_ci: (f64, f64),
    pub predictions: Vec<Prediction>,
    pub h_norm: Option<BTreeMap<String, SummaryStats>>,
    /// How many microcanonical replicates each concrete algorithm produced.
    pub strategies: BTreeMap<String, usize>,
}

impl GapReport {
    pub fn prediction(&self, name: &str) -> Option<f64> {
        self.predictions.iter().find(|p| p.name == name).map(|p| p.value)
    }

    /// `(gap − 1) / gap_stderr`.
    pub fn gap_z(&self) -> f64 {
        (self.gap - 1.0) / self.gap_stderr
    }
}

pub(crate) fn build_sampler(name: &str, cfg: &ExperimentConfig) -> Result<Box<dyn GraphSampler>, HarnessError> {
    SamplerRegistry::with_builtin()
        .build(name, &cfg.sampler_params())
        .map_err(|e| HarnessError::Config(e.to_string()))
}

pub(crate) fn build_solver(cfg: &ExperimentConfig) -> Result<Box<dyn Eigensolver>, HarnessError> {
    SolverRegistry::with_builtin()
        .build(&cfg.solver)
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Samples both ensembles on one degree sequence and compares mean `λ1`.
pub fn run_ensemble_gap(cfg: &ExperimentConfig) -> Result<GapReport, HarnessError> {
    cfg.validate()?;
    let (seq, info) = sequence_for(cfg, cfg.n)?;
    let micro = build_sampler(&cfg.sampler, cfg)?;
    let canon = build_sampler(&cfg.canonical_sampler, cfg)?;
    let solver = build_solver(cfg)?;
    let opts = cfg.solver_options();
    let r = cfg.replicates;

    let jobs = run_replicates(cfg.workers, 2 * r, |job| {
        let (sampler, role, replicate) = if job < r {
            (&micro, StreamRole::Microcanonical, job)
        } else {
            (&canon, StreamRole::Canonical, job - r)
        };
        let start = Instant::now();
        let mut rng = RngStream::for_role(cfg.seed, role, replicate as u64);
        let sampled = sampler
            .sample(&seq, &mut rng)
            .map_err(|source| HarnessError::Sample { replicate, source })?;
        let solver_err = |source| HarnessError::Solver { replicate, source };
        let g = &sampled.graph;
        let summary = solver.extreme_eigenvalues(g, &opts, cfg.lambda2).map_err(solver_err)?;
        let h_norm = if cfg.h_norm {
            let norm = match sampler.ensemble() {
                Ensemble::Microcanonical => {
                    let h = centered_operator(g, &seq, Centering::Full).map_err(solver_err)?;
                    solver.operator_norm(&h, &opts)
                }
                Ensemble::Canonical => {
                    let h = canonical_centered_operator(g, &seq).map_err(solver_err)?;
                    solver.operator_norm(&h, &opts)
                }
            };
            Some(norm.map_err(solver_err)?)
        } else {
            None
        };
        let row = GapRow {
            experiment: "gap".into(),
            ensemble: sampler.ensemble(),
            n: seq.len(),
            replicate,
            seed_stream: rng.stream_id(),
            lambda1: summary.lambda1,
            lambda2: summary.lambda2,
            lambda_n: summary.lambda_n,
            h_norm,
            attempts_or_swaps: sampled.effort,
            wall_ms: wall_ms(start, cfg.timing),
        };
        Ok((row, sampled.strategy))
    })?;

    let mut strategies = BTreeMap::new();
    for (row, strategy) in &jobs[..r] {
        debug_assert_eq!(row.ensemble, Ensemble::Microcanonical);
        *strategies.entry(strategy.to_string()).or_insert(0) += 1;
    }
    let rows: Vec<GapRow> = jobs.into_iter().map(|(row, _)| row).collect();
    let lambda = |range: &[GapRow]| range.iter().map(|row| row.lambda1).collect::<Vec<_>>();
    let microcanonical = summarize(&lambda(&rows[..r]))?;
    let canonical = summarize(&lambda(&rows[r..]))?;
    let gap = canonical.mean - microcanonical.mean;
    let gap_stderr = (microcanonical.stderr.powi(2) + canonical.stderr.powi(2)).sqrt();
    let h_norm = if cfg.h_norm {
        let norms = |range: &[GapRow]| range.iter().filter_map(|row| row.h_norm).collect::<Vec<_>>();
        let mut m = BTreeMap::new();
        m.insert(Ensemble::Microcanonical.to_string(), summarize(&norms(&rows[..r]))?);
        m.insert(Ensemble::Canonical.to_string(), summarize(&norms(&rows[r..]))?);
        Some(m)
    } else {
        None
    };

    Ok(GapReport {
        meta: ReportMeta::new(cfg, vec![info]),
        rows,
        microcanonical,
        canonical,
        gap,
        gap_stderr,
        gap_ci: (gap - 1.96 * gap_stderr, gap + 1.96 * gap_stderr),
        predictions: vec![lambda1_microcanonical(&seq), lambda1_canonical(&seq)],
        h_norm,
        strategies,
    })
}
