use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::rng::{RngStream, StreamRole};
use crate::spectral::{centered_operator, Centering};

use super::config::ExperimentConfig;
use super::gap::{build_sampler, build_solver};
use super::report::{sequence_for, ReportMeta};
use super::stats::{slope, summarize, SummaryStats};
use super::{run_replicates, wall_ms, HarnessError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub experiment: String,
    pub n: usize,
    pub replicate: usize,
    pub seed_stream: u64,
    pub m_inf: u64,
    pub lambda1: f64,
    pub h_norm: f64,
    /// `‖H‖ / √m∞`
    pub h_norm_scaled: f64,
    /// `|λ1 − m2/m1| / √m∞`
    pub lambda1_deviation: f64,
    /// `λ1` over the mean `λ1` at this `n`.
    pub lambda1_relative: f64,
    pub attempts_or_swaps: u64,
    pub wall_ms: f64,
}

/// Aggregates at one vertex count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub m_inf: u64,
    pub lambda1: SummaryStats,
    pub lambda1_cv: f64,
    pub max_h_norm_scaled: f64,
    pub max_lambda1_deviation: f64,
    pub lambda1_reference: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub meta: ReportMeta,
    pub rows: Vec<SweepRow>,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `max ‖H‖/√m∞` against `log2 n`: change per doubling.
    pub h_norm_trend: f64,
}

/// Spectral norm of the centered adjacency across a grid of sizes.
///
/// Replicate `r` at grid position `k` uses the microcanonical stream
/// `(k << 32) | r`.
pub fn run_concentration_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    cfg.validate()?;
    let sampler = build_sampler(&cfg.sampler, cfg)?;
    let solver = build_solver(cfg)?;
    let opts = cfg.solver_options();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut infos = Vec::new();

    for (k, &n) in cfg.grid().iter().enumerate() {
        let (seq, info) = sequence_for(cfg, n)?;
        infos.push(info);
        let reference = seq.moment_f64(2) / seq.moment_f64(1);
        let root = (seq.m_inf() as f64).sqrt();
        let mut block = run_replicates(cfg.workers, cfg.replicates, |replicate| {
            let start = Instant::now();
            let index = ((k as u64) << 32) | replicate as u64;
            let mut rng = RngStream::for_role(cfg.seed, StreamRole::Microcanonical, index);
            let sampled = sampler
                .sample(&seq, &mut rng)
                .map_err(|source| HarnessError::Sample { replicate, source })?;
            let solver_err = |source| HarnessError::Solver { replicate, source };
            let g = &sampled.graph;
            let lambda1 = solver.largest_eigenvalue(g, &opts).map_err(solver_err)?.value;
            let h = centered_operator(g, &seq, Centering::Full).map_err(solver_err)?;
            let h_norm = solver.operator_norm(&h, &opts).map_err(solver_err)?;
            Ok(SweepRow {
                experiment: "sweep".into(),
                n,
                replicate,
                seed_stream: rng.stream_id(),
                m_inf: seq.m_inf(),
                lambda1,
                h_norm,
                h_norm_scaled: h_norm / root,
                lambda1_deviation: (lambda1 - reference).abs() / root,
                lambda1_relative: f64::NAN,
                attempts_or_swaps: sampled.effort,
                wall_ms: wall_ms(start, cfg.timing),
            })
        })?;
        let lambdas: Vec<f64> = block.iter().map(|r| r.lambda1).collect();
        let stats = summarize(&lambdas)?;
        for row in &mut block {
            row.lambda1_relative = row.lambda1 / stats.mean;
        }
        let max = |f: fn(&SweepRow) -> f64| block.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        points.push(SweepPoint {
            n,
            m_inf: seq.m_inf(),
            lambda1_cv: stats.coefficient_of_variation(),
            lambda1: stats,
            max_h_norm_scaled: max(|r| r.h_norm_scaled),
            max_lambda1_deviation: max(|r| r.lambda1_deviation),
            lambda1_reference: reference,
        });
        rows.extend(block);
    }

    let x: Vec<f64> = points.iter().map(|p| (p.n as f64).log2()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.max_h_norm_scaled).collect();
    Ok(SweepReport {
        meta: ReportMeta::new(cfg, infos),
        rows,
        h_norm_trend: slope(&x, &y),
        points,
    })
}
