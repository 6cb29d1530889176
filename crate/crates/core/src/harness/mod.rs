//! Reproducible Monte Carlo experiments.
//!
//! Replicate `i` of an experiment draws from its own [`RngStream`] (see
//! [`crate::rng::StreamRole`]), replicates run on a fixed-size worker pool,
//! and results are merged by replicate index. A configuration and seed
//! therefore determine every per-replicate value regardless of the worker
//! count.
//!
//! [`RngStream`]: crate::rng::RngStream

pub mod config;
mod esd;
mod gap;
mod moments;
mod report;
pub mod stats;
mod sweep;

use rayon::prelude::*;
use thiserror::Error;

use crate::degree::DegreeError;
use crate::ensemble::SampleError;
use crate::oracle::OracleError;
use crate::spectral::SpectralError;
use crate::theory::TheoryError;

pub use config::{EsdReference, ExperimentConfig, ExperimentKind, MomentForm, OutputFormat};
pub use esd::{run_esd_experiment, EsdReport};
pub use gap::{run_ensemble_gap, GapReport, GapRow};
pub use moments::{run_moment_checks, FixtureCheck, Law, MomentComparison, MomentRow, MomentsReport};
pub use report::{write_report, Report, ReportMeta, SequenceInfo};
pub use stats::{summarize, EmptySample, SummaryStats};
pub use sweep::{run_concentration_sweep, SweepPoint, SweepReport, SweepRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("experiment has zero replicates")]
    EmptyExperiment,
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error("replicate {replicate}: {source}")]
    Sample {
        replicate: usize,
        #[source]
        source: SampleError,
    },
    #[error("replicate {replicate}: {source}")]
    Solver {
        replicate: usize,
        #[source]
        source: SpectralError,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit status: 2 for configuration problems, 3 when a sampler
    /// cannot produce a graph, 4 when an eigensolver does not converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::EmptyExperiment | HarnessError::Degree(_) => 2,
            HarnessError::Sample { source, .. } => match source {
                SampleError::UnknownSampler(_) | SampleError::DuplicateSampler(_) => 2,
                _ => 3,
            },
            HarnessError::Oracle(OracleError::Sample(_)) => 3,
            HarnessError::Oracle(_) | HarnessError::Theory(_) => 2,
            HarnessError::Solver { source, .. } => match source {
                SpectralError::NoConvergence { .. } => 4,
                _ => 2,
            },
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<EmptySample> for HarnessError {
    fn from(_: EmptySample) -> Self {
        HarnessError::EmptyExperiment
    }
}

/// Runs `job(0..count)` on `workers` threads and returns the results in
/// index order. The first failing index wins.
pub fn run_replicates<T, F>(workers: usize, count: usize, job: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(usize) -> Result<T, HarnessError> + Sync + Send,
{
    if workers <= 1 {
        return (0..count).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<T, HarnessError>> = pool.install(|| (0..count).into_par_iter().map(&job).collect());
    results.into_iter().collect()
}

/// Milliseconds since `start`, or zero when timing is off.
pub(crate) fn wall_ms(start: std::time::Instant, timing: bool) -> f64 {
    if timing {
        (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
    } else {
        0.0
    }
}

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    Ok(match cfg.experiment {
        ExperimentKind::Gap => Report::Gap(run_ensemble_gap(cfg)?),
        ExperimentKind::Sweep => Report::Sweep(run_concentration_sweep(cfg)?),
        ExperimentKind::Esd => Report::Esd(run_esd_experiment(cfg)?),
        ExperimentKind::Moments => Report::Moments(run_moment_checks(cfg)?),
    })
}
