//! Random-graph ensembles with prescribed degrees.
//!
//! Each sampling algorithm implements [`GraphSampler`] and is registered by
//! name in a [`SamplerRegistry`]; experiments pick one at runtime:
//!
//! | name           | ensemble        | algorithm                                        |
//! |----------------|-----------------|--------------------------------------------------|
//! | `cm-rejection` | microcanonical  | resample uniform matchings until simple          |
//! | `cm-mcmc`      | microcanonical  | double-edge swaps from a Havel-Hakimi start      |
//! | `cm-auto`      | microcanonical  | rejection when simplicity is likely, else swaps  |
//! | `chung-lu`     | canonical       | independent edges with `p_ij = d_i d_j / m_1`    |

mod chung_lu;
mod configuration;
mod expected;
mod switching;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{is_graphical, DegreeError, DegreeSequence};
use crate::graph::SimpleGraph;
use crate::rng::RngStream;

pub use chung_lu::{sample_chung_lu, sample_chung_lu_pairwise, sample_chung_lu_skipping, DIRECT_PAIR_LIMIT};
pub use configuration::{
    estimated_simple_probability, sample_cm_multigraph, sample_cm_simple_rejection, sample_matching,
    RejectionOutcome, DEFAULT_MAX_ATTEMPTS, REJECTION_THRESHOLD,
};
pub use expected::{expected_adjacency_cm, uniform_simple_edge_prob, ExpectedAdjacency};
pub use switching::{default_swaps, havel_hakimi, sample_cm_simple_mcmc};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("degree sequence is not graphical; no simple realization exists")]
    NotGraphical,
    #[error("no simple graph after {attempts} matchings; use the switching sampler")]
    AttemptsExhausted { attempts: u64 },
    #[error("Chung-Lu needs max_degree^2 < m1, got {max_degree}^2 >= {m1}")]
    InvalidRegime { max_degree: u64, m1: u128 },
    #[error("unknown sampler {0:?}")]
    UnknownSampler(String),
    #[error("sampler {0:?} is already registered")]
    DuplicateSampler(String),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// Which side of the hard/soft constraint divide a sampler draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Microcanonical,
    Canonical,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Microcanonical => "microcanonical",
            Ensemble::Canonical => "canonical",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SampledGraph {
    pub graph: SimpleGraph,
    /// Matchings drawn (rejection) or swaps attempted (switching); zero for Chung-Lu.
    pub effort: u64,
    /// Name of the algorithm that actually produced the graph.
    pub strategy: &'static str,
}

pub trait GraphSampler: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn ensemble(&self) -> Ensemble;

    fn sample(&self, seq: &DegreeSequence, rng: &mut RngStream) -> Result<SampledGraph, SampleError>;
}

/// Budgets shared by the built-in samplers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub max_attempts: u64,
    /// Swap budget for the switching chain; `None` uses [`default_swaps`].
    pub swaps: Option<u64>,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            swaps: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RejectionSampler {
    pub max_attempts: u64,
}

impl GraphSampler for RejectionSampler {
    fn name(&self) -> &'static str {
        "cm-rejection"
    }

    fn ensemble(&self) -> Ensemble {
        Ensemble::Microcanonical
    }

    fn sample(&self, seq: &DegreeSequence, rng: &mut RngStream) -> Result<SampledGraph, SampleError> {
        let out = sample_cm_simple_rejection(seq, rng, self.max_attempts)?;
        Ok(SampledGraph {
            graph: out.graph,
            effort: out.attempts,
            strategy: self.name(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SwitchingSampler {
    pub swaps: Option<u64>,
}

impl GraphSampler for SwitchingSampler {
    fn name(&self) -> &'static str {
        "cm-mcmc"
    }

    fn ensemble(&self) -> Ensemble {
        Ensemble::Microcanonical
    }

    fn sample(&self, seq: &DegreeSequence, rng: &mut RngStream) -> Result<SampledGraph, SampleError> {
        let swaps = self.swaps.unwrap_or_else(|| default_swaps(seq.edge_count() as u64));
        let graph = sample_cm_simple_mcmc(seq, rng, swaps)?;
        Ok(SampledGraph {
            graph,
            effort: swaps,
            strategy: self.name(),
        })
    }
}

/// Rejection when the heuristic simplicity probability exceeds
/// [`REJECTION_THRESHOLD`], switching otherwise. A rejection run that
/// exhausts its budget falls back to switching.
#[derive(Debug, Clone)]
pub struct AutoSampler {
    pub rejection: RejectionSampler,
    pub switching: SwitchingSampler,
}

impl AutoSampler {
    pub fn prefers_rejection(seq: &DegreeSequence) -> bool {
        estimated_simple_probability(seq) > REJECTION_THRESHOLD
    }
}

impl GraphSampler for AutoSampler {
    fn name(&self) -> &'static str {
        "cm-auto"
    }

    fn ensemble(&self) -> Ensemble {
        Ensemble::Microcanonical
    }

    fn sample(&self, seq: &DegreeSequence, rng: &mut RngStream) -> Result<SampledGraph, SampleError> {
        if !is_graphical(seq) {
            return Err(SampleError::NotGraphical);
        }
        if Self::prefers_rejection(seq) {
            match self.rejection.sample(seq, rng) {
                Err(SampleError::AttemptsExhausted { attempts }) => {
                    let mut out = self.switching.sample(seq, rng)?;
                    out.effort += attempts;
                    Ok(out)
                }
                other => other,
            }
        } else {
            self.switching.sample(seq, rng)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ChungLuSampler;

impl GraphSampler for ChungLuSampler {
    fn name(&self) -> &'static str {
        "chung-lu"
    }

    fn ensemble(&self) -> Ensemble {
        Ensemble::Canonical
    }

    fn sample(&self, seq: &DegreeSequence, rng: &mut RngStream) -> Result<SampledGraph, SampleError> {
        Ok(SampledGraph {
            graph: sample_chung_lu(seq, rng)?,
            effort: 0,
            strategy: self.name(),
        })
    }
}

pub type SamplerFactory = fn(&SamplerParams) -> Box<dyn GraphSampler>;

/// Name → constructor table for samplers.
#[derive(Clone)]
pub struct SamplerRegistry {
    factories: BTreeMap<&'static str, SamplerFactory>,
}

impl fmt::Debug for SamplerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for SamplerRegistry {
    fn default() -> Self {
        Self::with_builtin()
    }
}

impl SamplerRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtin() -> Self {
        let mut reg = Self::empty();
        let builtin: [(&'static str, SamplerFactory); 4] = [
            ("cm-rejection", |p| {
                Box::new(RejectionSampler {
                    max_attempts: p.max_attempts,
                })
            }),
            ("cm-mcmc", |p| Box::new(SwitchingSampler { swaps: p.swaps })),
            ("cm-auto", |p| {
                Box::new(AutoSampler {
                    rejection: RejectionSampler {
                        max_attempts: p.max_attempts,
                    },
                    switching: SwitchingSampler { swaps: p.swaps },
                })
            }),
            ("chung-lu", |_| Box::new(ChungLuSampler)),
        ];
        for (name, factory) in builtin {
            reg.register(name, factory).expect("builtin names are distinct");
        }
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: SamplerFactory) -> Result<(), SampleError> {
        if self.factories.contains_key(name) {
            return Err(SampleError::DuplicateSampler(name.to_string()));
        }
        self.factories.insert(name, factory);
        Ok(())
    }

    pub fn build(&self, name: &str, params: &SamplerParams) -> Result<Box<dyn GraphSampler>, SampleError> {
        self.factories
            .get(name)
            .map(|factory| factory(params))
            .ok_or_else(|| SampleError::UnknownSampler(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }
}
