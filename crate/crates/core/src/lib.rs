//! Spectral laboratory for random graphs with prescribed degrees.
//!
//! The crate samples two ensembles built on the same degree sequence:
//!
//! * the *microcanonical* configuration model, where every degree is a hard
//!   constraint (a uniform half-edge matching, conditioned on being simple), and
//! * the *canonical* Chung-Lu model, where degrees only hold on average.
//!
//! It computes largest-eigenvalue statistics for both, evaluates the closed-form
//! predictions for their expected largest eigenvalue (which differ by exactly one),
//! and checks the predictions against Monte Carlo estimates and exact enumeration
//! on tiny instances.
//!
//! Samplers and eigensolvers are interchangeable strategies behind the
//! [`ensemble::GraphSampler`] and [`spectral::Eigensolver`] traits; both are
//! registered by name and selected at runtime from an experiment configuration.

pub mod degree;
pub mod ensemble;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod spectral;
pub mod theory;
pub mod validate;

pub use degree::{AssumptionReport, DegreeError, DegreeFamily, DegreeSequence};
pub use ensemble::{GraphSampler, SampleError, SamplerRegistry};
pub use graph::{Matching, MultiGraph, SimpleGraph};
pub use rng::RngStream;
pub use spectral::{Eigensolver, SolverRegistry, SpectralError, SpectralSummary, SymmetricOperator};

/// Version string embedded in every experiment report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
