//! Symmetric operators, iterative and dense eigensolvers, spectral densities.
//!
//! Iterative solvers implement [`Eigensolver`] and live in a
//! [`SolverRegistry`]: `lanczos` (thick-restart Lanczos with full
//! reorthogonalization, the default) and `power` (shifted power iteration
//! with deflation).

mod dense;
mod esd;
mod lanczos;
mod operator;
mod power;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dense::{dense_spectrum, symmetric_eigen, DENSE_LIMIT};
pub use esd::{esd_histogram, EsdHistogram, EsdOptions};
pub use lanczos::Lanczos;
pub use operator::{
    canonical_centered_operator, centered_multigraph_operator, centered_operator, quadratic_form, symmetry_defect,
    CenteredOperator, Centering, DenseMatrix,
};
pub use power::PowerIteration;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigensolver did not converge within {max_iter} iterations")]
    NoConvergence { max_iter: usize },
    #[error("dimension {n} exceeds the dense limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("graph degree {got} at vertex {vertex} differs from the sequence ({expected})")]
    DegreeMismatch { vertex: usize, expected: u64, got: u64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("unknown eigensolver {0:?}")]
    UnknownSolver(String),
    #[error("eigensolver {0:?} is already registered")]
    DuplicateSolver(String),
}

/// A real symmetric linear map given only by its action on vectors.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = M x`; both slices have length [`dim`](Self::dim).
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Any upper bound on the spectral radius.
    fn norm_bound(&self) -> f64;
}

impl<T: SymmetricOperator + ?Sized> SymmetricOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }

    fn norm_bound(&self) -> f64 {
        (**self).norm_bound()
    }
}

/// Which end of the spectrum to look for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Largest,
    Smallest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative residual target: `‖Mv − λv‖ ≤ tol · max(1, |λ|)`.
    pub tol: f64,
    /// Operator applications allowed per eigenpair; `None` means `10 n`.
    pub max_iter: Option<usize>,
    /// Seeds the start vector.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: None,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub(crate) fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n).max(1)
    }

    fn check(&self) -> Result<(), SpectralError> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(SpectralError::BadTolerance(self.tol))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Mv − λv‖` for the unit vector `v`.
    pub residual: f64,
    /// Operator applications used.
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda1: f64,
    /// Only computed on request.
    pub lambda2: Option<f64>,
    pub lambda_n: f64,
    /// Residuals in the order λ1, λn, λ2.
    pub residual_norms: Vec<f64>,
    pub iterations: Vec<usize>,
}

impl SpectralSummary {
    pub fn spectral_radius(&self) -> f64 {
        self.lambda1.abs().max(self.lambda_n.abs())
    }
}

pub trait Eigensolver: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Extreme eigenpair of `op` restricted to the orthogonal complement of
    /// the (orthonormal) vectors in `deflate`.
    fn extremal(
        &self,
        op: &dyn SymmetricOperator,
        end: Extreme,
        deflate: &[&[f64]],
        opts: &SolverOptions,
    ) -> Result<EigenPair, SpectralError>;

    /// λ1 and λn, plus λ2 by deflating the λ1 eigenvector when `lambda2` is set.
    fn extreme_eigenvalues(
        &self,
        op: &dyn SymmetricOperator,
        opts: &SolverOptions,
        lambda2: bool,
    ) -> Result<SpectralSummary, SpectralError> {
        opts.check()?;
        let top = self.extremal(op, Extreme::Largest, &[], opts)?;
        let bottom = self.extremal(op, Extreme::Smallest, &[], opts)?;
        let mut summary = SpectralSummary {
            lambda1: top.value,
            lambda2: None,
            lambda_n: bottom.value.min(top.value),
            residual_norms: vec![top.residual, bottom.residual],
            iterations: vec![top.iterations, bottom.iterations],
        };
        if lambda2 && op.dim() >= 2 {
            let second = self.extremal(op, Extreme::Largest, &[&top.vector], opts)?;
            summary.lambda2 = Some(second.value.min(top.value).max(summary.lambda_n));
            summary.residual_norms.push(second.residual);
            summary.iterations.push(second.iterations);
        }
        Ok(summary)
    }

    fn largest_eigenvalue(&self, op: &dyn SymmetricOperator, opts: &SolverOptions) -> Result<EigenPair, SpectralError> {
        opts.check()?;
        self.extremal(op, Extreme::Largest, &[], opts)
    }

    /// `max(|λ1|, |λn|)`.
    fn operator_norm(&self, op: &dyn SymmetricOperator, opts: &SolverOptions) -> Result<f64, SpectralError> {
        opts.check()?;
        if op.dim() == 0 {
            return Ok(0.0);
        }
        let top = self.extremal(op, Extreme::Largest, &[], opts)?;
        let bottom = self.extremal(op, Extreme::Smallest, &[], opts)?;
        Ok(top.value.abs().max(bottom.value.abs()))
    }
}

/// λ1, λ2 and λn with the default Lanczos solver.
pub fn extreme_eigenvalues(
    op: &dyn SymmetricOperator,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralSummary, SpectralError> {
    let opts = SolverOptions {
        tol,
        max_iter: Some(max_iter),
        seed: 0,
    };
    Lanczos::default().extreme_eigenvalues(op, &opts, true)
}

/// Spectral norm with the default Lanczos solver.
pub fn operator_norm(op: &dyn SymmetricOperator, tol: f64) -> Result<f64, SpectralError> {
    Lanczos::default().operator_norm(op, &SolverOptions::with_tol(tol))
}

pub type SolverFactory = fn() -> Box<dyn Eigensolver>;

#[derive(Clone)]
pub struct SolverRegistry {
    factories: BTreeMap<&'static str, SolverFactory>,
}

impl fmt::Debug for SolverRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_builtin()
    }
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("lanczos", || Box::new(Lanczos::default()))
            .expect("fresh registry");
        reg.register("power", || Box::new(PowerIteration)).expect("fresh registry");
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: SolverFactory) -> Result<(), SpectralError> {
        if self.factories.contains_key(name) {
            return Err(SpectralError::DuplicateSolver(name.to_string()));
        }
        self.factories.insert(name, factory);
        Ok(())
    }

    pub fn build(&self, name: &str) -> Result<Box<dyn Eigensolver>, SpectralError> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| SpectralError::UnknownSolver(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y -= c x`
#[inline]
pub(crate) fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= c * xi;
    }
}

/// Removes the components along each (orthonormal) vector in `basis`.
pub(crate) fn project_out(x: &mut [f64], basis: &[&[f64]]) {
    for b in basis {
        let c = dot(b, x);
        axpy(x, c, b);
    }
}

/// `‖P M v − value · v‖` with `P` projecting out `deflate`.
pub(crate) fn residual(
    op: &dyn SymmetricOperator,
    v: &[f64],
    value: f64,
    deflate: &[&[f64]],
    scratch: &mut [f64],
) -> f64 {
    op.apply(v, scratch);
    project_out(scratch, deflate);
    scratch
        .iter()
        .zip(v)
        .map(|(mv, x)| (mv - value * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;

    #[test]
    fn registry_lists_builtin_solvers() {
        let reg = SolverRegistry::with_builtin();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["lanczos", "power"]);
        assert_eq!(reg.build("power").unwrap().name(), "power");
        assert!(matches!(reg.build("qr"), Err(SpectralError::UnknownSolver(_))));
        let mut reg = reg;
        assert!(reg.register("lanczos", || Box::new(Lanczos::default())).is_err());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let g = SimpleGraph::from_edges(2, [(0, 1)]).unwrap();
        let opts = SolverOptions::with_tol(0.0);
        assert_eq!(
            Lanczos::default().extreme_eigenvalues(&g, &opts, false).unwrap_err(),
            SpectralError::BadTolerance(0.0)
        );
    }
}
