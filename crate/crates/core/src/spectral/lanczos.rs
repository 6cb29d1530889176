use crate::rng::{RngStream, StreamRole};

use super::dense::symmetric_eigen;
use super::{axpy, dot, norm, project_out, residual, EigenPair, Eigensolver, Extreme, SolverOptions, SpectralError, SymmetricOperator};

/// Thick-restart Lanczos with full (twice-iterated Gram-Schmidt)
/// reorthogonalization.
///
/// The projected matrix is kept dense, so after a restart the retained Ritz
/// vectors and the continuation vector simply form the head of the new basis.
#[derive(Clone, Debug)]
pub struct Lanczos {
    /// Largest basis size before a restart.
    pub max_basis: usize,
    /// Ritz vectors kept across a restart.
    pub keep: usize,
    /// Ritz values are checked every this many expansions.
    pub check_every: usize,
}

impl Default for Lanczos {
    fn default() -> Self {
        Self {
            max_basis: 64,
            keep: 24,
            check_every: 4,
        }
    }
}

pub(crate) fn start_vector(n: usize, deflate: &[&[f64]], seed: u64, attempt: u64) -> Option<Vec<f64>> {
    let mut rng = RngStream::for_role(seed, StreamRole::Solver, attempt);
    let mut v: Vec<f64> = (0..n).map(|_| rng.unit() - 0.5).collect();
    project_out(&mut v, deflate);
    project_out(&mut v, deflate);
    let nv = norm(&v);
    if nv <= 1e-8 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Some(v)
}

struct Ritz {
    values: Vec<f64>,
    /// Row-major `k × k`, eigenvectors in columns, ascending values.
    vectors: Vec<f64>,
}

fn ritz(t: &[f64], k: usize, stride: usize) -> Ritz {
    let mut sub = vec![0.0; k * k];
    for i in 0..k {
        sub[i * k..(i + 1) * k].copy_from_slice(&t[i * stride..i * stride + k]);
    }
    let (values, vectors) = symmetric_eigen(&sub, k);
    Ritz { values, vectors }
}

impl Eigensolver for Lanczos {
    fn name(&self) -> &'static str {
        "lanczos"
    }

    fn extremal(
        &self,
        op: &dyn SymmetricOperator,
        end: Extreme,
        deflate: &[&[f64]],
        opts: &SolverOptions,
    ) -> Result<EigenPair, SpectralError> {
        let n = op.dim();
        let cap = opts.iteration_cap(n);
        let free = n.saturating_sub(deflate.len());
        if n == 0 || free == 0 {
            return Ok(EigenPair {
                value: 0.0,
                vector: vec![0.0; n],
                residual: 0.0,
                iterations: 0,
            });
        }
        let max_basis = self.max_basis.max(3).min(free);
        let keep = self.keep.clamp(1, max_basis.saturating_sub(2).max(1));
        let pick = |k: usize| match end {
            Extreme::Largest => k - 1,
            Extreme::Smallest => 0,
        };
        let breakdown = 1e-12 * op.norm_bound();

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis + 1);
        let mut attempt = 0;
        let first = loop {
            if let Some(v) = start_vector(n, deflate, opts.seed, attempt) {
                break v;
            }
            attempt += 1;
            if attempt > 8 {
                return Err(SpectralError::NoConvergence { max_iter: 0 });
            }
        };
        basis.push(first);
        // Dense projected matrix T = Vᵀ M V, row-major with stride max_basis.
        let stride = max_basis;
        let mut t = vec![0.0; stride * stride];
        // Columns of T already filled (basis vectors whose image is known).
        let mut done = 0usize;
        let mut w = vec![0.0; n];
        let mut matvecs = 0usize;
        let mut since_check = 0usize;

        loop {
            let j = done;
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            project_out(&mut w, deflate);
            for pass in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let h = dot(b, &w);
                    if pass == 0 {
                        t[i * stride + j] = h;
                        t[j * stride + i] = h;
                    }
                    axpy(&mut w, h, b);
                }
                project_out(&mut w, deflate);
            }
            done += 1;
            let beta = norm(&w);
            let exhausted = beta <= breakdown || done == free;
            since_check += 1;

            let full = done == max_basis;
            if exhausted || full || since_check >= self.check_every || matvecs >= cap {
                since_check = 0;
                let r = ritz(&t, done, stride);
                let idx = pick(done);
                let theta = r.values[idx];
                let s_last = r.vectors[(done - 1) * done + idx];
                let est = if exhausted { 0.0 } else { beta * s_last.abs() };
                if exhausted || est <= opts.tol * theta.abs().max(1.0) {
                    let mut vector = vec![0.0; n];
                    for (i, b) in basis.iter().enumerate().take(done) {
                        axpy(&mut vector, -r.vectors[i * done + idx], b);
                    }
                    let nv = norm(&vector);
                    vector.iter_mut().for_each(|x| *x /= nv);
                    let res = residual(op, &vector, theta, deflate, &mut w);
                    return Ok(EigenPair {
                        value: theta,
                        vector,
                        residual: res,
                        iterations: matvecs + 1,
                    });
                }
                if matvecs >= cap {
                    return Err(SpectralError::NoConvergence { max_iter: cap });
                }
                if full {
                    // Keep the `keep` Ritz vectors nearest the wanted end and
                    // continue from the normalized residual direction.
                    let chosen: Vec<usize> = match end {
                        Extreme::Largest => (done - keep..done).collect(),
                        Extreme::Smallest => (0..keep).collect(),
                    };
                    let mut fresh: Vec<Vec<f64>> = Vec::with_capacity(max_basis + 1);
                    for &c in &chosen {
                        let mut y = vec![0.0; n];
                        for (i, b) in basis.iter().enumerate() {
                            axpy(&mut y, -r.vectors[i * done + c], b);
                        }
                        fresh.push(y);
                    }
                    t.iter_mut().for_each(|x| *x = 0.0);
                    for (i, &c) in chosen.iter().enumerate() {
                        t[i * stride + i] = r.values[c];
                    }
                    w.iter_mut().for_each(|x| *x /= beta);
                    fresh.push(w.clone());
                    basis = fresh;
                    done = chosen.len();
                    continue;
                }
            }
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(w.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeSequence;
    use crate::ensemble::sample_cm_simple_mcmc;
    use crate::graph::SimpleGraph;
    use crate::spectral::{
        centered_operator, dense_spectrum, extreme_eigenvalues, operator_norm, Centering, DenseMatrix,
    };

    #[test]
    fn small_known_spectra() {
        let tri = SimpleGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = extreme_eigenvalues(&tri, 1e-10, 100).unwrap();
        assert!((s.lambda1 - 2.0).abs() < 1e-10);
        assert!((s.lambda2.unwrap() + 1.0).abs() < 1e-10);
        assert!((s.lambda_n + 1.0).abs() < 1e-10);

        let path = SimpleGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = extreme_eigenvalues(&path, 1e-10, 100).unwrap();
        let r = 2f64.sqrt();
        assert!((s.lambda1 - r).abs() < 1e-10);
        assert!(s.lambda2.unwrap().abs() < 1e-10);
        assert!((s.lambda_n + r).abs() < 1e-10);

        let star = SimpleGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = extreme_eigenvalues(&star, 1e-10, 100).unwrap();
        assert!((s.lambda1 - 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn norms_of_centered_fixtures() {
        let tri = SimpleGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = DegreeSequence::new(&[2, 2, 2]).unwrap();
        let h = centered_operator(&tri, &s, Centering::Full).unwrap();
        assert!((operator_norm(&h, 1e-10).unwrap() - 0.6).abs() < 1e-10);

        let k4 = SimpleGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let s = DegreeSequence::new(&[3, 3, 3, 3]).unwrap();
        let h = centered_operator(&k4, &s, Centering::Full).unwrap();
        assert!((operator_norm(&h, 1e-10).unwrap() - 8.0 / 11.0).abs() < 1e-10);
        let h = centered_operator(&k4, &s, Centering::Rank1).unwrap();
        assert!((operator_norm(&h, 1e-10).unwrap() - 1.0).abs() < 1e-10);

        assert_eq!(operator_norm(&DenseMatrix::zeros(4), 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn regular_graph_top_eigenvalue() {
        let s = DegreeSequence::from_degrees(vec![8; 500]).unwrap();
        let mut rng = RngStream::new(3, 0);
        let g = sample_cm_simple_mcmc(&s, &mut rng, 50_000).unwrap();
        let s = extreme_eigenvalues(&g, 1e-9, 5000).unwrap();
        assert!((s.lambda1 - 8.0).abs() < 1e-8, "{}", s.lambda1);
        assert!(s.residual_norms.iter().all(|&r| r <= 1e-9 * 8.0));
    }

    #[test]
    fn agrees_with_dense_on_random_graphs() {
        let mut rng = RngStream::new(11, 0);
        for trial in 0..6 {
            let n = 60 + 30 * trial;
            let degs: Vec<u64> = (0..n).map(|i| 2 + (i as u64 * 7 + trial as u64) % 5).collect();
            let mut s = degs;
            if s.iter().sum::<u64>() % 2 == 1 {
                s[n - 1] += 1;
            }
            let seq = DegreeSequence::from_degrees(s).unwrap();
            let g = sample_cm_simple_mcmc(&seq, &mut rng, 20_000).unwrap();
            let full = dense_spectrum(&g).unwrap();
            let s = extreme_eigenvalues(&g, 1e-10, 10 * n).unwrap();
            assert!((s.lambda1 - full[n - 1]).abs() < 1e-8);
            assert!((s.lambda2.unwrap() - full[n - 2]).abs() < 1e-8, "{:?} {:?}", s.lambda2, &full[n - 3..]);
            assert!((s.lambda_n - full[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let n = 400;
        let g = SimpleGraph::from_edges(n, (0..n as u32 - 1).map(|i| (i, i + 1))).unwrap();
        let opts = SolverOptions {
            tol: 1e-14,
            max_iter: Some(5),
            seed: 0,
        };
        assert_eq!(
            Lanczos::default().largest_eigenvalue(&g, &opts).unwrap_err(),
            SpectralError::NoConvergence { max_iter: 5 }
        );
    }
}
