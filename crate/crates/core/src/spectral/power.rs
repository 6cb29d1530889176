use super::lanczos::start_vector;
use super::{dot, norm, project_out, residual, EigenPair, Eigensolver, Extreme, SolverOptions, SpectralError, SymmetricOperator};

/// Power iteration on `M + σI` (largest) or `σI − M` (smallest) with
/// `σ = norm_bound + 1`, which makes the wanted end dominant and positive.
#[derive(Clone, Copy, Debug, Default)]
pub struct PowerIteration;

impl Eigensolver for PowerIteration {
    fn name(&self) -> &'static str {
        "power"
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
        if n == 0 || n <= deflate.len() {
            return Ok(EigenPair {
                value: 0.0,
                vector: vec![0.0; n],
                residual: 0.0,
                iterations: 0,
            });
        }
        let shift = op.norm_bound() + 1.0;
        let sign = match end {
            Extreme::Largest => 1.0,
            Extreme::Smallest => -1.0,
        };
        let mut v = (0..8)
            .find_map(|a| start_vector(n, deflate, opts.seed, a))
            .ok_or(SpectralError::NoConvergence { max_iter: 0 })?;
        let mut mv = vec![0.0; n];
        let mut scratch = vec![0.0; n];

        for it in 1..=cap {
            op.apply(&v, &mut mv);
            let theta = dot(&v, &mv);
            if it % 8 == 0 || it == cap {
                // Deflation vectors are only approximate eigenvectors, so the
                // residual is taken on the deflated operator.
                let res = residual(op, &v, theta, deflate, &mut scratch);
                if res <= opts.tol * theta.abs().max(1.0) {
                    return Ok(EigenPair {
                        value: theta,
                        vector: v,
                        residual: res,
                        iterations: it + it / 8,
                    });
                }
            }
            for i in 0..n {
                mv[i] = sign * mv[i] + shift * v[i];
            }
            project_out(&mut mv, deflate);
            let nm = norm(&mv);
            if nm == 0.0 {
                break;
            }
            for i in 0..n {
                v[i] = mv[i] / nm;
            }
        }
        Err(SpectralError::NoConvergence { max_iter: cap })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;

    #[test]
    fn power_finds_both_ends() {
        let star = SimpleGraph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let opts = SolverOptions {
            tol: 1e-10,
            max_iter: Some(10_000),
            seed: 1,
        };
        let s = PowerIteration.extreme_eigenvalues(&star, &opts, true).unwrap();
        assert!((s.lambda1 - 2.0).abs() < 1e-9);
        assert!((s.lambda_n + 2.0).abs() < 1e-9);
        assert!(s.lambda2.unwrap().abs() < 1e-9);
    }

    #[test]
    fn power_agrees_with_lanczos() {
        let g = SimpleGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2), (1, 4)]).unwrap();
        let opts = SolverOptions {
            tol: 1e-11,
            max_iter: Some(100_000),
            seed: 2,
        };
        let a = PowerIteration.extreme_eigenvalues(&g, &opts, false).unwrap();
        let b = super::super::Lanczos::default().extreme_eigenvalues(&g, &opts, false).unwrap();
        assert!((a.lambda1 - b.lambda1).abs() < 1e-9);
        assert!((a.lambda_n - b.lambda_n).abs() < 1e-9);
    }
}
