//! Dense symmetric eigenvalues: Householder tridiagonalization followed by
//! implicit QL, plus a cyclic Jacobi solver for the small projected
//! matrices of the Lanczos iteration.

use super::{SpectralError, SymmetricOperator};

/// Largest dimension accepted by [`dense_spectrum`].
pub const DENSE_LIMIT: usize = 4000;

/// All eigenvalues of `op`, ascending.
pub fn dense_spectrum(op: &dyn SymmetricOperator) -> Result<Vec<f64>, SpectralError> {
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(SpectralError::DimensionTooLarge { n, limit: DENSE_LIMIT });
    }
    let mut a = super::DenseMatrix::from_operator(op).into_data();
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    drop(a);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

/// Reduces the lower triangle of the row-major matrix `a` to tridiagonal
/// form in place and returns `(diagonal, subdiagonal)`. Each Householder
/// step applies the previous rank-two update and forms the next
/// matrix-vector product in the same sweep over the trailing block.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return (d, e);
    }
    // Pending update A ← A − v wᵀ − w vᵀ on the block after the last step.
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut pending = false;
    let mut p = vec![0.0; n];

    for k in 0..n {
        if pending {
            for i in k..n {
                a[i * n + k] -= v[i] * w[k] + w[i] * v[k];
            }
        }
        d[k] = a[k * n + k];
        if k + 1 >= n {
            break;
        }

        let sigma: f64 = (k + 2..n).map(|i| a[i * n + k].powi(2)).sum();
        let x0 = a[(k + 1) * n + k];
        if sigma == 0.0 {
            // Column already reduced; flush the pending update on the next
            // step's block without a new reflection.
            e[k] = x0;
            if pending {
                for i in k + 1..n {
                    let row = &mut a[i * n..i * n + i + 1];
                    for j in k + 1..=i {
                        row[j] -= v[i] * w[j] + w[i] * v[j];
                    }
                }
            }
            pending = false;
            continue;
        }
        let alpha = -x0.signum() * (x0 * x0 + sigma).sqrt();
        e[k] = alpha;

        // Householder vector u = x − alpha e1 on indices k+1..n, H = I − τ u uᵀ.
        let mut u = vec![0.0; n];
        u[k + 1] = x0 - alpha;
        for i in k + 2..n {
            u[i] = a[i * n + k];
        }
        let tau = 2.0 / (u[k + 1] * u[k + 1] + sigma);

        // Sweep: finish the pending update and compute p = B u.
        for pi in p[k + 1..n].iter_mut() {
            *pi = 0.0;
        }
        for i in k + 1..n {
            let row = &mut a[i * n..i * n + i + 1];
            let ui = u[i];
            let mut acc = 0.0;
            if pending {
                let (vi, wi) = (v[i], w[i]);
                for j in k + 1..i {
                    let aij = row[j] - (vi * w[j] + wi * v[j]);
                    row[j] = aij;
                    acc += aij * u[j];
                    p[j] += aij * ui;
                }
                row[i] -= 2.0 * vi * wi;
            } else {
                for j in k + 1..i {
                    let aij = row[j];
                    acc += aij * u[j];
                    p[j] += aij * ui;
                }
            }
            p[i] += acc + row[i] * ui;
        }

        // w = τ p − (τ² uᵀp / 2) u
        let up: f64 = (k + 1..n).map(|i| u[i] * p[i]).sum();
        let kappa = 0.5 * tau * tau * up;
        for i in 0..=k {
            v[i] = 0.0;
            w[i] = 0.0;
        }
        for i in k + 1..n {
            v[i] = u[i];
            w[i] = tau * p[i] - kappa * u[i];
        }
        pending = true;
    }
    e[n - 1] = 0.0;
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix; `e[i]` couples `d[i]`
/// and `d[i+1]`. Eigenvalues overwrite `d` (unsorted).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<(), SpectralError> {
    let n = d.len();
    const MAX_SWEEPS: usize = 60;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(SpectralError::NoConvergence { max_iter: MAX_SWEEPS });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues and orthonormal eigenvectors (columns of the returned
/// row-major matrix) of a small symmetric matrix, by cyclic Jacobi sweeps.
/// Eigenvalues are ascending.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        let total: f64 = m.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = m[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let (app, arr) = (m[p * n + p], m[r * n + r]);
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkr) = (m[k * n + p], m[k * n + r]);
                    m[k * n + p] = c * mkp - s * mkr;
                    m[k * n + r] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let (mpk, mrk) = (m[p * n + k], m[r * n + k]);
                    m[p * n + k] = c * mpk - s * mrk;
                    m[r * n + k] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let (qkp, qkr) = (q[k * n + p], q[k * n + r]);
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + col] = q[k * n + src];
        }
    }
    (values, vectors)
}
