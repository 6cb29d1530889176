use crate::degree::DegreeSequence;

/// `E[A]` under the configuration-model matching law, stored as a rank-one
/// part minus a diagonal:
/// `E[A] = ẽ ẽᵀ − diag(d_i / (m_1 − 1))` with `ẽ_i = d_i / √(m_1 − 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedAdjacency {
    pub rank1_vector: Vec<f64>,
    pub diagonal_correction: Vec<f64>,
}

pub fn expected_adjacency_cm(seq: &DegreeSequence) -> ExpectedAdjacency {
    let denom = (seq.m1() - 1) as f64;
    let scale = denom.sqrt();
    ExpectedAdjacency {
        rank1_vector: seq.degrees().iter().map(|&d| d as f64 / scale).collect(),
        diagonal_correction: seq.degrees().iter().map(|&d| d as f64 / denom).collect(),
    }
}

impl ExpectedAdjacency {
    pub fn n(&self) -> usize {
        self.rank1_vector.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let e = &self.rank1_vector;
        let v = e[i] * e[j];
        if i == j {
            v - self.diagonal_correction[i]
        } else {
            v
        }
    }

    /// Row-major `n × n` matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.entry(i, j));
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let dot: f64 = self.rank1_vector.iter().zip(x).map(|(a, b)| a * b).sum();
        for i in 0..self.n() {
            y[i] = self.rank1_vector[i] * dot - self.diagonal_correction[i] * x[i];
        }
    }

    /// Largest eigenvalue, the root of `Σ ẽ_i² / (λ + c_i) = 1` above `−min c`.
    pub fn largest_eigenvalue(&self) -> f64 {
        if self.n() == 0 {
            return 0.0;
        }
        let c = &self.diagonal_correction;
        let e2: Vec<f64> = self.rank1_vector.iter().map(|v| v * v).collect();
        let c_min = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let secular = |lambda: f64| -> f64 { e2.iter().zip(c).map(|(w, ci)| w / (lambda + ci)).sum::<f64>() - 1.0 };

        let mut lo = -c_min;
        let mut hi = e2.iter().sum::<f64>() - c_min;
        if secular(hi) > 0.0 {
            hi = hi.abs() * 2.0 + 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Asymptotic edge probability `d_i d_j / (m_1 + d_i d_j)` of the uniform
/// simple graph. Only accurate up to a `1 + o(1)` factor; on tiny sequences
/// it can be far from the exact value.
pub fn uniform_simple_edge_prob(seq: &DegreeSequence, i: usize, j: usize) -> f64 {
    debug_assert_ne!(i, j);
    let p = seq.degree(i) as f64 * seq.degree(j) as f64;
    p / (seq.m1() as f64 + p)
}
