use serde::{Deserialize, Serialize};

use super::{dense_spectrum, SpectralError, SymmetricOperator};

/// Binned empirical spectral distribution. Counts may accumulate several
/// graphs on the same grid; `total` is the number of eigenvalues binned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsdHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    /// Eigenvalues were divided by this before binning (`√ω_n` or 1).
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EsdOptions {
    pub bins: usize,
    /// Divide eigenvalues by `√omega` (`omega` = mean degree) when set.
    pub rescale_by: Option<f64>,
    /// Binning interval in rescaled units; `None` uses `[−m∞, m∞] / scale`.
    pub range: Option<(f64, f64)>,
}

impl EsdHistogram {
    /// Equal-width bins on `[lo, hi]`. A degenerate interval becomes the
    /// single bin `[lo − ½, lo + ½]`.
    pub fn empty(bins: usize, lo: f64, hi: f64, scale: f64) -> Self {
        let edges = if hi > lo && bins > 0 {
            let w = (hi - lo) / bins as f64;
            let mut e: Vec<f64> = (0..bins).map(|b| lo + w * b as f64).collect();
            e.push(hi);
            e
        } else {
            vec![lo - 0.5, lo + 0.5]
        };
        let counts = vec![0; edges.len() - 1];
        Self {
            edges,
            counts,
            total: 0,
            scale,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Adds already-rescaled values; values outside the grid go to the end bins.
    pub fn add_values(&mut self, values: &[f64]) {
        let lo = self.edges[0];
        let hi = *self.edges.last().expect("two edges");
        let k = self.bins();
        let w = (hi - lo) / k as f64;
        for &x in values {
            let b = ((x - lo) / w).floor();
            let b = if b.is_nan() { 0 } else { (b.max(0.0) as usize).min(k - 1) };
            self.counts[b] += 1;
        }
        self.total += values.len() as u64;
    }

    pub fn merge(&mut self, other: &EsdHistogram) {
        assert_eq!(self.edges, other.edges, "histograms on different grids");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn mass(&self, bin: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[bin] as f64 / self.total as f64
        }
    }

    pub fn density(&self, bin: usize) -> f64 {
        self.mass(bin) / (self.edges[bin + 1] - self.edges[bin])
    }

    pub fn densities(&self) -> Vec<f64> {
        (0..self.bins()).map(|b| self.density(b)).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Area under the density step function (one unless empty).
    pub fn area(&self) -> f64 {
        (0..self.bins())
            .map(|b| self.density(b) * (self.edges[b + 1] - self.edges[b]))
            .sum()
    }

    /// `Σ_b |mass_b − ref_b| + (1 − Σ_b ref_b)` where `ref_b` is the reference
    /// probability of bin `b` and the last term is reference mass off the grid.
    pub fn l1_distance(&self, reference_mass: impl Fn(f64, f64) -> f64) -> f64 {
        let mut inside = 0.0;
        let mut dist = 0.0;
        for b in 0..self.bins() {
            let q = reference_mass(self.edges[b], self.edges[b + 1]);
            inside += q;
            dist += (self.mass(b) - q).abs();
        }
        dist + (1.0 - inside).max(0.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,density\n");
        for b in 0..self.bins() {
            out.push_str(&format!("{},{},{}\n", self.edges[b], self.edges[b + 1], self.density(b)));
        }
        out
    }
}

/// Histogram of the full spectrum of `op` (dense, so `dim ≤ DENSE_LIMIT`).
pub fn esd_histogram(op: &dyn SymmetricOperator, opts: &EsdOptions) -> Result<EsdHistogram, SpectralError> {
    let eigs = dense_spectrum(op)?;
    let scale = opts.rescale_by.map(f64::sqrt).filter(|s| *s > 0.0).unwrap_or(1.0);
    let (lo, hi) = opts.range.unwrap_or_else(|| {
        let r = op.norm_bound() / scale;
        (-r, r)
    });
    let mut h = EsdHistogram::empty(opts.bins, lo, hi, scale);
    let scaled: Vec<f64> = eigs.iter().map(|x| x / scale).collect();
    h.add_values(&scaled);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;

    #[test]
    fn triangle_histogram() {
        let tri = SimpleGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = esd_histogram(
            &tri,
            &EsdOptions {
                bins: 3,
                rescale_by: None,
                range: Some((-1.5, 2.5)),
            },
        )
        .unwrap();
        assert_eq!(h.counts, vec![2, 0, 1]);
        assert!((h.mass(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.area() - 1.0).abs() < 1e-12);
        assert_eq!(h.to_csv().lines().count(), 4);
    }

    #[test]
    fn empty_graph_is_one_bin_at_zero() {
        let h = esd_histogram(
            &SimpleGraph::empty(5),
            &EsdOptions {
                bins: 10,
                rescale_by: None,
                range: None,
            },
        )
        .unwrap();
        assert_eq!(h.edges, vec![-0.5, 0.5]);
        assert_eq!(h.counts, vec![5]);
    }

    #[test]
    fn merged_counts_total_all_eigenvalues() {
        let mut a = EsdHistogram::empty(4, -2.0, 2.0, 1.0);
        a.add_values(&[-1.9, 0.1, 2.0]);
        let mut b = EsdHistogram::empty(4, -2.0, 2.0, 1.0);
        b.add_values(&[-3.0, 1.0]);
        a.merge(&b);
        assert_eq!(a.counts, vec![2, 0, 1, 2]);
        assert_eq!(a.total, 5);
        assert!((a.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l1_against_uniform() {
        let mut h = EsdHistogram::empty(2, 0.0, 1.0, 1.0);
        h.add_values(&[0.1, 0.2, 0.3, 0.7]);
        // masses 0.75, 0.25 vs 0.5, 0.5
        assert!((h.l1_distance(|a, b| b - a) - 0.5).abs() < 1e-12);
    }
}
