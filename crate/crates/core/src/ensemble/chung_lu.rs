//! Chung-Lu graphs: independent edges with `P(i ~ j) = d_i d_j / m_1`, no loops.

use crate::degree::DegreeSequence;
use crate::graph::SimpleGraph;
use crate::rng::RngStream;

use super::SampleError;

/// Up to this many vertices every pair gets its own Bernoulli draw; above it
/// the sampler skips geometrically over absent pairs.
pub const DIRECT_PAIR_LIMIT: usize = 3000;

fn check_regime(seq: &DegreeSequence) -> Result<(), SampleError> {
    let max = seq.m_inf();
    if (max as u128) * (max as u128) >= seq.m1() {
        return Err(SampleError::InvalidRegime {
            max_degree: max,
            m1: seq.m1(),
        });
    }
    Ok(())
}

pub fn sample_chung_lu(seq: &DegreeSequence, rng: &mut RngStream) -> Result<SimpleGraph, SampleError> {
    if seq.len() <= DIRECT_PAIR_LIMIT {
        sample_chung_lu_pairwise(seq, rng)
    } else {
        sample_chung_lu_skipping(seq, rng)
    }
}

/// One Bernoulli trial per unordered pair.
pub fn sample_chung_lu_pairwise(seq: &DegreeSequence, rng: &mut RngStream) -> Result<SimpleGraph, SampleError> {
    check_regime(seq)?;
    let n = seq.len();
    let m1 = seq.m1() as f64;
    let d = seq.degrees();
    let mut edges = Vec::new();
    for i in 0..n {
        let scale = d[i] as f64 / m1;
        for j in i + 1..n {
            if rng.unit() < scale * d[j] as f64 {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(SimpleGraph::from_sorted_unchecked(n, edges))
}

/// Same law as [`sample_chung_lu_pairwise`], in time proportional to the
/// number of edges: vertices are visited in decreasing degree order, so
/// along each row the edge probability only decreases and runs of absent
/// pairs can be skipped with a geometric draw at the current upper bound,
/// then thinned by the ratio of true to bound probability.
pub fn sample_chung_lu_skipping(seq: &DegreeSequence, rng: &mut RngStream) -> Result<SimpleGraph, SampleError> {
    check_regime(seq)?;
    let n = seq.len();
    let m1 = seq.m1() as f64;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| seq.degree(b as usize).cmp(&seq.degree(a as usize)).then(a.cmp(&b)));
    let w: Vec<f64> = order.iter().map(|&v| seq.degree(v as usize) as f64).collect();

    let mut edges = Vec::new();
    for a in 0..n.saturating_sub(1) {
        let mut b = a + 1;
        let mut p = w[a] * w[b] / m1;
        while b < n && p > 0.0 {
            // ln(1 - r) with r in [0, 1) never hits ln(0).
            let r = rng.unit();
            let skip = ((1.0 - r).ln() / (1.0 - p).ln()).floor();
            if skip >= (n - b) as f64 {
                break;
            }
            b += skip as usize;
            let q = w[a] * w[b] / m1;
            if rng.unit() < q / p {
                let (u, v) = (order[a], order[b]);
                edges.push((u.min(v), u.max(v)));
            }
            p = q;
            b += 1;
        }
    }
    edges.sort_unstable();
    Ok(SimpleGraph::from_sorted_unchecked(n, edges))
}
