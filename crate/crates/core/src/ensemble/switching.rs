//! Double-edge-swap Markov chain on simple graphs with fixed degrees.

use crate::degree::{is_graphical, DegreeSequence};
use crate::graph::SimpleGraph;
use crate::rng::RngStream;

use super::SampleError;

/// `ceil(20 |E| ln max(|E|, 2))`.
pub fn default_swaps(edges: u64) -> u64 {
    let e = edges.max(2) as f64;
    (20.0 * edges as f64 * e.ln()).ceil() as u64
}

/// Deterministic simple realization: repeatedly connect the vertex with the
/// largest residual degree to the vertices with the next-largest residuals.
pub fn havel_hakimi(seq: &DegreeSequence) -> Result<Vec<(u32, u32)>, SampleError> {
    let n = seq.len();
    let max = seq.m_inf() as usize;
    let mut residual: Vec<usize> = seq.degrees().iter().map(|&d| d as usize).collect();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max + 1];
    // Reverse order so that pops hand out low labels first.
    for v in (0..n).rev() {
        buckets[residual[v]].push(v as u32);
    }
    let mut top = max;
    let mut edges = Vec::with_capacity(seq.edge_count() as usize);
    let mut chosen: Vec<u32> = Vec::with_capacity(max);

    loop {
        while top > 0 && buckets[top].is_empty() {
            top -= 1;
        }
        if top == 0 {
            break;
        }
        let v = buckets[top].pop().expect("nonempty bucket");
        let need = residual[v as usize];
        residual[v as usize] = 0;

        chosen.clear();
        let mut b = top;
        while chosen.len() < need {
            if b == 0 {
                return Err(SampleError::NotGraphical);
            }
            match buckets[b].pop() {
                Some(u) => chosen.push(u),
                None => b -= 1,
            }
        }
        for &u in &chosen {
            edges.push((v.min(u), v.max(u)));
            residual[u as usize] -= 1;
        }
        // Reinsert in reverse so the bucket order stays stable.
        for &u in chosen.iter().rev() {
            let r = residual[u as usize];
            if r > 0 {
                buckets[r].push(u);
            }
        }
    }
    Ok(edges)
}

/// Chain state: edge list plus per-vertex neighbor slots at fixed offsets
/// (degrees never change under a swap).
struct SwapState {
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl SwapState {
    fn new(seq: &DegreeSequence, edges: Vec<(u32, u32)>) -> Self {
        let offsets = seq.half_edge_offsets();
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; *offsets.last().expect("n + 1 offsets")];
        for &(u, v) in &edges {
            adj[fill[u as usize]] = v;
            fill[u as usize] += 1;
            adj[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        Self { edges, offsets, adj }
    }

    #[inline]
    fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    fn has_edge(&self, u: u32, v: u32) -> bool {
        let (a, b) = if self.neighbors(u).len() <= self.neighbors(v).len() {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).contains(&b)
    }

    #[inline]
    fn replace(&mut self, v: u32, old: u32, new: u32) {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        let slot = self.adj[range.clone()]
            .iter()
            .position(|&w| w == old)
            .expect("swapped edge present in neighbor list");
        self.adj[range.start + slot] = new;
    }

    /// One lazy step: propose `{u,v},{x,y} -> {u,x},{v,y}` and apply it
    /// unless it creates a loop or a repeated edge.
    fn step(&mut self, rng: &mut RngStream) -> bool {
        let m = self.edges.len() as u64;
        let e1 = rng.below(m) as usize;
        let e2 = rng.below(m) as usize;
        let flip = rng.below(2) == 1;
        if e1 == e2 {
            return false;
        }
        let (u, v) = self.edges[e1];
        let (mut x, mut y) = self.edges[e2];
        if flip {
            std::mem::swap(&mut x, &mut y);
        }
        if u == x || v == y || self.has_edge(u, x) || self.has_edge(v, y) {
            return false;
        }
        self.replace(u, v, x);
        self.replace(v, u, y);
        self.replace(x, y, u);
        self.replace(y, x, v);
        self.edges[e1] = (u, x);
        self.edges[e2] = (v, y);
        debug_assert!(u != x && v != y && self.neighbors(u).iter().filter(|&&w| w == x).count() == 1);
        debug_assert!(self.neighbors(v).iter().filter(|&&w| w == y).count() == 1);
        true
    }

    fn into_graph(self, n: usize) -> SimpleGraph {
        let mut edges: Vec<(u32, u32)> = self.edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        SimpleGraph::from_sorted_unchecked(n, edges)
    }
}

/// Runs `swaps` steps of the switching chain from the Havel-Hakimi
/// realization. The chain is symmetric and lazy, so its stationary law is
/// uniform over simple graphs with degrees `seq`.
pub fn sample_cm_simple_mcmc(seq: &DegreeSequence, rng: &mut RngStream, swaps: u64) -> Result<SimpleGraph, SampleError> {
    if !is_graphical(seq) {
        return Err(SampleError::NotGraphical);
    }
    let start = havel_hakimi(seq)?;
    let mut state = SwapState::new(seq, start);
    if state.edges.len() >= 2 {
        for _ in 0..swaps {
            state.step(rng);
        }
    }
    let graph = state.into_graph(seq.len());
    debug_assert_eq!(graph.degrees(), seq.degrees());
    debug_assert!(graph.edges().windows(2).all(|w| w[0] < w[1]));
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn seq(d: &[i64]) -> DegreeSequence {
        DegreeSequence::new(d).unwrap()
    }

    #[test]
    fn havel_hakimi_realizes_degrees() {
        for d in [&[2i64, 2, 2][..], &[3, 3, 3, 3], &[3, 2, 2, 2, 1], &[1, 1], &[4, 3, 3, 2, 2, 2]] {
            let s = seq(d);
            let edges = havel_hakimi(&s).unwrap();
            let g = SimpleGraph::from_edges(s.len(), edges).unwrap();
            assert_eq!(g.degrees(), s.degrees());
        }
        assert_eq!(havel_hakimi(&seq(&[3, 3, 1, 1])).unwrap_err(), SampleError::NotGraphical);
    }

    #[test]
    fn havel_hakimi_on_band_sequence() {
        let s = crate::degree::make_family(&crate::degree::DegreeFamily::Band { lo: 5, hi: 20 }, 500, 4)
            .unwrap()
            .sequence;
        let g = SimpleGraph::from_edges(s.len(), havel_hakimi(&s).unwrap()).unwrap();
        assert_eq!(g.degrees(), s.degrees());
    }

    #[test]
    fn triangle_is_the_only_state() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..20 {
            let g = sample_cm_simple_mcmc(&seq(&[2, 2, 2]), &mut rng, 50).unwrap();
            assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        }
    }

    #[test]
    fn four_cycles_are_visited_evenly() {
        let s = seq(&[2, 2, 2, 2]);
        let mut rng = RngStream::new(9, 0);
        let swaps = default_swaps(4);
        let mut counts: HashMap<Vec<(u32, u32)>, u32> = HashMap::new();
        for _ in 0..3000 {
            let g = sample_cm_simple_mcmc(&s, &mut rng, swaps).unwrap();
            *counts.entry(g.edges().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for &c in counts.values() {
            assert!((c as i64 - 1000).abs() < 120, "{c}");
        }
    }

    #[test]
    fn not_graphical_is_reported() {
        let mut rng = RngStream::new(2, 0);
        assert_eq!(
            sample_cm_simple_mcmc(&seq(&[3, 3, 1, 1]), &mut rng, 10).unwrap_err(),
            SampleError::NotGraphical
        );
    }

    #[test]
    fn swaps_preserve_degrees_and_simplicity() {
        let s = DegreeSequence::from_degrees(vec![5; 60]).unwrap();
        let mut state = SwapState::new(&s, havel_hakimi(&s).unwrap());
        let mut rng = RngStream::new(4, 0);
        let mut accepted = 0;
        for _ in 0..2000 {
            if state.step(&mut rng) {
                accepted += 1;
                for v in 0..60u32 {
                    let nb = state.neighbors(v);
                    assert!(!nb.contains(&v));
                    let mut sorted = nb.to_vec();
                    sorted.sort_unstable();
                    sorted.dedup();
                    assert_eq!(sorted.len(), 5);
                }
            }
        }
        assert!(accepted > 500);
    }

    #[test]
    fn default_budget() {
        assert_eq!(default_swaps(4), (80.0 * 4f64.ln()).ceil() as u64);
        assert_eq!(default_swaps(1), (20.0 * 2f64.ln()).ceil() as u64);
    }
}
