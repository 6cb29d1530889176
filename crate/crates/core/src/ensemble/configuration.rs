use crate::degree::DegreeSequence;
use crate::graph::{matching_to_multigraph, Matching, MultiGraph, SimpleGraph};
use crate::rng::RngStream;

use super::SampleError;

pub const DEFAULT_MAX_ATTEMPTS: u64 = 100_000;

/// Auto-selection uses rejection while the estimated simplicity probability
/// stays above this value.
pub const REJECTION_THRESHOLD: f64 = 1e-4;

/// Uniform perfect matching of the half-edges, built left to right: the
/// lowest unmatched half-edge is paired with a uniformly chosen other
/// unmatched one. Every one of the `(m_1 - 1)!!` matchings is equally likely.
pub fn sample_matching(seq: &DegreeSequence, rng: &mut RngStream) -> Matching {
    let m1 = seq.m1() as usize;
    let mut pool: Vec<u32> = (0..m1 as u32).collect();
    let mut pos: Vec<u32> = (0..m1 as u32).collect();
    let mut partner = vec![u32::MAX; m1];

    let remove = |pool: &mut Vec<u32>, pos: &mut Vec<u32>, x: u32| {
        let i = pos[x as usize] as usize;
        let last = pool.pop().expect("pool holds x");
        if last != x {
            pool[i] = last;
            pos[last as usize] = i as u32;
        }
    };

    for a in 0..m1 as u32 {
        if partner[a as usize] != u32::MAX {
            continue;
        }
        remove(&mut pool, &mut pos, a);
        let b = pool[rng.below(pool.len() as u64) as usize];
        remove(&mut pool, &mut pos, b);
        partner[a as usize] = b;
        partner[b as usize] = a;
    }
    Matching::from_partner_unchecked(partner)
}

/// One draw from the unconditioned configuration model.
pub fn sample_cm_multigraph(seq: &DegreeSequence, rng: &mut RngStream) -> MultiGraph {
    let m = sample_matching(seq, rng);
    matching_to_multigraph(&m, seq).expect("matching sized from the same sequence")
}

/// Heuristic `exp(-ν/2 - ν²/4)` with `ν = m_2/m_1 - 1`, the large-n
/// probability that a configuration-model draw is simple.
pub fn estimated_simple_probability(seq: &DegreeSequence) -> f64 {
    let nu = seq.moment_f64(2) / seq.moment_f64(1) - 1.0;
    (-nu / 2.0 - nu * nu / 4.0).exp()
}

#[derive(Clone, Debug)]
pub struct RejectionOutcome {
    pub graph: SimpleGraph,
    pub attempts: u64,
}

/// Draws matchings until one induces a simple graph. The accepted graph is
/// uniform over simple realizations of `seq`.
///
/// There is no graphicality pre-check: a sequence without simple
/// realizations simply exhausts the budget.
pub fn sample_cm_simple_rejection(
    seq: &DegreeSequence,
    rng: &mut RngStream,
    max_attempts: u64,
) -> Result<RejectionOutcome, SampleError> {
    let owners = seq.half_edge_owners();
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(owners.len() / 2);
    for attempt in 1..=max_attempts {
        let m = sample_matching(seq, rng);
        edges.clear();
        let mut has_loop = false;
        for (a, b) in m.pairs() {
            let (u, v) = (owners[a], owners[b]);
            if u == v {
                has_loop = true;
                break;
            }
            edges.push((u.min(v), u.max(v)));
        }
        if has_loop {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Ok(RejectionOutcome {
            graph: SimpleGraph::from_sorted_unchecked(seq.len(), edges),
            attempts: attempt,
        });
    }
    Err(SampleError::AttemptsExhausted {
        attempts: max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn seq(d: &[i64]) -> DegreeSequence {
        DegreeSequence::new(d).unwrap()
    }

    #[test]
    fn single_pair_is_forced() {
        let mut rng = RngStream::new(3, 0);
        let m = sample_matching(&seq(&[1, 1]), &mut rng);
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn matching_support_on_222_has_fifteen_elements() {
        let s = seq(&[2, 2, 2]);
        let mut rng = RngStream::new(5, 0);
        let mut seen: HashMap<Vec<(usize, usize)>, u32> = HashMap::new();
        for _ in 0..3000 {
            *seen.entry(sample_matching(&s, &mut rng).pairs().collect()).or_default() += 1;
        }
        // 5!! = 15
        assert_eq!(seen.len(), 15);
        for &count in seen.values() {
            // each has probability 1/15 (mean 200, sd ~ 13.9)
            assert!((140..=260).contains(&count), "{count}");
        }
    }

    #[test]
    fn rejection_on_triangle() {
        let s = seq(&[2, 2, 2]);
        let mut rng = RngStream::new(8, 0);
        let mut attempts = 0u64;
        let trials = 20_000;
        for _ in 0..trials {
            let out = sample_cm_simple_rejection(&s, &mut rng, 1000).unwrap();
            assert_eq!(out.graph.edges(), &[(0, 1), (0, 2), (1, 2)]);
            attempts += out.attempts;
        }
        // acceptance rate 8/15: attempts are geometric with mean 15/8
        let rate = trials as f64 / attempts as f64;
        assert!((rate - 8.0 / 15.0).abs() < 0.015, "{rate}");
    }

    #[test]
    fn rejection_exhausts_without_simple_realization() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(
            sample_cm_simple_rejection(&seq(&[2, 2]), &mut rng, 50).unwrap_err(),
            SampleError::AttemptsExhausted { attempts: 50 }
        );
        let out = sample_cm_simple_rejection(&seq(&[1, 1]), &mut rng, 5).unwrap();
        assert_eq!(out.attempts, 1);
        assert_eq!(out.graph.edges(), &[(0, 1)]);
    }

    #[test]
    fn simplicity_estimate_decays_with_degree() {
        let p3 = estimated_simple_probability(&DegreeSequence::from_degrees(vec![3; 100]).unwrap());
        let p8 = estimated_simple_probability(&DegreeSequence::from_degrees(vec![8; 100]).unwrap());
        assert!((p3 - (-1.0f64 - 1.0).exp()).abs() < 1e-12);
        assert!(p8 < p3);
    }
}
