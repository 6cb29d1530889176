//! Brute-force ground truth for tiny degree sequences: every perfect
//! matching of the half-edges, and every labeled simple realization.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::degree::DegreeSequence;
use crate::ensemble::{expected_adjacency_cm, GraphSampler, SampleError};
use crate::graph::{matching_to_multigraph, Matching, MultiGraph, SimpleGraph};
use crate::rng::RngStream;
use crate::spectral::{centered_multigraph_operator, dense_spectrum, quadratic_form, Centering};

/// Largest `m1` accepted by the matching enumeration (`15!! ≈ 2·10⁶`).
pub const MAX_ENUM_HALF_EDGES: u128 = 16;
pub const MAX_SIMPLE_ENUM_N: usize = 8;
pub const MAX_SIMPLE_ENUM_DEGREE: u64 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("sequence too large for enumeration: {0}")]
    TooLarge(String),
    #[error("only {count} simple realization(s); a uniformity test needs two")]
    DegenerateSupport { count: usize },
    #[error("functional list is empty")]
    NoFunctionals,
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Perfect matchings in canonical order: the lowest unmatched half-edge is
/// paired with each later unmatched half-edge in increasing order.
#[derive(Debug, Clone)]
pub struct MatchingEnumerator {
    partner: Vec<u32>,
    /// Pairs in the order they were formed; `(low, high)`.
    stack: Vec<(u32, u32)>,
    first: bool,
    finished: bool,
}

const FREE: u32 = u32::MAX;

impl MatchingEnumerator {
    fn new(size: usize) -> Self {
        let mut e = Self {
            partner: vec![FREE; size],
            stack: Vec::with_capacity(size / 2),
            first: true,
            finished: false,
        };
        e.complete();
        e
    }

    /// Greedily pairs the remaining half-edges with their smallest options.
    fn complete(&mut self) {
        let size = self.partner.len();
        let mut a = 0;
        loop {
            while a < size && self.partner[a] != FREE {
                a += 1;
            }
            if a >= size {
                return;
            }
            let b = (a + 1..size).find(|&b| self.partner[b] == FREE).expect("even count");
            self.link(a as u32, b as u32);
        }
    }

    fn link(&mut self, a: u32, b: u32) {
        self.partner[a as usize] = b;
        self.partner[b as usize] = a;
        self.stack.push((a, b));
    }

    fn advance(&mut self) -> bool {
        let size = self.partner.len() as u32;
        while let Some((a, b)) = self.stack.pop() {
            self.partner[a as usize] = FREE;
            self.partner[b as usize] = FREE;
            if let Some(next) = (b + 1..size).find(|&c| self.partner[c as usize] == FREE) {
                self.link(a, next);
                self.complete();
                return true;
            }
        }
        false
    }
}

impl Iterator for MatchingEnumerator {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.finished {
            return None;
        }
        if self.first {
            self.first = false;
        } else if !self.advance() {
            self.finished = true;
            return None;
        }
        Some(Matching::from_partner_unchecked(self.partner.clone()))
    }
}

pub fn enumerate_matchings(seq: &DegreeSequence) -> Result<MatchingEnumerator, OracleError> {
    if seq.m1() > MAX_ENUM_HALF_EDGES {
        return Err(OracleError::TooLarge(format!(
            "m1 = {} exceeds {MAX_ENUM_HALF_EDGES}",
            seq.m1()
        )));
    }
    Ok(MatchingEnumerator::new(seq.m1() as usize))
}

/// `(m1 − 1)!!`.
pub fn double_factorial_odd(m1: u128) -> u128 {
    (1..m1).step_by(2).product::<u128>().max(1)
}

/// A scalar function of the multigraph induced by a matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    Lambda1,
    /// `a_ij`, loop-counts-two on the diagonal.
    Entry { i: usize, j: usize },
    /// `⟨ẽ, (A − ẽẽᵀ) ẽ⟩`
    QuadraticRank1,
    /// `⟨ẽ, (A − E[A]) ẽ⟩`
    QuadraticFull,
    /// `⟨ẽ, H² ẽ⟩` with `H = A − E[A]`.
    QuadraticFullSquared,
    /// `Σ_k Σ_{i≠j} a_ki a_kj d_i d_j`
    WedgeSum,
}

impl Functional {
    pub fn label(&self) -> String {
        match self {
            Functional::Lambda1 => "lambda1".into(),
            Functional::Entry { i, j } => format!("a_{i}_{j}"),
            Functional::QuadraticRank1 => "quadratic_rank1".into(),
            Functional::QuadraticFull => "quadratic_full".into(),
            Functional::QuadraticFullSquared => "quadratic_full_squared".into(),
            Functional::WedgeSum => "wedge_sum".into(),
        }
    }

    pub fn evaluate(&self, g: &MultiGraph, seq: &DegreeSequence) -> f64 {
        match *self {
            Functional::Lambda1 => *dense_spectrum(g).expect("tiny graph").last().unwrap_or(&0.0),
            Functional::Entry { i, j } => g.entry(i, j) as f64,
            Functional::QuadraticRank1 | Functional::QuadraticFull | Functional::QuadraticFullSquared => {
                let (mode, k) = match self {
                    Functional::QuadraticRank1 => (Centering::Rank1, 1),
                    Functional::QuadraticFull => (Centering::Full, 1),
                    _ => (Centering::Full, 2),
                };
                let op = centered_multigraph_operator(g, seq, mode).expect("matching preserves degrees");
                let e = op.rank1_vector().to_vec();
                quadratic_form(&op, &e, k).expect("dimensions agree")
            }
            Functional::WedgeSum => {
                let mut total = 0.0;
                for k in 0..g.n() {
                    let row: Vec<(usize, u32)> = g.row(k).collect();
                    let s: f64 = row.iter().map(|&(i, a)| a as f64 * seq.degree(i) as f64).sum();
                    let diag: f64 = row
                        .iter()
                        .map(|&(i, a)| (a as f64 * seq.degree(i) as f64).powi(2))
                        .sum();
                    total += s * s - diag;
                }
                total
            }
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalExpectation {
    pub functional: Functional,
    pub name: String,
    pub unconditioned: f64,
    /// `None` when no matching yields a simple graph.
    pub conditioned: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactLaw {
    pub degrees: Vec<u64>,
    pub total_matchings: u128,
    pub simple_count: u128,
    /// `simple_count / total_matchings` in lowest terms, as `"p/q"`.
    pub p_simple: String,
    pub no_simple_realization: bool,
    pub expectations: Vec<FunctionalExpectation>,
}

impl ExactLaw {
    pub fn p_simple_ratio(&self) -> Ratio<i128> {
        Ratio::new(self.simple_count as i128, self.total_matchings as i128)
    }

    pub fn get(&self, f: Functional) -> Option<&FunctionalExpectation> {
        self.expectations.iter().find(|e| e.functional == f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain record")
    }
}

fn matching_is_simple(m: &Matching, owners: &[u32], seen: &mut Vec<(u32, u32)>) -> bool {
    seen.clear();
    for (a, b) in m.pairs() {
        let (u, v) = (owners[a], owners[b]);
        if u == v {
            return false;
        }
        seen.push((u.min(v), u.max(v)));
    }
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

/// Exact expectations of `functionals` under the uniform matching law and
/// under the same law conditioned on simplicity.
pub fn exact_cm_law(seq: &DegreeSequence, functionals: &[Functional]) -> Result<ExactLaw, OracleError> {
    if functionals.is_empty() {
        return Err(OracleError::NoFunctionals);
    }
    let owners = seq.half_edge_owners();
    let mut all = vec![Sum::default(); functionals.len()];
    let mut simple = vec![Sum::default(); functionals.len()];
    let (mut total, mut simple_count) = (0u128, 0u128);
    let mut scratch = Vec::new();
    for m in enumerate_matchings(seq)? {
        let g = matching_to_multigraph(&m, seq).expect("sized from seq");
        let is_simple = matching_is_simple(&m, &owners, &mut scratch);
        total += 1;
        if is_simple {
            simple_count += 1;
        }
        for (k, f) in functionals.iter().enumerate() {
            let v = f.evaluate(&g, seq);
            all[k].add(v);
            if is_simple {
                simple[k].add(v);
            }
        }
    }
    debug_assert_eq!(total, double_factorial_odd(seq.m1()));
    let p = Ratio::new(simple_count as i128, total as i128);
    let expectations = functionals
        .iter()
        .enumerate()
        .map(|(k, f)| FunctionalExpectation {
            functional: *f,
            name: f.label(),
            unconditioned: all[k].value() / total as f64,
            conditioned: (simple_count > 0).then(|| simple[k].value() / simple_count as f64),
        })
        .collect();
    Ok(ExactLaw {
        degrees: seq.degrees().to_vec(),
        total_matchings: total,
        simple_count,
        p_simple: format!("{}/{}", p.numer(), p.denom()),
        no_simple_realization: simple_count == 0,
        expectations,
    })
}

/// Exact `E[a_ij]` under the matching law, as reduced fractions.
pub fn exact_mean_adjacency(seq: &DegreeSequence) -> Result<Vec<Vec<Ratio<i128>>>, OracleError> {
    let n = seq.len();
    let mut counts = vec![vec![0i128; n]; n];
    let mut total = 0i128;
    for m in enumerate_matchings(seq)? {
        let g = matching_to_multigraph(&m, seq).expect("sized from seq");
        for (i, row) in counts.iter_mut().enumerate() {
            for (j, a) in g.row(i) {
                row[j] += a as i128;
            }
        }
        total += 1;
    }
    Ok(counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| Ratio::new(c, total)).collect())
        .collect())
}

/// Exact probability that half-edges `α` and `β` are matched, for every pair.
pub fn exact_pairing_marginals(seq: &DegreeSequence) -> Result<Vec<Vec<Ratio<i128>>>, OracleError> {
    let size = seq.m1() as usize;
    let mut counts = vec![vec![0i128; size]; size];
    let mut total = 0i128;
    for m in enumerate_matchings(seq)? {
        for (a, b) in m.pairs() {
            counts[a][b] += 1;
            counts[b][a] += 1;
        }
        total += 1;
    }
    Ok(counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| Ratio::new(c, total)).collect())
        .collect())
}

/// All labeled simple graphs with degree sequence `seq`, edge lists sorted
/// lexicographically.
pub fn enumerate_simple_graphs(seq: &DegreeSequence) -> Result<Vec<SimpleGraph>, OracleError> {
    let n = seq.len();
    if n > MAX_SIMPLE_ENUM_N || seq.m_inf() > MAX_SIMPLE_ENUM_DEGREE {
        return Err(OracleError::TooLarge(format!(
            "simple enumeration needs n <= {MAX_SIMPLE_ENUM_N} and max degree <= {MAX_SIMPLE_ENUM_DEGREE}"
        )));
    }
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
        .collect();
    let mut residual: Vec<u64> = seq.degrees().to_vec();
    let mut chosen = Vec::new();
    let mut out = Vec::new();

    fn recurse(
        k: usize,
        pairs: &[(u32, u32)],
        residual: &mut [u64],
        chosen: &mut Vec<(u32, u32)>,
        out: &mut Vec<SimpleGraph>,
        n: usize,
    ) {
        if residual.iter().all(|&r| r == 0) {
            out.push(SimpleGraph::from_sorted_unchecked(n, chosen.clone()));
            return;
        }
        if k == pairs.len() {
            return;
        }
        let (u, v) = pairs[k];
        // Vertex u has no pairs left after its last partner (n - 1).
        if v as usize == n - 1 && residual[u as usize] > 1 {
            return;
        }
        if residual[u as usize] > 0 && residual[v as usize] > 0 {
            residual[u as usize] -= 1;
            residual[v as usize] -= 1;
            chosen.push((u, v));
            recurse(k + 1, pairs, residual, chosen, out, n);
            chosen.pop();
            residual[u as usize] += 1;
            residual[v as usize] += 1;
        }
        if !(v as usize == n - 1 && residual[u as usize] > 0) {
            recurse(k + 1, pairs, residual, chosen, out, n);
        }
    }

    recurse(0, &pairs, &mut residual, &mut chosen, &mut out, n);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub sampler: String,
    pub realizations: usize,
    pub samples: usize,
    pub counts: Vec<u64>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of sampled realizations against the uniform law
/// on [`enumerate_simple_graphs`].
pub fn uniformity_check(
    sampler: &dyn GraphSampler,
    seq: &DegreeSequence,
    samples: usize,
    rng: &mut RngStream,
) -> Result<UniformityReport, OracleError> {
    let support = enumerate_simple_graphs(seq)?;
    if support.len() < 2 {
        return Err(OracleError::DegenerateSupport { count: support.len() });
    }
    let index: HashMap<&[(u32, u32)], usize> = support.iter().enumerate().map(|(i, g)| (g.edges(), i)).collect();
    let mut counts = vec![0u64; support.len()];
    for _ in 0..samples {
        let g = sampler.sample(seq, rng)?.graph;
        let i = index
            .get(g.edges())
            .copied()
            .expect("samplers return realizations of the sequence");
        counts[i] += 1;
    }
    let expect = samples as f64 / support.len() as f64;
    let chi_square: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    let dof = support.len() - 1;
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(chi_square);
    Ok(UniformityReport {
        sampler: sampler.name().to_string(),
        realizations: support.len(),
        samples,
        counts,
        chi_square,
        degrees_of_freedom: dof,
        p_value,
    })
}

/// The expectation identities the matching law must satisfy on `seq`:
/// largest absolute deviation from each closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub degrees: Vec<u64>,
    pub adjacency_max_error: f64,
    pub pairing_max_error: f64,
    pub rank1_k1_error: f64,
    pub full_k1_error: f64,
}

impl IdentityCheck {
    pub fn worst(&self) -> f64 {
        self.adjacency_max_error
            .max(self.pairing_max_error)
            .max(self.rank1_k1_error)
            .max(self.full_k1_error)
    }
}

pub fn check_identities(seq: &DegreeSequence) -> Result<IdentityCheck, OracleError> {
    let to_f = |r: &Ratio<i128>| *r.numer() as f64 / *r.denom() as f64;
    let expected = expected_adjacency_cm(seq);
    let mean = exact_mean_adjacency(seq)?;
    let mut adjacency_max_error: f64 = 0.0;
    for (i, row) in mean.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            adjacency_max_error = adjacency_max_error.max((to_f(v) - expected.entry(i, j)).abs());
        }
    }
    let target = Ratio::new(1, seq.m1() as i128 - 1);
    let marginals = exact_pairing_marginals(seq)?;
    let mut pairing_max_error: f64 = 0.0;
    for (a, row) in marginals.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if a != b {
                pairing_max_error = pairing_max_error.max(to_f(&(v - target)).abs());
            }
        }
    }
    let law = exact_cm_law(seq, &[Functional::QuadraticRank1, Functional::QuadraticFull])?;
    let k1 = crate::theory::expected_h_quadratic_k1(seq).value;
    Ok(IdentityCheck {
        degrees: seq.degrees().to_vec(),
        adjacency_max_error,
        pairing_max_error,
        rank1_k1_error: (law.expectations[0].unconditioned - k1).abs(),
        full_k1_error: law.expectations[1].unconditioned.abs(),
    })
}
