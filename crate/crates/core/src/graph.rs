//! Half-edge matchings, the multigraphs they induce, and simple graphs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::degree::DegreeSequence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("half-edge {0} is unpaired, paired with itself, or paired inconsistently")]
    BadPairing(usize),
    #[error("matching has {got} half-edges but the degree sequence has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("repeated edge {0}-{1}")]
    RepeatedEdge(u32, u32),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("malformed edge list: {0}")]
    Parse(String),
}

/// A fixed-point-free involution on the flat half-edge indices `0..m_1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    partner: Vec<u32>,
}

impl Matching {
    /// Validates that `partner` is an involution without fixed points.
    pub fn from_partner(partner: Vec<u32>) -> Result<Self, GraphError> {
        for (x, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= partner.len() || p == x || partner[p] as usize != x {
                return Err(GraphError::BadPairing(x));
            }
        }
        Ok(Self { partner })
    }

    /// Builds the matching from its pairs.
    pub fn from_pairs(size: usize, pairs: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut partner = vec![u32::MAX; size];
        for &(a, b) in pairs {
            for x in [a, b] {
                if x as usize >= size || partner[x as usize] != u32::MAX {
                    return Err(GraphError::BadPairing(x as usize));
                }
            }
            partner[a as usize] = b;
            partner[b as usize] = a;
        }
        Self::from_partner(partner)
    }

    pub(crate) fn from_partner_unchecked(partner: Vec<u32>) -> Self {
        debug_assert!(Self::from_partner(partner.clone()).is_ok());
        Self { partner }
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn partner(&self, half_edge: usize) -> usize {
        self.partner[half_edge] as usize
    }

    /// Matched pairs `(a, b)` with `a < b`, in increasing order of `a`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|(a, &b)| *a < b as usize)
            .map(|(a, &b)| (a, b as usize))
    }

    pub fn matches(&self, a: usize, b: usize) -> bool {
        self.partner[a] as usize == b
    }
}

/// Sparse symmetric row storage shared by the graph types.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Rows {
    offsets: Vec<usize>,
    cols: Vec<u32>,
}

impl Rows {
    /// `entries` holds both orientations of every off-diagonal entry.
    fn build(n: usize, entries: &mut [(u32, u32)]) -> Self {
        entries.sort_unstable();
        let mut offsets = vec![0usize; n + 1];
        for &(r, _) in entries.iter() {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let cols = entries.iter().map(|&(_, c)| c).collect();
        Self { offsets, cols }
    }

    #[inline]
    fn row(&self, i: usize) -> &[u32] {
        &self.cols[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Multigraph induced by a matching. Entry `a_ij` counts the matched pairs
/// between `i` and `j`; the diagonal `a_ii` is twice the number of
/// self-loops, so every row sums to the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    rows: Rows,
    mult: Vec<u32>,
}

impl MultiGraph {
    /// Builds from unordered vertex pairs; `(i, i)` is a self-loop.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut entries = Vec::new();
        for (u, v) in pairs {
            if u == v {
                // Two entries so the diagonal reads 2 per loop.
                entries.push((u, u));
                entries.push((u, u));
            } else {
                entries.push((u, v));
                entries.push((v, u));
            }
        }
        entries.sort_unstable();
        let mut dedup: Vec<(u32, u32)> = Vec::with_capacity(entries.len());
        let mut mult = Vec::with_capacity(entries.len());
        for e in entries {
            if dedup.last() == Some(&e) {
                *mult.last_mut().unwrap() += 1;
            } else {
                dedup.push(e);
                mult.push(1);
            }
        }
        let rows = Rows::build(n, &mut dedup);
        Self { n, rows, mult }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `a_ij` with the loop-counts-two convention on the diagonal.
    pub fn entry(&self, i: usize, j: usize) -> u32 {
        let row = self.rows.row(i);
        match row.binary_search(&(j as u32)) {
            Ok(k) => self.mult[self.rows.offsets[i] + k],
            Err(_) => 0,
        }
    }

    /// Nonzero entries of row `i` as `(column, multiplicity)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let start = self.rows.offsets[i];
        self.rows
            .row(i)
            .iter()
            .enumerate()
            .map(move |(k, &j)| (j as usize, self.mult[start + k]))
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, m)| m as u64).sum())
            .collect()
    }

    pub fn loop_count(&self) -> u64 {
        (0..self.n).map(|i| self.entry(i, i) as u64 / 2).sum()
    }

    /// No self-loops and no multiplicity above one.
    pub fn is_simple(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, m)| j != i && m <= 1))
    }

    pub fn to_simple(&self) -> Option<SimpleGraph> {
        if !self.is_simple() {
            return None;
        }
        let mut edges = Vec::new();
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                if i < j {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        Some(SimpleGraph::from_sorted_unchecked(self.n, edges))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, m) in self.row(i) {
                a[i * self.n + j] = m as f64;
            }
        }
        a
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let start = self.rows.offsets[i];
            let mut acc = 0.0;
            for (k, &j) in self.rows.row(i).iter().enumerate() {
                acc += self.mult[start + k] as f64 * x[j as usize];
            }
            *yi = acc;
        }
    }
}

/// Multigraph induced by a matching on `seq`'s half-edges.
pub fn matching_to_multigraph(matching: &Matching, seq: &DegreeSequence) -> Result<MultiGraph, GraphError> {
    let m1 = seq.m1() as usize;
    if matching.len() != m1 {
        return Err(GraphError::SizeMismatch {
            expected: m1,
            got: matching.len(),
        });
    }
    let owners = seq.half_edge_owners();
    let pairs = matching
        .pairs()
        .map(|(a, b)| (owners[a], owners[b]))
        .collect::<Vec<_>>();
    Ok(MultiGraph::from_pairs(seq.len(), pairs))
}

/// A simple undirected graph: sorted edge list plus symmetric row storage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    cols: Vec<u32>,
}

impl SimpleGraph {
    /// Validates and sorts; each edge may be given in either orientation.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::RepeatedEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unchecked(n, list))
    }

    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut entries = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in &edges {
            entries.push((u, v));
            entries.push((v, u));
        }
        let rows = Rows::build(n, &mut entries);
        Self {
            n,
            edges,
            offsets: rows.offsets,
            cols: rows.cols,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unchecked(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.cols[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> u64 {
        (self.offsets[i + 1] - self.offsets[i]) as u64
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    pub fn max_degree(&self) -> u64 {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for &(u, v) in &self.edges {
            a[u as usize * self.n + v as usize] = 1.0;
            a[v as usize * self.n + u as usize] = 1.0;
        }
        a
    }

    pub fn to_multigraph(&self) -> MultiGraph {
        MultiGraph::from_pairs(self.n, self.edges.iter().copied())
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.neighbors(i).iter().map(|&j| x[j as usize]).sum();
        }
    }

    /// Edge-list text: a `# n <count>` header, then `u v` per line with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 12);
        let _ = writeln!(out, "# n {}", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses [`to_edge_list`](Self::to_edge_list) output. Without a header the
    /// vertex count is one more than the largest label.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                if parts.next() == Some("n") {
                    let value = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| GraphError::Parse(format!("line {}: bad header", lineno + 1)))?;
                    n = Some(value);
                }
                continue;
            }
            let mut parts = line.split_whitespace().map(str::parse::<u32>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(GraphError::Parse(format!("line {}: {line:?}", lineno + 1))),
            }
        }
        let n = n.unwrap_or_else(|| {
            edges
                .iter()
                .map(|&(u, v)| u.max(v) as usize + 1)
                .max()
                .unwrap_or(0)
        });
        Self::from_edges(n, edges)
    }
}
