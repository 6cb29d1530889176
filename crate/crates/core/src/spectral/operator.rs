use serde::{Deserialize, Serialize};

use crate::degree::DegreeSequence;
use crate::ensemble::ExpectedAdjacency;
use crate::graph::{MultiGraph, SimpleGraph};
use crate::rng::RngStream;

use super::{dot, SpectralError, SymmetricOperator};

impl SymmetricOperator for SimpleGraph {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        SimpleGraph::apply(self, x, y)
    }

    fn norm_bound(&self) -> f64 {
        self.max_degree() as f64
    }
}

impl SymmetricOperator for MultiGraph {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        MultiGraph::apply(self, x, y)
    }

    fn norm_bound(&self) -> f64 {
        self.degrees().into_iter().max().unwrap_or(0) as f64
    }
}

impl SymmetricOperator for ExpectedAdjacency {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        ExpectedAdjacency::apply(self, x, y)
    }

    fn norm_bound(&self) -> f64 {
        let r1 = dot(&self.rank1_vector, &self.rank1_vector);
        r1 + self.diagonal_correction.iter().cloned().fold(0.0, f64::max)
    }
}

/// Row-major dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, SpectralError> {
        if data.len() != n * n {
            return Err(SpectralError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Assembles any operator column by column.
    pub fn from_operator(op: &dyn SymmetricOperator) -> Self {
        let n = op.dim();
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            op.apply(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

impl SymmetricOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(&self.data[i * self.n..(i + 1) * self.n], x);
        }
    }

    fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// What gets subtracted from the adjacency matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    /// `A − E[A]` under the matching law: `A − ẽẽᵀ + diag(d_i / (m_1 − 1))`.
    Full,
    /// `A − ẽẽᵀ`.
    Rank1,
}

/// `x ↦ A x − u ⟨u, x⟩ + diag ∘ x` over a borrowed adjacency operator.
#[derive(Debug, Clone)]
pub struct CenteredOperator<'a, G: ?Sized> {
    adjacency: &'a G,
    u: Vec<f64>,
    diag: Vec<f64>,
}

impl<'a, G: SymmetricOperator + ?Sized> CenteredOperator<'a, G> {
    pub fn new(adjacency: &'a G, u: Vec<f64>, diag: Vec<f64>) -> Result<Self, SpectralError> {
        let n = adjacency.dim();
        for len in [u.len(), diag.len()] {
            if len != n {
                return Err(SpectralError::DimensionMismatch { expected: n, got: len });
            }
        }
        Ok(Self { adjacency, u, diag })
    }

    pub fn rank1_vector(&self) -> &[f64] {
        &self.u
    }
}

impl<G: SymmetricOperator + ?Sized> SymmetricOperator for CenteredOperator<'_, G> {
    fn dim(&self) -> usize {
        self.u.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.adjacency.apply(x, y);
        let c = dot(&self.u, x);
        for i in 0..y.len() {
            y[i] += self.diag[i] * x[i] - c * self.u[i];
        }
    }

    fn norm_bound(&self) -> f64 {
        self.adjacency.norm_bound() + dot(&self.u, &self.u) + self.diag.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

fn matching_law_parts(seq: &DegreeSequence, mode: Centering) -> (Vec<f64>, Vec<f64>) {
    let expected = crate::ensemble::expected_adjacency_cm(seq);
    let diag = match mode {
        Centering::Full => expected.diagonal_correction,
        Centering::Rank1 => vec![0.0; seq.len()],
    };
    (expected.rank1_vector, diag)
}

fn check_degrees(got: &[u64], seq: &DegreeSequence) -> Result<(), SpectralError> {
    if got.len() != seq.len() {
        return Err(SpectralError::DimensionMismatch {
            expected: seq.len(),
            got: got.len(),
        });
    }
    match got.iter().zip(seq.degrees()).position(|(a, b)| a != b) {
        Some(vertex) => Err(SpectralError::DegreeMismatch {
            vertex,
            expected: seq.degree(vertex),
            got: got[vertex],
        }),
        None => Ok(()),
    }
}

/// The centered adjacency operator `H` of a realization of `seq`.
pub fn centered_operator<'a>(
    g: &'a SimpleGraph,
    seq: &DegreeSequence,
    mode: Centering,
) -> Result<CenteredOperator<'a, SimpleGraph>, SpectralError> {
    check_degrees(&g.degrees(), seq)?;
    let (u, diag) = matching_law_parts(seq, mode);
    CenteredOperator::new(g, u, diag)
}

/// Same as [`centered_operator`] for a matching-induced multigraph.
pub fn centered_multigraph_operator<'a>(
    g: &'a MultiGraph,
    seq: &DegreeSequence,
    mode: Centering,
) -> Result<CenteredOperator<'a, MultiGraph>, SpectralError> {
    check_degrees(&g.degrees(), seq)?;
    let (u, diag) = matching_law_parts(seq, mode);
    CenteredOperator::new(g, u, diag)
}

/// `A − E[A]` for a Chung-Lu sample: `E[a_ij] = d_i d_j / m_1` off the
/// diagonal and zero on it. Degrees of `g` are random, so they are not checked.
pub fn canonical_centered_operator<'a>(
    g: &'a SimpleGraph,
    seq: &DegreeSequence,
) -> Result<CenteredOperator<'a, SimpleGraph>, SpectralError> {
    let m1 = seq.m1() as f64;
    let scale = m1.sqrt();
    let u = seq.degrees().iter().map(|&d| d as f64 / scale).collect();
    let diag = seq.degrees().iter().map(|&d| (d as f64).powi(2) / m1).collect();
    CenteredOperator::new(g, u, diag)
}

/// `⟨v, M^k v⟩`, using `⌈k/2⌉` products.
pub fn quadratic_form(op: &dyn SymmetricOperator, v: &[f64], k: u32) -> Result<f64, SpectralError> {
    let n = op.dim();
    if v.len() != n {
        return Err(SpectralError::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let mut x = v.to_vec();
    let mut y = vec![0.0; n];
    for _ in 0..k / 2 {
        op.apply(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
    }
    if k % 2 == 0 {
        Ok(dot(&x, &x))
    } else {
        op.apply(&x, &mut y);
        Ok(dot(&x, &y))
    }
}

/// Largest `|⟨Mx, y⟩ − ⟨x, My⟩| / s` over random probe pairs, where
/// `s = ‖Mx‖‖y‖ + ‖x‖‖My‖` floored at `2‖x‖‖y‖` so that an operator which is
/// zero up to rounding does not read as asymmetric.
pub fn symmetry_defect(op: &dyn SymmetricOperator, probes: usize, rng: &mut RngStream) -> f64 {
    let n = op.dim();
    let mut worst: f64 = 0.0;
    let (mut mx, mut my) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..probes {
        let x: Vec<f64> = (0..n).map(|_| rng.unit() - 0.5).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.unit() - 0.5).collect();
        op.apply(&x, &mut mx);
        op.apply(&y, &mut my);
        let (a, b) = (dot(&mx, &y), dot(&x, &my));
        let unit = super::norm(&x) * super::norm(&y);
        let scale = (super::norm(&mx) * super::norm(&y) + super::norm(&x) * super::norm(&my)).max(2.0 * unit);
        if scale > 0.0 {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> SimpleGraph {
        SimpleGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn full_centering_of_triangle() {
        let g = triangle();
        let s = DegreeSequence::new(&[2, 2, 2]).unwrap();
        let h = DenseMatrix::from_operator(&centered_operator(&g, &s, Centering::Full).unwrap());
        // (1/5) J − (3/5) I
        for i in 0..3 {
            for j in 0..3 {
                let want = 0.2 - if i == j { 0.6 } else { 0.0 };
                assert!((h.get(i, j) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn matrix_free_equals_dense_assembly() {
        let g = SimpleGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 3)]).unwrap();
        let s = DegreeSequence::from_degrees(g.degrees()).unwrap();
        let e = crate::ensemble::expected_adjacency_cm(&s);
        let a = g.to_dense();
        let op = centered_operator(&g, &s, Centering::Full).unwrap();
        let h = DenseMatrix::from_operator(&op);
        for i in 0..5 {
            for j in 0..5 {
                assert!((h.get(i, j) - (a[i * 5 + j] - e.entry(i, j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let s = DegreeSequence::new(&[2, 2, 1, 1]).unwrap();
        let g = SimpleGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(matches!(
            centered_operator(&g, &s, Centering::Rank1),
            Err(SpectralError::DegreeMismatch { vertex: 0, .. })
        ));
    }

    #[test]
    fn quadratic_forms_on_small_fixtures() {
        let g = triangle();
        let s = DegreeSequence::new(&[2, 2, 2]).unwrap();
        let op = centered_operator(&g, &s, Centering::Rank1).unwrap();
        let e = op.rank1_vector().to_vec();
        assert_relative_eq!(quadratic_form(&op, &e, 1).unwrap(), -0.96, max_relative = 1e-12);

        let path = SimpleGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = DegreeSequence::new(&[1, 2, 1]).unwrap();
        let op = centered_operator(&path, &s, Centering::Rank1).unwrap();
        let e = op.rank1_vector().to_vec();
        assert_relative_eq!(quadratic_form(&op, &e, 1).unwrap(), -4.0 / 3.0, max_relative = 1e-12);
        assert_eq!(quadratic_form(&op, &[0.0; 3], 2).unwrap(), 0.0);
        assert!(quadratic_form(&op, &[0.0; 2], 1).is_err());

        // k = 2 against an explicit square
        let h = DenseMatrix::from_operator(&op);
        let mut hv = vec![0.0; 3];
        h.apply(&e, &mut hv);
        assert_relative_eq!(quadratic_form(&op, &e, 2).unwrap(), dot(&hv, &hv), max_relative = 1e-12);
        let mut h2v = vec![0.0; 3];
        h.apply(&hv, &mut h2v);
        assert_relative_eq!(quadratic_form(&op, &e, 3).unwrap(), dot(&hv, &h2v), max_relative = 1e-12);
    }

    #[test]
    fn operators_are_symmetric() {
        let mut rng = RngStream::new(5, 0);
        let s = DegreeSequence::from_degrees(vec![3; 20]).unwrap();
        let g = crate::ensemble::sample_cm_simple_mcmc(&s, &mut rng, 500).unwrap();
        assert!(symmetry_defect(&g, 5, &mut rng) < 1e-12);
        for mode in [Centering::Full, Centering::Rank1] {
            let op = centered_operator(&g, &s, mode).unwrap();
            assert!(symmetry_defect(&op, 5, &mut rng) < 1e-12);
        }
        let op = canonical_centered_operator(&g, &s).unwrap();
        assert!(symmetry_defect(&op, 5, &mut rng) < 1e-12);
        let e = crate::ensemble::expected_adjacency_cm(&s);
        assert!(symmetry_defect(&e, 5, &mut rng) < 1e-12);
    }
}
