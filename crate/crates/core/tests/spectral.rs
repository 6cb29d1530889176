use cmspectra::degree::DegreeSequence;
use cmspectra::ensemble::{sample_cm_multigraph, SamplerParams, SamplerRegistry};
use cmspectra::graph::SimpleGraph;
use cmspectra::rng::{RngStream, StreamRole};
use cmspectra::spectral::{
    centered_multigraph_operator, centered_operator, dense_spectrum, esd_histogram, extreme_eigenvalues,
    operator_norm, symmetry_defect, Centering, DenseMatrix, EsdOptions, SolverOptions, SolverRegistry,
    SymmetricOperator,
};
use proptest::prelude::*;

fn random_graph(n: usize, p: f64, seed: u64) -> SimpleGraph {
    let mut rng = RngStream::new(seed, 9);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.unit() < p {
                edges.push((i, j));
            }
        }
    }
    SimpleGraph::from_edges(n, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn spectrum_traces_match_the_graph(n in 2usize..40, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let eigs = dense_spectrum(&g).unwrap();
        let sum: f64 = eigs.iter().sum();
        let sq: f64 = eigs.iter().map(|x| x * x).sum();
        // tr A = 0 and tr A² = 2|E|.
        prop_assert!(sum.abs() < 1e-9 * n as f64);
        prop_assert!((sq - 2.0 * g.edge_count() as f64).abs() < 1e-8 * (1.0 + sq));
        prop_assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(eigs.last().copied().unwrap_or(0.0) <= g.max_degree() as f64 + 1e-9);
    }

    // Sequences like (3,1) have a single multigraph, so H is zero up to rounding.
    #[test]
    fn centered_operators_are_symmetric(d in prop::collection::vec(1u64..=5, 2..=30), seed in any::<u64>()) {
        let mut d = d;
        if d.iter().sum::<u64>() % 2 == 1 {
            d[0] += 1;
        }
        let seq = DegreeSequence::from_degrees(d).unwrap();
        let mut rng = RngStream::for_role(seed, StreamRole::Matching, 0);
        let g = sample_cm_multigraph(&seq, &mut rng);
        for mode in [Centering::Full, Centering::Rank1] {
            let h = centered_multigraph_operator(&g, &seq, mode).unwrap();
            prop_assert!(symmetry_defect(&h, 4, &mut rng) < 1e-10);
            let dense = DenseMatrix::from_operator(&h);
            let n = seq.len();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((dense.get(i, j) - dense.get(j, i)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lanczos_matches_dense(n in 5usize..60, p in 0.05f64..0.6, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        let eigs = dense_spectrum(&g).unwrap();
        let s = extreme_eigenvalues(&g, 1e-10, 10_000).unwrap();
        prop_assert!((s.lambda1 - eigs[n - 1]).abs() < 1e-7);
        prop_assert!((s.lambda_n - eigs[0]).abs() < 1e-7);
        prop_assert!((s.lambda2.unwrap() - eigs[n - 2]).abs() < 1e-7);
    }
}

#[test]
fn centered_norm_agrees_with_dense() {
    let seq = DegreeSequence::new(&[3; 60]).unwrap();
    let sampler = SamplerRegistry::with_builtin()
        .build("cm-auto", &SamplerParams::default())
        .unwrap();
    let mut rng = RngStream::for_role(4, StreamRole::Microcanonical, 0);
    let g = sampler.sample(&seq, &mut rng).unwrap().graph;
    let h = centered_operator(&g, &seq, Centering::Full).unwrap();
    let eigs = dense_spectrum(&h).unwrap();
    let want = eigs[0].abs().max(eigs[eigs.len() - 1].abs());
    let got = operator_norm(&h, 1e-11).unwrap();
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    for name in ["lanczos", "power"] {
        let solver = SolverRegistry::with_builtin().build(name).unwrap();
        let opts = SolverOptions {
            tol: 1e-10,
            max_iter: Some(200_000),
            seed: 3,
        };
        let norm = solver.operator_norm(&h, &opts).unwrap();
        assert!((norm - want).abs() < 1e-6, "{name}: {norm} vs {want}");
    }
}

#[test]
fn esd_of_a_cycle_is_arcsine_like() {
    let n = 400;
    let g = SimpleGraph::from_edges(n, (0..n as u32).map(|i| (i, (i + 1) % n as u32))).unwrap();
    let h = esd_histogram(
        &g,
        &EsdOptions {
            bins: 20,
            rescale_by: None,
            range: Some((-2.0, 2.0)),
        },
    )
    .unwrap();
    assert_eq!(h.total, n as u64);
    assert!((h.area() - 1.0).abs() < 1e-12);
    // Mass piles up at the edges of [-2, 2].
    assert!(h.density(0) > h.density(10) && h.density(19) > h.density(10));
    let csv = h.to_csv();
    assert!(csv.starts_with("bin_left,bin_right,density\n"));
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn operator_dimensions() {
    let g = random_graph(10, 0.3, 1);
    assert_eq!(g.dim(), 10);
    let seq = DegreeSequence::new(&[1, 1]).unwrap();
    assert!(centered_operator(&g, &seq, Centering::Full).is_err());
}
