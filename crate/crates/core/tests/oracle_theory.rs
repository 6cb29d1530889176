//! Closed forms against exact enumeration. The reference numbers were
//! computed independently by brute force over all matchings.

use approx::assert_relative_eq;
use cmspectra::degree::DegreeSequence;
use cmspectra::oracle::{
    check_identities, double_factorial_odd, enumerate_simple_graphs, exact_cm_law, exact_mean_adjacency,
    exact_pairing_marginals, Functional, OracleError,
};
use cmspectra::theory::{
    alon_boppana_bound, all_predictions, expected_h_quadratic_k1, expected_h_quadratic_k2, expected_wedge_sum,
    kesten_mckay_mass, lambda1_canonical, lambda1_microcanonical, normalized_h2_leading, predictions_json,
    semicircle_mass, PredictionKind,
};
use num_rational::Ratio;

fn seq(d: &[i64]) -> DegreeSequence {
    DegreeSequence::new(d).unwrap()
}

const ALL: [Functional; 5] = [
    Functional::Lambda1,
    Functional::QuadraticRank1,
    Functional::QuadraticFull,
    Functional::QuadraticFullSquared,
    Functional::WedgeSum,
];

#[test]
fn triangle_sequence() {
    let s = seq(&[2, 2, 2]);
    let law = exact_cm_law(&s, &ALL).unwrap();
    assert_eq!((law.total_matchings, law.simple_count), (15, 8));
    assert_eq!(law.p_simple_ratio(), Ratio::new(8, 15));
    let get = |f| law.get(f).unwrap();
    assert_relative_eq!(get(Functional::QuadraticRank1).unconditioned, -0.96, epsilon = 1e-12);
    assert_relative_eq!(get(Functional::QuadraticFull).unconditioned, 0.0, epsilon = 1e-12);
    assert_relative_eq!(get(Functional::WedgeSum).unconditioned, 12.8, epsilon = 1e-12);
    assert_relative_eq!(get(Functional::WedgeSum).conditioned.unwrap(), 24.0, epsilon = 1e-12);
    assert_relative_eq!(get(Functional::Lambda1).conditioned.unwrap(), 2.0, epsilon = 1e-12);

    assert_relative_eq!(expected_h_quadratic_k1(&s).value, -0.96, epsilon = 1e-12);
    assert_relative_eq!(expected_wedge_sum(&s).unwrap().value, 9.6, epsilon = 1e-12);
    assert_relative_eq!(expected_h_quadratic_k2(&s).unwrap().value, -7.104, epsilon = 1e-12);

    let mean = exact_mean_adjacency(&s).unwrap();
    assert_eq!(mean[0][1], Ratio::new(4, 5));
    assert_eq!(mean[0][0], Ratio::new(2, 5));
}

#[test]
fn path_sequence() {
    let s = seq(&[1, 2, 1]);
    let law = exact_cm_law(&s, &ALL).unwrap();
    assert_eq!(law.total_matchings, 3);
    let rank1 = law.get(Functional::QuadraticRank1).unwrap();
    assert_relative_eq!(rank1.unconditioned, -10.0 / 9.0, epsilon = 1e-12);
    assert_relative_eq!(rank1.conditioned.unwrap(), -4.0 / 3.0, epsilon = 1e-12);
    assert_relative_eq!(law.get(Functional::WedgeSum).unwrap().unconditioned, 4.0 / 3.0, epsilon = 1e-12);
    assert_relative_eq!(expected_h_quadratic_k1(&s).value, -10.0 / 9.0, epsilon = 1e-12);
    assert_relative_eq!(expected_wedge_sum(&s).unwrap().value, 2.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn sequences_with_few_or_no_simple_graphs() {
    let square = exact_cm_law(&seq(&[2, 2, 2, 2]), &ALL).unwrap();
    assert_eq!((square.total_matchings, square.simple_count), (105, 48));
    assert_eq!(square.p_simple, "16/35");
    assert_eq!(enumerate_simple_graphs(&seq(&[2, 2, 2, 2])).unwrap().len(), 3);

    let skew = exact_cm_law(&seq(&[1, 2, 3]), &ALL).unwrap();
    assert_eq!(skew.simple_count, 0);
    assert!(skew.no_simple_realization);
    assert_relative_eq!(
        skew.get(Functional::Lambda1).unwrap().unconditioned,
        2.3697476251113403,
        epsilon = 1e-12
    );
    assert_relative_eq!(skew.get(Functional::WedgeSum).unwrap().unconditioned, 17.6, epsilon = 1e-12);
    assert!(skew.get(Functional::Lambda1).unwrap().conditioned.is_none());

    let heavy = exact_cm_law(&seq(&[3, 3, 1, 1]), &[Functional::Lambda1]).unwrap();
    assert_eq!((heavy.total_matchings, heavy.simple_count), (105, 0));
}

#[test]
fn identities_hold_on_every_small_sequence() {
    for d in cmspectra::validate::IDENTITY_FIXTURES {
        let s = seq(d);
        assert!(s.m1() <= 12);
        let check = check_identities(&s).unwrap();
        assert!(check.worst() <= 1e-12, "{d:?}: {check:?}");
        let marginals = exact_pairing_marginals(&s).unwrap();
        let p = Ratio::new(1, s.m1() as i128 - 1);
        for (a, row) in marginals.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if a != b {
                    assert_eq!(v, p);
                }
            }
        }
    }
}

#[test]
fn enumeration_limits() {
    assert_eq!(double_factorial_odd(16), 2_027_025);
    assert!(matches!(
        exact_cm_law(&seq(&[3; 6]), &[Functional::Lambda1]),
        Err(OracleError::TooLarge(_))
    ));
    assert!(matches!(exact_cm_law(&seq(&[1, 1]), &[]), Err(OracleError::NoFunctionals)));
}

#[test]
fn regular_predictions() {
    let s = DegreeSequence::from_degrees(vec![3; 1000]).unwrap();
    assert_relative_eq!(lambda1_microcanonical(&s).value, 3.0, epsilon = 1e-12);
    assert_relative_eq!(lambda1_canonical(&s).value, 4.0, epsilon = 1e-12);
    assert_relative_eq!(normalized_h2_leading(&s).value, 0.0, epsilon = 1e-12);
    assert_relative_eq!(alon_boppana_bound(3).unwrap(), 2.0 * 2f64.sqrt(), epsilon = 1e-15);
    assert!(alon_boppana_bound(1).is_err());
}

#[test]
fn two_block_predictions() {
    // Half the vertices of degree 10, half of degree 40.
    let mut d = vec![10u64; 500];
    d.extend(vec![40u64; 500]);
    let s = DegreeSequence::from_degrees(d).unwrap();
    let (m1, m2, m3) = (25.0, 850.0, 32500.0);
    let mic = m2 / m1 + m1 * m3 / (m2 * m2) - 1.0;
    assert_relative_eq!(lambda1_microcanonical(&s).value, mic, epsilon = 1e-10);
    assert_relative_eq!(lambda1_canonical(&s).value - lambda1_microcanonical(&s).value, 1.0, epsilon = 1e-12);
}

#[test]
fn densities_have_unit_mass() {
    for d in [3, 5, 18] {
        assert_relative_eq!(kesten_mckay_mass(d, -100.0, 100.0, 1.0).unwrap(), 1.0, epsilon = 1e-9);
        let r = alon_boppana_bound(d).unwrap();
        // Symmetric about zero.
        assert_relative_eq!(
            kesten_mckay_mass(d, -r, 0.0, 1.0).unwrap(),
            kesten_mckay_mass(d, 0.0, r, 1.0).unwrap(),
            epsilon = 1e-12
        );
    }
    assert_relative_eq!(semicircle_mass(-2.0, 2.0), 1.0, epsilon = 1e-12);
    assert_relative_eq!(semicircle_mass(0.0, 5.0), 0.5, epsilon = 1e-12);
}

#[test]
fn predictions_json_shape() {
    let s = seq(&[2, 2, 2]);
    let preds = all_predictions(&s);
    assert!(preds.iter().any(|p| p.kind == PredictionKind::Exact));
    let v: serde_json::Value = serde_json::from_str(&predictions_json(&preds)).unwrap();
    for rec in v.as_array().unwrap() {
        for key in ["name", "value", "kind", "citation"] {
            assert!(rec.get(key).is_some());
        }
    }
}
