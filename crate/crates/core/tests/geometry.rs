mod common;

use common::{dirichlet, matrix, neumann};
use turing_unilateral::geometry::{
    classify_kinetics, classify_point, envelope_d1max, hyperbola_d1, hyperbola_intersection,
    spectrum_s, tail_bound, KineticsKind,
};
use turing_unilateral::sweep::find_c1_c2_intersection;
use turing_unilateral::{DiffusionPoint, ReactionMatrix, RegionLabel};

#[test]
fn hyperbola_values() {
    let b = matrix();
    let basis = dirichlet(128, 16);
    // d1^j = (b11 + b12 b21 / (d2 j² - b22)) / j²
    assert!((hyperbola_d1(1, 2.0, &b, &basis).unwrap() - 0.2).abs() < 1e-15);
    assert!((hyperbola_d1(2, 2.0, &b, &basis).unwrap() - 7.0 / 44.0).abs() < 1e-15);
    assert!((hyperbola_d1(3, 2.0, &b, &basis).unwrap() - 17.0 / 189.0).abs() < 1e-15);
}

#[test]
fn envelope_switches_modes_at_the_crossing() {
    let b = matrix();
    let basis = dirichlet(512, 64);
    let d2i = find_c1_c2_intersection(&b, &basis).unwrap().unwrap();
    assert!((d2i - 1.6930004681646913).abs() < 1e-12);
    assert_eq!(hyperbola_intersection(1, 2, &b, &basis).unwrap(), Some(d2i));
    assert_eq!(envelope_d1max(d2i * 1.01, &b, &basis).unwrap().argmax, vec![1]);
    assert_eq!(envelope_d1max(d2i * 0.99, &b, &basis).unwrap().argmax, vec![2]);
    assert_eq!(envelope_d1max(d2i, &b, &basis).unwrap().argmax, vec![1, 2]);
}

#[test]
fn classifies_points() {
    let b = matrix();
    let basis = dirichlet(512, 64);
    let at = |d1, d2| classify_point(DiffusionPoint::new(d1, d2).unwrap(), &b, &basis).unwrap();
    assert_eq!(at(0.1, 2.0), RegionLabel::Instability);
    assert_eq!(at(0.5, 2.0), RegionLabel::Stability);
    assert_eq!(at(0.2, 2.0), RegionLabel::Envelope { on_curves: vec![1] });
}

#[test]
fn neumann_spectrum_has_a_constant_mode() {
    let b = matrix();
    let s = spectrum_s(2.0, &b, &neumann(128, 6)).unwrap();
    assert_eq!(s[0].index, 0);
    assert_eq!(s[0].d1_eigenvalue, None);
    assert!((s[0].lambda_operator + 1.0 / 3.0).abs() < 1e-15);
    // λ^j = c_j / (κ_j + 1), d1^j = c_j / κ_j
    assert!((s[1].lambda_operator - 0.1).abs() < 1e-15);
    assert!((s[1].d1_eigenvalue.unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn tail_bound_dominates_discarded_modes() {
    let b = matrix();
    let small = dirichlet(512, 8);
    let large = dirichlet(512, 64);
    let bound = tail_bound(&b, &small);
    for d2 in [0.5, 1.0, 5.0, 10.0] {
        for j in 9..=64 {
            assert!(hyperbola_d1(j, d2, &b, &large).unwrap() <= bound);
        }
    }
}

#[test]
fn rejects_matrices_without_turing_instability() {
    assert!(ReactionMatrix::new(-1.0, -2.0, 2.0, -3.0).is_err());
    assert!(ReactionMatrix::new(1.0, 2.0, 2.0, -3.0).is_err());
    assert!(ReactionMatrix::new(3.0, -2.0, 2.0, -1.0).is_err());
    assert!(DiffusionPoint::new(0.0, 1.0).is_err());
    assert_eq!(classify_kinetics(&matrix()), KineticsKind::ActivatorInhibitor);
    let depletion = ReactionMatrix::new(1.0, 2.0, -2.0, -3.0).unwrap();
    assert_eq!(classify_kinetics(&depletion), KineticsKind::SubstrateDepletion);
}
