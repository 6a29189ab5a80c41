mod common;

use honeycomb_core::QParam;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn loop_theta_and_tet_match_the_oracle() {
    let n = common::closed_forms_vs_oracle(3).unwrap();
    assert!(n > 200, "{n}");
}

#[test]
fn collapsing_a_triangle() {
    common::bubble_move_holds(2).unwrap();
}

#[test]
fn schur_bubble() {
    let n = common::schur_holds(3).unwrap();
    assert!(n > 100, "{n}");
}

#[test]
fn orthogonality_classical_and_quantum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    common::orthogonality::<BigRational, _>(QParam::Classical, 60, 6, 0.0, &mut rng).unwrap();
    common::orthogonality::<Complex64, _>(QParam::RootOfUnity(10), 60, 6, 1e-8, &mut rng).unwrap();
}

#[test]
fn pentagon_classical_and_quantum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    common::pentagon::<BigRational, _>(QParam::Classical, 60, 6, 0.0, &mut rng).unwrap();
    common::pentagon::<Complex64, _>(QParam::RootOfUnity(10), 60, 6, 1e-8, &mut rng).unwrap();
}
