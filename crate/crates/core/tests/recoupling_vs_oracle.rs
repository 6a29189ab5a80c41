use honeycomb_core::recoupling::Recoupling;
use honeycomb_core::tl_oracle::{oracle_value, OracleConfig, PlanarNet};
use honeycomb_core::QParam;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

fn oracle(net: &PlanarNet, colors: &[u32]) -> BigRational {
    oracle_value(net, colors, QParam::Classical, OracleConfig::default()).unwrap()
}

#[test]
fn tet_matches_oracle_up_to_three() {
    let e = Recoupling::<BigRational>::new(QParam::Classical);
    let net = PlanarNet::tetrahedron();
    let mut nonzero = 0;
    for code in 0..4u32.pow(6) {
        let c: Vec<u32> = (0..6).map(|k| (code / 4u32.pow(k)) % 4).collect();
        let closed = e.tet(c[0], c[1], c[2], c[3], c[4], c[5]);
        if closed.is_zero() {
            continue;
        }
        nonzero += 1;
        assert_eq!(oracle(&net, &c), closed, "tet{c:?}");
    }
    assert!(nonzero > 50);
}

#[test]
fn quantum_oracle_agrees_at_small_level() {
    let p = QParam::RootOfUnity(7);
    let e = Recoupling::<Complex64>::new(p);
    let net = PlanarNet::tetrahedron();
    for c in [
        [1, 1, 2, 1, 1, 2],
        [2, 2, 2, 2, 2, 2],
        [3, 3, 2, 1, 2, 3],
        [2, 4, 2, 2, 4, 2],
    ] {
        let o: Complex64 = oracle_value(&net, &c, p, OracleConfig::default()).unwrap();
        let v = e.tet(c[0], c[1], c[2], c[3], c[4], c[5]);
        assert!((o - v).norm() < 1e-9, "{c:?}: {o} vs {v}");
    }
}
