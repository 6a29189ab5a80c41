//! Identity checks shared by the integration tests and the acceptance run.
//! Each returns how many cases it checked, or a description of the first
//! failure.
#![allow(dead_code)]

use honeycomb_core::evaluator::bubble_move_with;
use honeycomb_core::recoupling::Recoupling;
use honeycomb_core::tl_oracle::{oracle_value, OracleConfig, PlanarNet};
use honeycomb_core::{is_admissible, QParam, Scalar};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

pub type Check = Result<usize, String>;

fn oracle<S: Scalar>(net: &PlanarNet, colors: &[u32], p: QParam) -> Result<S, String> {
    oracle_value(net, colors, p, OracleConfig::default()).map_err(|e| e.to_string())
}

fn tuples(len: usize, max: u32) -> impl Iterator<Item = Vec<u32>> {
    let base = max + 1;
    (0..base.pow(len as u32)).map(move |code| {
        (0..len as u32)
            .map(|k| (code / base.pow(k)) % base)
            .collect()
    })
}

/// Loop, θ and Tet against the strand expansion, every admissible tuple.
pub fn closed_forms_vs_oracle(max: u32) -> Check {
    let p = QParam::Classical;
    let eng = Recoupling::<BigRational>::new(p);
    let mut checked = 0;
    for a in 0..=max {
        let o: BigRational = oracle(&PlanarNet::single_loop(), &[a], p)?;
        if o != eng.delta(a) {
            return Err(format!(
                "loop {a}: oracle {o}, closed form {}",
                eng.delta(a)
            ));
        }
        checked += 1;
    }
    let theta = PlanarNet::theta();
    for c in tuples(3, max) {
        if !is_admissible(c[0], c[1], c[2], p) {
            continue;
        }
        let o: BigRational = oracle(&theta, &c, p)?;
        if o != eng.theta(c[0], c[1], c[2]) {
            return Err(format!("theta{c:?}: oracle {o}"));
        }
        checked += 1;
    }
    let tet = PlanarNet::tetrahedron();
    for c in tuples(6, max) {
        let closed = eng.tet(c[0], c[1], c[2], c[3], c[4], c[5]);
        if closed.is_zero() && !tet_admissible(&c, p) {
            continue;
        }
        let o: BigRational = oracle(&tet, &c, p)?;
        if o != closed {
            return Err(format!("tet{c:?}: oracle {o}, closed form {closed}"));
        }
        checked += 1;
    }
    Ok(checked)
}

fn tet_admissible(c: &[u32], p: QParam) -> bool {
    let [a, b, e, cc, d, f] = [c[0], c[1], c[2], c[3], c[4], c[5]];
    is_admissible(a, d, f, p)
        && is_admissible(b, cc, f, p)
        && is_admissible(a, b, e, p)
        && is_admissible(cc, d, e, p)
}

/// Triangular prism: triangle u (edges 0..3), triangle v (3..6), rungs 6..9.
/// Edge order: u12, u23, u31, v12, v23, v31, x1, x2, x3.
pub fn prism() -> PlanarNet {
    let pts = [
        (0.0, 2.0),
        (-1.7, -1.0),
        (1.7, -1.0),
        (0.0, 0.6),
        (-0.5, -0.3),
        (0.5, -0.3),
    ];
    let edges = [
        [0, 1],
        [1, 2],
        [2, 0],
        [3, 4],
        [4, 5],
        [5, 3],
        [0, 3],
        [1, 4],
        [2, 5],
    ];
    PlanarNet::from_straight_lines(&pts, &edges)
}

/// Collapsing a triangle to a vertex: the prism equals the bubble-move
/// coefficient of one triangle times the tetrahedron left behind.
/// Also checks the closed triangle itself, `Tet = bubble · θ(b,c,f)`.
pub fn bubble_move_holds(max: u32) -> Check {
    let p = QParam::Classical;
    let eng = Recoupling::<BigRational>::new(p);
    let tet = PlanarNet::tetrahedron();
    let mut checked = 0;
    for c in tuples(6, max) {
        let [a, b, e, cc, d, f] = [c[0], c[1], c[2], c[3], c[4], c[5]];
        if !tet_admissible(&c, p) {
            continue;
        }
        let o: BigRational = oracle(&tet, &c, p)?;
        let via = bubble_move_with(&eng, a, b, cc, d, e, f) * eng.theta(b, cc, f);
        if o != via {
            return Err(format!("closed bubble {c:?}: oracle {o}, move gives {via}"));
        }
        checked += 1;
    }
    let net = prism();
    for c in tuples(6, max) {
        let [t12, t23, t31, x1, x2, x3] = [c[0], c[1], c[2], c[3], c[4], c[5]];
        if !(is_admissible(t31, t12, x1, p)
            && is_admissible(t12, t23, x2, p)
            && is_admissible(t23, t31, x3, p))
        {
            continue;
        }
        for s in tuples(3, max) {
            let [s12, s23, s31] = [s[0], s[1], s[2]];
            if !(is_admissible(s31, s12, x1, p)
                && is_admissible(s12, s23, x2, p)
                && is_admissible(s23, s31, x3, p))
            {
                continue;
            }
            let colors = [t12, t23, t31, s12, s23, s31, x1, x2, x3];
            let o: BigRational = oracle(&net, &colors, p)?;
            // outer triangle collapsed: Tet(t31,x1,t12,x2,t23,x3)/θ(x1,x2,x3), then the inner tetrahedron
            let want = if is_admissible(x1, x2, x3, p) {
                eng.tet(t31, x1, t12, x2, t23, x3) / eng.theta(x1, x2, x3)
                    * eng.tet(s31, x1, s12, x2, s23, x3)
            } else {
                BigRational::zero()
            };
            if o != want {
                return Err(format!(
                    "prism {colors:?}: oracle {o}, collapse gives {want}"
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Two vertices (a,b,c) and (d,b,c) joined by b and c, with a and d running
/// into a second bubble (a,e,g), (d,e,g). Edge order: a, d, b, c, e, g, with
/// b, c, e, g bent through binary vertices so that parallel edges are drawn
/// apart.
pub fn double_bubble() -> (PlanarNet, [[usize; 2]; 4]) {
    // vertices: 0 P, 1 Q, 2 R, 3 S (square), 4..8 bend points
    let pts = [
        (0.0, 0.0),
        (2.0, 0.0),
        (0.0, -2.0),
        (2.0, -2.0),
        (1.0, 0.6),
        (1.0, -0.6),
        (1.0, -1.4),
        (1.0, -2.6),
    ];
    // a: P-R, d: Q-S, b: P-4-Q, c: P-5-Q, e: R-6-S, g: R-7-S
    let edges = [
        [0, 2],
        [1, 3],
        [0, 4],
        [4, 1],
        [0, 5],
        [5, 1],
        [2, 6],
        [6, 3],
        [2, 7],
        [7, 3],
    ];
    // color slots: a, d, b, b, c, c, e, e, g, g
    (
        PlanarNet::from_straight_lines(&pts, &edges),
        [[2, 3], [4, 5], [6, 7], [8, 9]],
    )
}

/// Schur: the double bubble is `δ_{ad} θ(a,b,c) θ(a,e,g) / Δ_a`.
pub fn schur_holds(max: u32) -> Check {
    let p = QParam::Classical;
    let eng = Recoupling::<BigRational>::new(p);
    let (net, _) = double_bubble();
    let mut checked = 0;
    for c in tuples(6, max) {
        let [a, d, b, cc, e, g] = [c[0], c[1], c[2], c[3], c[4], c[5]];
        if !(is_admissible(a, b, cc, p)
            && is_admissible(d, b, cc, p)
            && is_admissible(a, e, g, p)
            && is_admissible(d, e, g, p))
        {
            continue;
        }
        let colors = [a, d, b, b, cc, cc, e, e, g, g];
        let o: BigRational = oracle(&net, &colors, p)?;
        let want = if a == d {
            eng.theta(a, b, cc) * eng.theta(a, e, g) / eng.delta(a)
        } else {
            BigRational::zero()
        };
        if o != want {
            return Err(format!("double bubble {c:?}: oracle {o}, expected {want}"));
        }
        checked += 1;
    }
    Ok(checked)
}

fn pick<R: Rng>(rng: &mut R, x: u32, y: u32, max: u32, p: QParam) -> Option<u32> {
    let opts: Vec<u32> = (0..=max).filter(|&z| is_admissible(x, y, z, p)).collect();
    if opts.is_empty() {
        None
    } else {
        Some(opts[rng.gen_range(0..opts.len())])
    }
}

fn close<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if tol == 0.0 {
        a == b
    } else {
        (a.clone() - b.clone()).norm_sqr_f64().sqrt() <= tol
    }
}

/// Moving the s-channel to the t-channel and back is the identity:
/// `Σ_f {a b e; c d f}{b c f; d a g} = δ_{eg}`.
pub fn orthogonality<S: Scalar, R: Rng>(
    p: QParam,
    cases: usize,
    max: u32,
    tol: f64,
    rng: &mut R,
) -> Check {
    let eng = Recoupling::<S>::new(p);
    let mut checked = 0;
    while checked < cases {
        let [a, b, c, d] = [0; 4].map(|_| rng.gen_range(0..=max));
        let (Some(e), Some(g)) = (pick(rng, a, b, max, p), pick(rng, a, b, max, p)) else {
            continue;
        };
        if !is_admissible(c, d, e, p) || !is_admissible(c, d, g, p) {
            continue;
        }
        let mut sum = S::zero();
        for f in 0..=(2 * max) {
            if is_admissible(a, d, f, p) && is_admissible(b, c, f, p) {
                sum = sum + eng.sixj(a, b, e, c, d, f) * eng.sixj(b, c, f, d, a, g);
            }
        }
        let want = if e == g { S::one() } else { S::zero() };
        if !close(&sum, &want, tol) {
            return Err(format!(
                "orthogonality a={a} b={b} c={c} d={d} e={e} g={g}: {sum:?}"
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Two moves around the pentagon of five-leg trees agree with three.
pub fn pentagon<S: Scalar, R: Rng>(
    p: QParam,
    cases: usize,
    max: u32,
    tol: f64,
    rng: &mut R,
) -> Check {
    let eng = Recoupling::<S>::new(p);
    let mut checked = 0;
    while checked < cases {
        let [l1, l2, l3, l4, l5] = [0; 5].map(|_| rng.gen_range(0..=max));
        let Some(pp) = pick(rng, l1, l2, max, p) else {
            continue;
        };
        let Some(q) = pick(rng, pp, l3, max, p) else {
            continue;
        };
        if !is_admissible(q, l4, l5, p) {
            continue;
        }
        let Some(r) = pick(rng, l2, l3, max, p) else {
            continue;
        };
        let Some(s) = pick(rng, r, l4, max, p) else {
            continue;
        };
        if !is_admissible(s, l5, l1, p) {
            continue;
        }
        let two = eng.sixj(l1, l2, pp, l3, q, r) * eng.sixj(l4, l5, q, l1, r, s);
        let mut three = S::zero();
        for t in 0..=(2 * max) {
            if is_admissible(l3, l4, t, p) && is_admissible(t, l5, pp, p) {
                three = three
                    + eng.sixj(pp, l3, q, l4, l5, t)
                        * eng.sixj(l1, l2, pp, t, l5, s)
                        * eng.sixj(l3, l4, t, s, l2, r);
            }
        }
        if !close(&two, &three, tol) {
            return Err(format!(
                "pentagon legs {:?} p={pp} q={q} r={r} s={s}: {two:?} vs {three:?}",
                [l1, l2, l3, l4, l5]
            ));
        }
        checked += 1;
    }
    Ok(checked)
}
