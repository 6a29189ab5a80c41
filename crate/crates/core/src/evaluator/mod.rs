//! Exact evaluation of colored honeycombs by peeling off one crown at a time.
//!
//! Removing the crown of `H_n` takes a bubble move on the apex hexagon, then
//! on each side a recoupling and a triangle collapse per side hexagon, and a
//! final two-legged burst at the top that identifies the last index of both
//! sides. What is left is `H_{n-1}` carrying the summed colors. `H_2` is a
//! tetrahedron after the apex move and `H_1` a single loop.
//!
//! Two routes compute the same value. [`evaluate`] works numerically on
//! hex-pair colors, collapsing each triangle as `Tet / θ`. [`replay`] runs a
//! symbolic [`EvaluationTrace`] of labeled factors, where the same collapse
//! is `sixj · Δ⁻¹ · θ`. On the classical backend both are exact and agree
//! bit for bit; under a root of unity they agree to rounding.

mod crown;
mod trace;

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EdgeColoring, HoneycombNet, NetKind};
use crate::recoupling::{Engine, Recoupling, SpinColor};
use crate::scalar::{QParam, QScalar, Scalar};

pub use crown::Side;
pub use trace::{
    build_trace, iota, level_weight, part_weight, phi_coeff, psi_coeff, replay, replay_with,
    CoeffTerm, EvaluationTrace, Factor, LevelPlan, Move, MoveKind, Part,
};

use crown::{layout, Crown, Pair};

/// Colors `x` with `(a, b, x)` admissible.
pub(crate) fn admissible_range(
    a: SpinColor,
    b: SpinColor,
    p: QParam,
) -> impl Iterator<Item = SpinColor> {
    let hi = a + b;
    let hi = p.max_color().map_or(hi, |m| hi.min(m));
    (a.abs_diff(b)..=hi)
        .step_by(2)
        .filter(move |&x| crate::recoupling::is_admissible(a, b, x, p))
}

/// Collapse a bubble: `sixj(a,b,e,c,d,f) · Δ_f⁻¹ · θ(a,d,f)`, which equals
/// `Tet(a,b,e,c,d,f) / θ(b,c,f)`. Zero on non-admissible data.
pub fn bubble_move_with<S: Scalar>(
    eng: &Recoupling<S>,
    a: SpinColor,
    b: SpinColor,
    c: SpinColor,
    d: SpinColor,
    e: SpinColor,
    f: SpinColor,
) -> S {
    if !eng.admissible(a, d, f) || !eng.admissible(b, c, f) {
        return S::zero();
    }
    let delta = eng.delta(f);
    if delta.is_zero() {
        return S::zero();
    }
    eng.sixj(a, b, e, c, d, f) / delta * eng.theta(a, d, f)
}

pub fn bubble_move(
    a: SpinColor,
    b: SpinColor,
    c: SpinColor,
    d: SpinColor,
    e: SpinColor,
    f: SpinColor,
    p: QParam,
) -> QScalar {
    match Engine::shared(p) {
        Engine::Classical(eng) => bubble_move_with(&eng, a, b, c, d, e, f).into_qscalar(),
        Engine::Quantum(eng) => bubble_move_with(&eng, a, b, c, d, e, f).into_qscalar(),
    }
}

/// A triangle with legs `x1, x2, x3` at its corners and sides `t12, t23,
/// t31` shrunk to a vertex: `Tet / θ(x1, x2, x3)`.
fn collapse_triangle<S: Scalar>(
    eng: &Recoupling<S>,
    [x1, x2, x3]: [SpinColor; 3],
    [t12, t23, t31]: [SpinColor; 3],
) -> S {
    let th = eng.theta(x1, x2, x3);
    if th.is_zero() {
        return S::zero();
    }
    eng.tet(t31, x1, t12, x2, t23, x3) / th
}

/// Number of indices summed in reducing `H_n` all the way down:
/// `a_2 = 0`, `a_n = a_{n-1} + 2n - 5`.
pub fn summation_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParam("summation count needs n >= 2".into()));
    }
    Ok((3..=n).map(|k| 2 * k - 5).sum())
}

fn honeycomb_size(net: &HoneycombNet) -> Result<usize> {
    if !net.is_closed() {
        return Err(Error::OpenNetwork(net.open_ends.len()));
    }
    match net.kind {
        NetKind::H(n) => Ok(n),
        other => Err(Error::Malformed(format!(
            "expected a honeycomb H_n, got {other:?}"
        ))),
    }
}

fn check_colors(n: usize, colors: &[SpinColor]) -> Result<()> {
    let lay = layout(n);
    if colors.len() != lay.net.edges.len() {
        return Err(Error::Coloring(format!(
            "{} colors for {} edges of H_{n}",
            colors.len(),
            lay.net.edges.len()
        )));
    }
    Ok(())
}

/// Admissibility at every vertex, binary equality and the level bound.
pub(crate) fn passes_gate(n: usize, colors: &[SpinColor], p: QParam) -> bool {
    let lay = layout(n);
    lay.net
        .check_coloring(&EdgeColoring::new(colors.to_vec()), p)
        .is_ok()
}

/// One weighted term of a crown reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTerm<S> {
    pub weight: S,
    /// Coloring of `H_{n-1}`, by edge id.
    pub colors: Vec<SpinColor>,
    /// Summed indices: left side bottom to top, right side bottom to top,
    /// then the shared top index.
    pub indices: Vec<SpinColor>,
}

/// Partial products of one side: every choice of the side's indices with
/// its weight (recouplings and triangle collapses).
fn side_terms<S: Scalar>(
    eng: &Recoupling<S>,
    crown: Crown,
    side: Side,
    col: &impl Fn(Pair) -> SpinColor,
) -> Vec<(S, Vec<SpinColor>)> {
    let last = crown.n - 2;
    let mut out = Vec::new();
    let mut stack = vec![(0i32, col(crown.foot(side)), S::one(), Vec::new())];
    while let Some((k, prev, w, js)) = stack.pop() {
        if k == last {
            out.push((w, js));
            continue;
        }
        let h = col(crown.outer(side, k));
        let g = col(crown.gate(side, k));
        let u = col(crown.riser(side, k));
        let inner = col(crown.inner(side, k));
        let sp = col(crown.spoke(side, k));
        let h1 = col(crown.outer(side, k + 1));
        let g1 = col(crown.gate(side, k + 1));
        for j in admissible_range(prev, inner, eng.param()) {
            if !eng.admissible(h, u, j) {
                continue;
            }
            let slide = eng.sixj(prev, h, g, u, inner, j);
            if slide.is_zero() {
                continue;
            }
            let tri = collapse_triangle(eng, [h1, j, g1], [h, u, sp]);
            if tri.is_zero() {
                continue;
            }
            let mut next = js.clone();
            next.push(j);
            stack.push((k + 1, j, w.clone() * slide * tri, next));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

fn apex_weight<S: Scalar>(
    eng: &Recoupling<S>,
    crown: Crown,
    col: &impl Fn(Pair) -> SpinColor,
) -> S {
    let top = crown.n - 2;
    collapse_triangle(
        eng,
        [
            col(crown.outer(Side::Left, top)),
            col(crown.center()),
            col(crown.outer(Side::Right, top)),
        ],
        [
            col(crown.top_side(Side::Left)),
            col(crown.top_side(Side::Right)),
            col(crown.top_arc()),
        ],
    )
}

/// Remove the crown of `H_n`, `n >= 3`, from a coloring that passes the
/// admissibility gate.
pub fn reduce_step_with<S: Scalar>(
    eng: &Recoupling<S>,
    n: usize,
    colors: &[SpinColor],
) -> Vec<ReducedTerm<S>> {
    assert!(n >= 3, "crown reduction needs n >= 3");
    let lay = layout(n);
    let below = layout(n - 1);
    let crown = Crown::new(n);
    let col = |p: Pair| colors[lay.edge(p)];

    let apex = apex_weight(eng, crown, &col);
    if apex.is_zero() {
        return Vec::new();
    }
    let left = side_terms(eng, crown, Side::Left, &col);
    let right = side_terms(eng, crown, Side::Right, &col);
    let top = crown.n - 2;
    let (h_l, h_r) = (
        col(crown.outer(Side::Left, top)),
        col(crown.outer(Side::Right, top)),
    );
    let (g_l, g_r) = (
        col(crown.gate(Side::Left, top)),
        col(crown.gate(Side::Right, top)),
    );
    let sc = col(crown.center());

    // colors inherited by H_{n-1} from the same hex pair
    let inherited: Vec<SpinColor> = below
        .net
        .edges
        .iter()
        .map(|e| colors[lay.edge(e.hexes.expect("lattice edge"))])
        .collect();

    let mut terms = Vec::new();
    for (wl, jl) in &left {
        for (wr, jr) in &right {
            let j = *jl.last().expect("n >= 3 gives at least one index per side");
            if *jr.last().unwrap() != j {
                continue;
            }
            let d = eng.delta(j);
            if d.is_zero() {
                continue;
            }
            let burst = eng.tet(sc, h_r, h_l, j, g_l, g_r) / d;
            if burst.is_zero() {
                continue;
            }
            let weight = apex.clone() * wl.clone() * wr.clone() * burst;
            let mut next = inherited.clone();
            let m = Crown::new(n);
            for (side, js) in [(Side::Left, jl), (Side::Right, jr)] {
                next[below.edge(m.gate(side, 0))] = col(m.foot(side));
                for k in 0..js.len() as i32 {
                    next[below.edge(m.riser(side, k))] = js[k as usize];
                    next[below.edge(m.gate(side, k + 1))] = js[k as usize];
                }
            }
            let mut indices: Vec<SpinColor> = jl[..jl.len() - 1].to_vec();
            indices.extend(&jr[..jr.len() - 1]);
            indices.push(j);
            terms.push(ReducedTerm {
                weight,
                colors: next,
                indices,
            });
        }
    }
    terms
}

/// `H_2`: the apex move leaves a tetrahedron.
fn evaluate_h2<S: Scalar>(eng: &Recoupling<S>, colors: &[SpinColor]) -> S {
    let lay = layout(2);
    let crown = Crown::new(2);
    let col = |p: Pair| colors[lay.edge(p)];
    let apex = apex_weight(eng, crown, &col);
    if apex.is_zero() {
        return apex;
    }
    let tet = eng.tet(
        col(crown.center()),
        col(crown.outer(Side::Right, 0)),
        col(crown.outer(Side::Left, 0)),
        col(crown.foot(Side::Right)),
        col(crown.gate(Side::Left, 0)),
        col(crown.gate(Side::Right, 0)),
    );
    apex * tet
}

fn evaluate_rec<S: Scalar>(
    eng: &Recoupling<S>,
    n: usize,
    colors: &[SpinColor],
    memo: &mut HashMap<(usize, Vec<SpinColor>), S>,
) -> S {
    if !passes_gate(n, colors, eng.param()) {
        return S::zero();
    }
    match n {
        1 => eng.delta(colors[0]),
        2 => evaluate_h2(eng, colors),
        _ => {
            if let Some(v) = memo.get(&(n, colors.to_vec())) {
                return v.clone();
            }
            let parts: Vec<S> = reduce_step_with(eng, n, colors)
                .into_iter()
                .map(|t| {
                    let rest = evaluate_rec(eng, n - 1, &t.colors, memo);
                    t.weight * rest
                })
                .filter(|v| !v.is_zero())
                .collect();
            let v = S::sum_all(&parts);
            memo.insert((n, colors.to_vec()), v.clone());
            v
        }
    }
}

/// `⟨H_n⟩` for a coloring given by edge id of `build_h(n)`.
pub fn evaluate_colors<S: Scalar>(
    eng: &Recoupling<S>,
    n: usize,
    colors: &[SpinColor],
) -> Result<S> {
    if n < 1 {
        return Err(Error::InvalidParam("H_n needs n >= 1".into()));
    }
    check_colors(n, colors)?;
    Ok(evaluate_rec(eng, n, colors, &mut HashMap::new()))
}

pub fn evaluate(net: &HoneycombNet, coloring: &EdgeColoring, p: QParam) -> Result<QScalar> {
    let n = honeycomb_size(net)?;
    evaluate_on(&Engine::shared(p.validate()?), n, &coloring.colors)
}

/// Evaluate with an explicit engine, e.g. one restored from a cache file.
pub fn evaluate_on(engine: &Engine, n: usize, colors: &[SpinColor]) -> Result<QScalar> {
    Ok(match engine {
        Engine::Classical(e) => evaluate_colors(e.as_ref(), n, colors)?.into_qscalar(),
        Engine::Quantum(e) => evaluate_colors(e.as_ref(), n, colors)?.into_qscalar(),
    })
}

/// One crown reduction of a colored `H_n`, `n >= 3`. A coloring that fails
/// the admissibility gate gives no terms.
pub fn reduce_step(
    net: &HoneycombNet,
    coloring: &EdgeColoring,
    p: QParam,
) -> Result<Vec<(QScalar, EdgeColoring)>> {
    let n = honeycomb_size(net)?;
    if n < 3 {
        return Err(Error::Malformed(format!(
            "crown reduction needs n >= 3, got H_{n}"
        )));
    }
    check_colors(n, &coloring.colors)?;
    if !passes_gate(n, &coloring.colors, p) {
        return Ok(Vec::new());
    }
    fn wrap<S: Scalar>(terms: Vec<ReducedTerm<S>>) -> Vec<(QScalar, EdgeColoring)> {
        terms
            .into_iter()
            .map(|t| (t.weight.into_qscalar(), EdgeColoring::new(t.colors)))
            .collect()
    }
    Ok(match Engine::shared(p.validate()?) {
        Engine::Classical(e) => wrap(reduce_step_with::<BigRational>(&e, n, &coloring.colors)),
        Engine::Quantum(e) => wrap(reduce_step_with::<Complex64>(&e, n, &coloring.colors)),
    })
}

/// Coloring of `H_n` under the left-right reflection.
pub fn mirror_coloring(n: usize, colors: &[SpinColor]) -> Vec<SpinColor> {
    let lay = layout(n);
    lay.net
        .edges
        .iter()
        .map(|e| {
            let [p, q] = e.hexes.expect("lattice edge");
            let (a, b) = (p.mirror(), q.mirror());
            colors[lay.edge(if a <= b { [a, b] } else { [b, a] })]
        })
        .collect()
}

/// JSON evaluation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub kind: String,
    pub n: usize,
    pub coloring: Vec<SpinColor>,
    pub backend: QParam,
    #[serde(default)]
    pub trace: bool,
}

/// JSON evaluation response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResponse {
    pub kind: String,
    pub n: usize,
    pub backend: QParam,
    pub coloring: Vec<SpinColor>,
    pub value: QScalar,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<EvaluationTrace>,
}

impl EvalRequest {
    pub fn run_on(&self, engine: &Engine) -> Result<EvalResponse> {
        if self.kind != "H" {
            return Err(Error::Malformed(format!(
                "only honeycombs of kind \"H\" are evaluated, got {:?}",
                self.kind
            )));
        }
        if engine.param() != self.backend {
            return Err(Error::InvalidParam(format!(
                "engine is {} but request asks for {}",
                engine.param(),
                self.backend
            )));
        }
        let value = evaluate_on(engine, self.n, &self.coloring)?;
        let trace = if self.trace {
            Some(build_trace(self.n)?)
        } else {
            None
        };
        Ok(EvalResponse {
            kind: self.kind.clone(),
            n: self.n,
            backend: self.backend,
            coloring: self.coloring.clone(),
            value,
            trace,
        })
    }

    pub fn run(&self) -> Result<EvalResponse> {
        self.run_on(&Engine::shared(self.backend.validate()?))
    }
}
