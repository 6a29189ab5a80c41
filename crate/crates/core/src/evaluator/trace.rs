//! Symbolic crown reductions: each level is a list of moves whose
//! coefficients are products of labeled factors, plus the summed indices and
//! the relabeling that carries colors down to the next level.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::admissible_range;
use super::crown::{layout, Crown, Layout, Pair, Side};
use crate::error::{Error, Result};
use crate::lattice::{EdgeLabel, Letter};
use crate::recoupling::{Engine, Recoupling, SpinColor};
use crate::scalar::{QParam, QScalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "args")]
pub enum Factor {
    SixJ([EdgeLabel; 6]),
    Theta([EdgeLabel; 3]),
    DeltaInv(EdgeLabel),
    Delta(EdgeLabel),
}

impl Factor {
    fn labels(&self) -> Vec<EdgeLabel> {
        match self {
            Factor::SixJ(l) => l.to_vec(),
            Factor::Theta(l) => l.to_vec(),
            Factor::DeltaInv(l) | Factor::Delta(l) => vec![*l],
        }
    }

    fn map(&self, f: impl Fn(EdgeLabel) -> EdgeLabel) -> Factor {
        match self {
            Factor::SixJ(l) => Factor::SixJ(l.map(f)),
            Factor::Theta(l) => Factor::Theta(l.map(f)),
            Factor::DeltaInv(l) => Factor::DeltaInv(f(*l)),
            Factor::Delta(l) => Factor::Delta(f(*l)),
        }
    }

    fn value<S: Scalar>(&self, eng: &Recoupling<S>, c: &impl Fn(EdgeLabel) -> SpinColor) -> S {
        match *self {
            Factor::SixJ([a, b, e, cc, d, f]) => eng.sixj(c(a), c(b), c(e), c(cc), c(d), c(f)),
            Factor::Theta([a, b, x]) => eng.theta(c(a), c(b), c(x)),
            Factor::Delta(a) => eng.delta(c(a)),
            Factor::DeltaInv(a) => {
                let d = eng.delta(c(a));
                if d.is_zero() {
                    d
                } else {
                    S::one() / d
                }
            }
        }
    }
}

/// A product of factors together with the summed indices it mentions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTerm {
    pub factors: Vec<Factor>,
    pub summed_indices: Vec<EdgeLabel>,
}

impl CoeffTerm {
    pub fn new(factors: Vec<Factor>) -> Self {
        let mut summed_indices = Vec::new();
        for l in factors.iter().flat_map(Factor::labels) {
            if l.letter == Letter::I && !summed_indices.contains(&l) {
                summed_indices.push(l);
            }
        }
        CoeffTerm {
            factors,
            summed_indices,
        }
    }

    /// Product of the factors, stopping at the first zero.
    pub fn value<S: Scalar>(&self, eng: &Recoupling<S>, c: &impl Fn(EdgeLabel) -> SpinColor) -> S {
        let mut acc = S::one();
        for f in &self.factors {
            let v = f.value(eng, c);
            if v.is_zero() {
                return v;
            }
            acc = acc * v;
        }
        acc
    }
}

/// Mirror a term: c and d swap, positions change sign, levels stay.
pub fn iota(term: &CoeffTerm) -> CoeffTerm {
    CoeffTerm {
        factors: term
            .factors
            .iter()
            .map(|f| f.map(EdgeLabel::iota))
            .collect(),
        summed_indices: term.summed_indices.iter().map(|l| l.iota()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    BubbleMove,
    Recoupling,
    SchurBurst,
    HalfOctopusRecomposition,
}

/// Which part of the level coefficient a move contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// The apex hexagon.
    Apex,
    /// Recouplings of one side and its lowest triangle.
    Psi,
    /// Triangles above the lowest one.
    Phi,
    /// The two-legged burst at the top.
    Burst,
    Relabel,
    /// Closed base network.
    Base,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub part: Part,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub term: CoeffTerm,
}

/// A summed index and the pairs it must be admissible with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDomain {
    pub index: EdgeLabel,
    pub constraints: Vec<[EdgeLabel; 2]>,
}

/// Reduction of `H_n` to `H_{n-1}`, or the closed form of a base network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPlan {
    pub n: usize,
    pub moves: Vec<Move>,
    pub indices: Vec<IndexDomain>,
    /// For every chain label of `H_{n-1}`, the symbol of this level whose
    /// color it takes.
    pub substitution: Vec<(EdgeLabel, EdgeLabel)>,
}

impl LevelPlan {
    pub fn is_base(&self) -> bool {
        self.n <= 2
    }

    pub fn terms<'a>(
        &'a self,
        part: Part,
        side: Option<Side>,
    ) -> impl Iterator<Item = &'a Move> + 'a {
        self.moves
            .iter()
            .filter(move |m| m.part == part && (side.is_none() || m.side == side))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationTrace {
    pub n: usize,
    /// From `H_n` down to the base network.
    pub levels: Vec<LevelPlan>,
}

impl EvaluationTrace {
    /// Summed indices per reduced level, top first.
    pub fn index_counts(&self) -> Vec<(usize, usize)> {
        self.levels
            .iter()
            .filter(|l| !l.is_base())
            .map(|l| (l.n, l.indices.len()))
            .collect()
    }

    pub fn total_indices(&self) -> usize {
        self.levels.iter().map(|l| l.indices.len()).sum()
    }
}

fn index_label(n: usize, side: Side, k: i32) -> EdgeLabel {
    if k == n as i32 - 3 {
        EdgeLabel::new(Letter::I, n as i32, 0)
    } else {
        EdgeLabel::new(Letter::I, n as i32, side.sign() * (k + 1))
    }
}

/// Factors of the triangle collapse with corner legs `x` and sides `t`
/// (`t12, t23, t31`), written as a bubble move.
fn triangle(x: [EdgeLabel; 3], t: [EdgeLabel; 3]) -> Vec<Factor> {
    let ([x1, x2, x3], [t12, t23, t31]) = (x, t);
    vec![
        Factor::SixJ([t31, x1, t12, x2, t23, x3]),
        Factor::DeltaInv(x3),
        Factor::Theta([t31, t23, x3]),
    ]
}

fn apex_move(lay: &Layout, crown: Crown) -> Move {
    let top = crown.n - 2;
    let l = |p: Pair| lay.label(p);
    Move {
        kind: MoveKind::BubbleMove,
        part: Part::Apex,
        side: None,
        step: None,
        term: CoeffTerm::new(triangle(
            [
                l(crown.outer(Side::Left, top)),
                l(crown.center()),
                l(crown.outer(Side::Right, top)),
            ],
            [
                l(crown.top_side(Side::Left)),
                l(crown.top_side(Side::Right)),
                l(crown.top_arc()),
            ],
        )),
    }
}

fn base_plan(n: usize) -> LevelPlan {
    let lay = layout(n);
    let moves = if n == 1 {
        let loop_label = lay.smoothing.chains[0].label;
        vec![Move {
            kind: MoveKind::SchurBurst,
            part: Part::Base,
            side: None,
            step: None,
            term: CoeffTerm::new(vec![Factor::Delta(loop_label)]),
        }]
    } else {
        let crown = Crown::new(2);
        let l = |p: Pair| lay.label(p);
        let (sc, h_r, h_l) = (
            l(crown.center()),
            l(crown.outer(Side::Right, 0)),
            l(crown.outer(Side::Left, 0)),
        );
        let (g_l, g_r, bottom) = (
            l(crown.gate(Side::Left, 0)),
            l(crown.gate(Side::Right, 0)),
            l(crown.foot(Side::Right)),
        );
        vec![
            apex_move(&lay, crown),
            Move {
                kind: MoveKind::BubbleMove,
                part: Part::Base,
                side: None,
                step: None,
                term: CoeffTerm::new(vec![
                    Factor::SixJ([sc, h_r, h_l, bottom, g_l, g_r]),
                    Factor::DeltaInv(g_r),
                    Factor::Theta([sc, g_l, g_r]),
                    Factor::Theta([h_r, g_r, bottom]),
                ]),
            },
        ]
    };
    LevelPlan {
        n,
        moves,
        indices: Vec::new(),
        substitution: Vec::new(),
    }
}

fn level_plan(n: usize) -> Result<LevelPlan> {
    let lay = layout(n);
    let below = layout(n - 1);
    let crown = Crown::new(n);
    let l = |p: Pair| lay.label(p);
    let last = n as i32 - 3;
    let mut moves = vec![apex_move(&lay, crown)];
    let mut indices = Vec::new();
    let mut top_constraints = Vec::new();
    let mut overrides: HashMap<Pair, EdgeLabel> = HashMap::new();

    for side in [Side::Left, Side::Right] {
        overrides.insert(crown.gate(side, 0), l(crown.foot(side)));
        for k in 0..=last {
            let prev = if k == 0 {
                l(crown.foot(side))
            } else {
                index_label(n, side, k - 1)
            };
            let j = index_label(n, side, k);
            let (h, g, u, inner) = (
                l(crown.outer(side, k)),
                l(crown.gate(side, k)),
                l(crown.riser(side, k)),
                l(crown.inner(side, k)),
            );
            moves.push(Move {
                kind: MoveKind::Recoupling,
                part: Part::Psi,
                side: Some(side),
                step: Some(k as usize),
                term: CoeffTerm::new(vec![Factor::SixJ([prev, h, g, u, inner, j])]),
            });
            moves.push(Move {
                kind: MoveKind::BubbleMove,
                part: if k == 0 { Part::Psi } else { Part::Phi },
                side: Some(side),
                step: Some(k as usize),
                term: CoeffTerm::new(triangle(
                    [l(crown.outer(side, k + 1)), j, l(crown.gate(side, k + 1))],
                    [h, u, l(crown.spoke(side, k))],
                )),
            });
            let constraints = vec![[prev, inner], [h, u]];
            if k == last {
                top_constraints.extend(constraints);
            } else {
                indices.push(IndexDomain {
                    index: j,
                    constraints,
                });
            }
            overrides.insert(crown.riser(side, k), j);
            overrides.insert(crown.gate(side, k + 1), j);
        }
    }
    let top = crown.n - 2;
    let j = index_label(n, Side::Right, last);
    indices.push(IndexDomain {
        index: j,
        constraints: top_constraints,
    });
    let (sc, h_r, h_l) = (
        l(crown.center()),
        l(crown.outer(Side::Right, top)),
        l(crown.outer(Side::Left, top)),
    );
    let (g_l, g_r) = (
        l(crown.gate(Side::Left, top)),
        l(crown.gate(Side::Right, top)),
    );
    moves.push(Move {
        kind: MoveKind::SchurBurst,
        part: Part::Burst,
        side: None,
        step: None,
        term: CoeffTerm::new(vec![
            Factor::SixJ([sc, h_r, h_l, j, g_l, g_r]),
            Factor::DeltaInv(g_r),
            Factor::Theta([sc, g_l, g_r]),
            Factor::Theta([j, h_r, g_r]),
            Factor::DeltaInv(j),
        ]),
    });
    moves.push(Move {
        kind: MoveKind::HalfOctopusRecomposition,
        part: Part::Relabel,
        side: None,
        step: None,
        term: CoeffTerm::new(Vec::new()),
    });

    let mut substitution = Vec::new();
    for chain in &below.smoothing.chains {
        let mut symbol = None;
        for &e in &chain.edges {
            let p = below.net.edges[e].hexes.expect("lattice edge");
            let s = overrides.get(&p).copied().unwrap_or_else(|| l(p));
            match symbol {
                None => symbol = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::Invariant(format!(
                        "chain {} of H_{} takes both {prev} and {s}",
                        chain.label,
                        n - 1
                    )))
                }
                _ => {}
            }
        }
        substitution.push((chain.label, symbol.expect("chains are nonempty")));
    }
    Ok(LevelPlan {
        n,
        moves,
        indices,
        substitution,
    })
}

/// The symbolic reduction of `H_n` down to its base network.
pub fn build_trace(n: usize) -> Result<EvaluationTrace> {
    if n < 1 {
        return Err(Error::InvalidParam("H_n needs n >= 1".into()));
    }
    let mut levels = Vec::new();
    for m in (3..=n).rev() {
        levels.push(level_plan(m)?);
    }
    levels.push(base_plan(n.min(2)));
    Ok(EvaluationTrace { n, levels })
}

/// Chain colors of a coloring of `H_n`; `None` when a chain is not
/// uniformly colored.
fn chain_env(n: usize, colors: &[SpinColor]) -> Result<Option<BTreeMap<EdgeLabel, SpinColor>>> {
    let lay = layout(n);
    if colors.len() != lay.net.edges.len() {
        return Err(Error::Coloring(format!(
            "{} colors for {} edges of H_{n}",
            colors.len(),
            lay.net.edges.len()
        )));
    }
    let mut env = BTreeMap::new();
    for chain in &lay.smoothing.chains {
        let c = colors[chain.edges[0]];
        if chain.edges.iter().any(|&e| colors[e] != c) {
            return Ok(None);
        }
        if env.insert(chain.label, c).is_some() {
            return Err(Error::Invariant(format!(
                "chain label {} is not unique in H_{n}",
                chain.label
            )));
        }
    }
    Ok(Some(env))
}

struct Replayer<'a, S: Scalar> {
    eng: &'a Recoupling<S>,
    levels: &'a [LevelPlan],
    memo: HashMap<(usize, Vec<SpinColor>), S>,
}

impl<S: Scalar> Replayer<'_, S> {
    fn level(&mut self, at: usize, env: &BTreeMap<EdgeLabel, SpinColor>) -> S {
        let key = (at, env.values().copied().collect::<Vec<_>>());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut parts = Vec::new();
        let mut ext = env.clone();
        self.assign(at, 0, &mut ext, &mut parts);
        let v = S::sum_all(&parts);
        self.memo.insert(key, v.clone());
        v
    }

    fn assign(
        &mut self,
        at: usize,
        t: usize,
        env: &mut BTreeMap<EdgeLabel, SpinColor>,
        out: &mut Vec<S>,
    ) {
        let plan = &self.levels[at];
        if t == plan.indices.len() {
            let c = |l: EdgeLabel| env[&l];
            let mut w = S::one();
            for m in &plan.moves {
                let v = m.term.value(self.eng, &c);
                if v.is_zero() {
                    return;
                }
                w = w * v;
            }
            if plan.is_base() {
                out.push(w);
                return;
            }
            let next: BTreeMap<EdgeLabel, SpinColor> = plan
                .substitution
                .iter()
                .map(|(k, s)| (*k, env[s]))
                .collect();
            let rest = self.level(at + 1, &next);
            if !rest.is_zero() {
                out.push(w * rest);
            }
            return;
        }
        let dom = &plan.indices[t];
        let [a, b] = dom.constraints[0];
        let candidates: Vec<SpinColor> = admissible_range(env[&a], env[&b], self.eng.param())
            .filter(|&x| {
                dom.constraints[1..]
                    .iter()
                    .all(|[p, q]| self.eng.admissible(x, env[p], env[q]))
            })
            .collect();
        let index = dom.index;
        for x in candidates {
            env.insert(index, x);
            self.assign(at, t + 1, env, out);
        }
        env.remove(&index);
    }
}

/// Evaluate a coloring of `H_n` by interpreting the trace.
pub fn replay_with<S: Scalar>(
    eng: &Recoupling<S>,
    trace: &EvaluationTrace,
    colors: &[SpinColor],
) -> Result<S> {
    let Some(env) = chain_env(trace.n, colors)? else {
        return Ok(S::zero());
    };
    if let Some(max) = eng.param().max_color() {
        if env.values().any(|&c| c > max) {
            return Ok(S::zero());
        }
    }
    let mut r = Replayer {
        eng,
        levels: &trace.levels,
        memo: HashMap::new(),
    };
    Ok(r.level(0, &env))
}

pub fn replay(trace: &EvaluationTrace, colors: &[SpinColor], p: QParam) -> Result<QScalar> {
    Ok(match Engine::shared(p.validate()?) {
        Engine::Classical(e) => replay_with(e.as_ref(), trace, colors)?.into_qscalar(),
        Engine::Quantum(e) => replay_with(e.as_ref(), trace, colors)?.into_qscalar(),
    })
}

fn part_value(
    n: usize,
    colors: &[SpinColor],
    indices: &[SpinColor],
    p: QParam,
    select: impl Fn(&Move) -> bool,
) -> Result<QScalar> {
    let expected = 2 * n - 5;
    if indices.len() != expected {
        return Err(Error::IndexArity {
            expected,
            got: indices.len(),
        });
    }
    let plan = level_plan(n)?;
    let Some(mut env) = chain_env(n, colors)? else {
        return Ok(QScalar::zero_for(p));
    };
    for (dom, &x) in plan.indices.iter().zip(indices) {
        env.insert(dom.index, x);
    }
    fn product<S: Scalar>(
        eng: &Recoupling<S>,
        moves: &[&Move],
        env: &BTreeMap<EdgeLabel, SpinColor>,
    ) -> QScalar {
        let c = |l: EdgeLabel| env[&l];
        let mut acc = S::one();
        for m in moves {
            acc = acc * m.term.value(eng, &c);
        }
        acc.into_qscalar()
    }
    let chosen: Vec<&Move> = plan.moves.iter().filter(|m| select(m)).collect();
    Ok(match Engine::shared(p.validate()?) {
        Engine::Classical(e) => product(e.as_ref(), &chosen, &env),
        Engine::Quantum(e) => product(e.as_ref(), &chosen, &env),
    })
}

/// Left-side crown coefficient: the recouplings of the left side and its
/// lowest triangle. Its mirror image under [`iota`] is the right side.
/// `indices` are ordered as in `ReducedTerm::indices`.
pub fn psi_coeff(
    colors: &[SpinColor],
    indices: &[SpinColor],
    n: usize,
    p: QParam,
) -> Result<QScalar> {
    if n == 2 {
        if !indices.is_empty() {
            return Err(Error::IndexArity {
                expected: 0,
                got: indices.len(),
            });
        }
        return Ok(QScalar::from_int(1));
    }
    if n < 2 {
        return Err(Error::InvalidParam("crown coefficients need n >= 2".into()));
    }
    part_value(n, colors, indices, p, |m| {
        m.part == Part::Psi && m.side == Some(Side::Left)
    })
}

/// Triangles above the lowest one on both sides; 1 when `n < 4`.
pub fn phi_coeff(
    colors: &[SpinColor],
    indices: &[SpinColor],
    n: usize,
    p: QParam,
) -> Result<QScalar> {
    if n < 4 {
        return Ok(QScalar::from_int(1));
    }
    part_value(n, colors, indices, p, |m| m.part == Part::Phi)
}

/// Product of all move coefficients of one reduction level.
pub fn level_weight(
    colors: &[SpinColor],
    indices: &[SpinColor],
    n: usize,
    p: QParam,
) -> Result<QScalar> {
    part_value(n, colors, indices, p, |_| true)
}

/// Product of the moves of one part, for inspection.
pub fn part_weight(
    colors: &[SpinColor],
    indices: &[SpinColor],
    n: usize,
    p: QParam,
    part: Part,
    side: Option<Side>,
) -> Result<QScalar> {
    part_value(n, colors, indices, p, |m| {
        m.part == part && (side.is_none() || m.side == side)
    })
}
