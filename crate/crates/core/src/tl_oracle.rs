//! Brute-force evaluation of closed planar networks by expanding every edge
//! into Temperley–Lieb diagrams and counting loops.
//!
//! Nothing here uses the closed forms in `recoupling`; the only input is the
//! loop value `d`. That makes it a convention-free reference for the
//! recoupling formulas and for the honeycomb evaluator.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{QParam, QScalar, Scalar};

/// Default cap on the number of basis-diagram expansions per evaluation.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A non-crossing perfect matching of `n` bottom points (`0..n`) and `n` top
/// points (`n..2n`), both numbered left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarPairing {
    n: usize,
    partner: Vec<u16>,
}

impl PlanarPairing {
    pub fn identity(n: usize) -> Self {
        let mut partner = vec![0; 2 * n];
        for i in 0..n {
            partner[i] = (n + i) as u16;
            partner[n + i] = i as u16;
        }
        PlanarPairing { n, partner }
    }

    /// The generator `e_i`: a cap on bottom points i,i+1 and a cup on top.
    pub fn cup_cap(n: usize, i: usize) -> Self {
        assert!(i + 1 < n, "cup-cap needs two adjacent strands");
        let mut p = Self::identity(n);
        p.partner[i] = (i + 1) as u16;
        p.partner[i + 1] = i as u16;
        p.partner[n + i] = (n + i + 1) as u16;
        p.partner[n + i + 1] = (n + i) as u16;
        p
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn partner(&self, point: usize) -> usize {
        self.partner[point] as usize
    }

    /// Add one through-strand on the right.
    pub fn tensor_one(&self) -> Self {
        let n = self.n;
        let m = n + 1;
        let map = |x: usize| if x < n { x } else { x + 1 };
        let mut partner = vec![0u16; 2 * m];
        for x in 0..2 * n {
            partner[map(x)] = map(self.partner(x)) as u16;
        }
        partner[n] = (m + n) as u16;
        partner[m + n] = n as u16;
        PlanarPairing { n: m, partner }
    }

    /// Stack `self` on top of `below`; returns the product and the number of
    /// closed loops created in the middle.
    pub fn compose(&self, below: &PlanarPairing) -> (PlanarPairing, usize) {
        assert_eq!(self.n, below.n, "strand counts differ");
        let n = self.n;
        let mut partner = vec![u16::MAX; 2 * n];
        let mut mid_seen = vec![false; n];
        // Points of the product: bottom i is below's bottom i, top i is self's top i.
        // Walk from an outer point until another outer point is reached.
        let walk = |start_in_below: bool, start: usize, mid_seen: &mut Vec<bool>| -> usize {
            let mut in_below = start_in_below;
            let mut at = start;
            loop {
                if in_below {
                    let q = below.partner(at);
                    if q < n {
                        return q;
                    }
                    mid_seen[q - n] = true;
                    in_below = false;
                    at = q - n;
                } else {
                    let q = self.partner(at);
                    if q >= n {
                        return q;
                    }
                    mid_seen[q] = true;
                    in_below = true;
                    at = n + q;
                }
            }
        };
        for i in 0..n {
            if partner[i] == u16::MAX {
                let end = walk(true, i, &mut mid_seen);
                partner[i] = end as u16;
                partner[end] = i as u16;
            }
            if partner[n + i] == u16::MAX {
                let end = walk(false, n + i, &mut mid_seen);
                partner[n + i] = end as u16;
                partner[end] = (n + i) as u16;
            }
        }
        let mut loops = 0;
        for j in 0..n {
            if mid_seen[j] {
                continue;
            }
            loops += 1;
            let mut at = j;
            loop {
                mid_seen[at] = true;
                // down through below, back up through self
                let q = below.partner(n + at) - n;
                mid_seen[q] = true;
                let r = self.partner(q);
                if r == j {
                    break;
                }
                at = r;
            }
        }
        (PlanarPairing { n, partner }, loops)
    }

    pub fn is_noncrossing(&self) -> bool {
        // Put points on a circle: bottom left to right, then top right to left.
        let n = self.n;
        let pos = |x: usize| if x < n { x } else { 3 * n - 1 - x };
        for x in 0..2 * n {
            let (a, b) = ordered(pos(x), pos(self.partner(x)));
            for y in 0..2 * n {
                let (c, d) = ordered(pos(y), pos(self.partner(y)));
                if a < c && c < b && b < d {
                    return false;
                }
            }
        }
        true
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A formal combination of pairings on a fixed number of strands.
#[derive(Debug, Clone, PartialEq)]
pub struct TLElement<S: Scalar> {
    n: usize,
    terms: BTreeMap<PlanarPairing, S>,
}

impl<S: Scalar> TLElement<S> {
    pub fn identity(n: usize) -> Self {
        Self::basis(PlanarPairing::identity(n))
    }

    pub fn basis(p: PlanarPairing) -> Self {
        let mut terms = BTreeMap::new();
        let n = p.strands();
        terms.insert(p, S::one());
        TLElement { n, terms }
    }

    pub fn zero(n: usize) -> Self {
        TLElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PlanarPairing, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &PlanarPairing) -> S {
        self.terms.get(p).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, p: PlanarPairing, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(p.clone()).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (p, v) in self.terms() {
            out.add_term(p.clone(), v.clone() * c.clone());
        }
        out
    }

    /// `self` stacked on top of `below`, closed loops weighted by `d`.
    pub fn compose(&self, below: &Self, d: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (p, a) in self.terms() {
            for (q, b) in below.terms() {
                let (r, loops) = p.compose(q);
                let mut c = a.clone() * b.clone();
                for _ in 0..loops {
                    c = c * d.clone();
                }
                out.add_term(r, c);
            }
        }
        out
    }

    pub fn tensor_one(&self) -> Self {
        let mut out = Self::zero(self.n + 1);
        for (p, c) in self.terms() {
            out.add_term(p.tensor_one(), c.clone());
        }
        out
    }
}

/// Loop values `Δ_0..=Δ_max` from the Chebyshev recursion in `d` alone.
fn chebyshev<S: Scalar>(d: &S, max: usize) -> Vec<S> {
    let mut out = vec![S::one(), d.clone()];
    while out.len() <= max {
        let k = out.len();
        let next = d.clone() * out[k - 1].clone() - out[k - 2].clone();
        out.push(next);
    }
    out.truncate(max + 1);
    out
}

/// The Jones–Wenzl idempotent on `n` strands, built by the Wenzl recursion.
pub fn jw_projector<S: Scalar>(n: usize, p: QParam) -> Result<TLElement<S>> {
    if let Some(max) = p.max_color() {
        if n > max as usize {
            return Err(Error::LevelViolation {
                color: n as u32,
                max,
            });
        }
    }
    let d = S::loop_value(p);
    if n <= 1 {
        return Ok(TLElement::identity(n));
    }
    let deltas = chebyshev(&d, n);
    let mut proj = TLElement::identity(1);
    for k in 1..n {
        // proj is P_k; build P_{k+1}
        let lifted = proj.tensor_one();
        let e = TLElement::basis(PlanarPairing::cup_cap(k + 1, k - 1));
        let sandwich = lifted.compose(&e, &d).compose(&lifted, &d);
        let ratio = deltas[k - 1].clone() / deltas[k].clone();
        proj = lifted.add(&sandwich.scale(&-ratio));
    }
    Ok(proj)
}

/// A closed planar graph given by its rotation system.
///
/// `rotation[v]` lists the darts at `v` in counterclockwise order; a dart is
/// `(edge, end)` where `end` 0 is `edges[edge][0]` and 1 is `edges[edge][1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarNet {
    pub edges: Vec<[usize; 2]>,
    pub rotation: Vec<Vec<(usize, usize)>>,
}

impl PlanarNet {
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![[false; 2]; self.edges.len()];
        for (v, darts) in self.rotation.iter().enumerate() {
            for &(e, end) in darts {
                if e >= self.edges.len() || end > 1 || self.edges[e][end] != v {
                    return Err(Error::Malformed(format!(
                        "dart ({e},{end}) does not belong to vertex {v}"
                    )));
                }
                if seen[e][end] {
                    return Err(Error::Malformed(format!("dart ({e},{end}) listed twice")));
                }
                seen[e][end] = true;
            }
        }
        let open = seen.iter().filter(|s| !(s[0] && s[1])).count();
        if open > 0 {
            return Err(Error::OpenNetwork(open));
        }
        Ok(())
    }

    /// One edge closed on itself through a binary vertex.
    pub fn single_loop() -> Self {
        PlanarNet {
            edges: vec![[0, 0]],
            rotation: vec![vec![(0, 0), (0, 1)]],
        }
    }

    /// Two vertices joined by three edges, in the order given.
    pub fn theta() -> Self {
        PlanarNet {
            edges: vec![[0, 1], [0, 1], [0, 1]],
            rotation: vec![vec![(0, 0), (1, 0), (2, 0)], vec![(0, 1), (2, 1), (1, 1)]],
        }
    }

    /// The tetrahedron with edges in `(a,b,e,c,d,f)` order and vertex triples
    /// (a,d,f), (b,c,f), (a,b,e), (c,d,e), matching `Recoupling::tet`.
    pub fn tetrahedron() -> Self {
        // vertices: 0=(a,d,f) 1=(b,c,f) 2=(a,b,e) 3=(c,d,e), drawn with 3 in the middle
        let pts = [(0.0, 1.0), (-0.87, -0.5), (0.87, -0.5), (0.0, 0.0)];
        let edges = vec![[0, 2], [1, 2], [2, 3], [1, 3], [0, 3], [0, 1]];
        Self::from_straight_lines(&pts, &edges)
    }

    /// Rotation system of a straight-line drawing.
    pub fn from_straight_lines(points: &[(f64, f64)], edges: &[[usize; 2]]) -> Self {
        let mut around: Vec<Vec<(f64, (usize, usize))>> = vec![Vec::new(); points.len()];
        for (e, &[u, v]) in edges.iter().enumerate() {
            let (ux, uy) = points[u];
            let (vx, vy) = points[v];
            around[u].push(((vy - uy).atan2(vx - ux), (e, 0)));
            around[v].push(((uy - vy).atan2(ux - vx), (e, 1)));
        }
        let rotation = around
            .into_iter()
            .map(|mut ds| {
                ds.sort_by(|a, b| a.0.total_cmp(&b.0));
                ds.into_iter().map(|(_, d)| d).collect()
            })
            .collect();
        PlanarNet {
            edges: edges.to_vec(),
            rotation,
        }
    }
}

/// Options for an oracle run.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            budget: DEFAULT_BUDGET,
        }
    }
}

const NONE: u32 = u32::MAX;

/// Evaluate a closed colored network; `colors[e]` is the strand count of edge `e`.
pub fn oracle_evaluate(net: &PlanarNet, colors: &[u32], p: QParam) -> Result<QScalar> {
    oracle_evaluate_with(net, colors, p, OracleConfig::default())
}

pub fn oracle_evaluate_with(
    net: &PlanarNet,
    colors: &[u32],
    p: QParam,
    cfg: OracleConfig,
) -> Result<QScalar> {
    match p {
        QParam::Classical => Ok(oracle_value::<BigRational>(net, colors, p, cfg)?.into_qscalar()),
        QParam::RootOfUnity(_) => {
            Ok(oracle_value::<Complex64>(net, colors, p, cfg)?.into_qscalar())
        }
    }
}

/// Typed oracle evaluation.
pub fn oracle_value<S: Scalar>(
    net: &PlanarNet,
    colors: &[u32],
    p: QParam,
    cfg: OracleConfig,
) -> Result<S> {
    net.validate()?;
    if colors.len() != net.edges.len() {
        return Err(Error::Coloring(format!(
            "{} colors for {} edges",
            colors.len(),
            net.edges.len()
        )));
    }
    // Point numbering: each dart (e,end) owns colors[e] consecutive points,
    // counted counterclockwise around its vertex.
    let mut base = vec![[0u32; 2]; net.edges.len()];
    let mut total = 0u32;
    for (e, b) in base.iter_mut().enumerate() {
        b[0] = total;
        b[1] = total + colors[e];
        total += 2 * colors[e];
    }
    let total = total as usize;
    let mut owner = vec![0u32; total];
    for (e, b) in base.iter().enumerate() {
        for x in b[0]..b[0] + 2 * colors[e] {
            owner[x as usize] = e as u32;
        }
    }

    let mut link = vec![NONE; total];
    for darts in &net.rotation {
        let k = darts.len();
        let n: Vec<u32> = darts.iter().map(|&(e, _)| colors[e]).collect();
        let sum: u32 = n.iter().sum();
        if !sum.is_multiple_of(2) {
            return Ok(S::zero());
        }
        // strands running from dart i to dart i+1
        let mut between = Vec::with_capacity(k);
        match k {
            2 => {
                if n[0] != n[1] {
                    return Ok(S::zero());
                }
                between.push(n[0]);
                between.push(0);
            }
            3 => {
                for i in 0..3 {
                    let (a, b, c) = (n[i], n[(i + 1) % 3], n[(i + 2) % 3]);
                    if a + b < c {
                        return Ok(S::zero());
                    }
                    between.push((a + b - c) / 2);
                }
            }
            _ => {
                return Err(Error::Malformed(format!(
                    "vertex of valence {k} is not supported"
                )))
            }
        }
        for i in 0..k {
            let (e1, end1) = darts[i];
            let (e2, end2) = darts[(i + 1) % k];
            for t in 0..between[i] {
                let x = base[e1][end1] + colors[e1] - 1 - t;
                let y = base[e2][end2] + t;
                link[x as usize] = y;
                link[y as usize] = x;
            }
        }
    }
    if link.contains(&NONE) {
        return Err(Error::Invariant(
            "vertex routing left a strand unmatched".into(),
        ));
    }

    let d = S::loop_value(p);
    let mut projectors: HashMap<u32, Vec<(Vec<u32>, S)>> = HashMap::new();
    let mut states: HashMap<Vec<u32>, S> = HashMap::new();
    states.insert(link, S::one());
    let mut work = 0u64;

    for e in edge_order(net) {
        let n = colors[e];
        if n == 0 {
            continue;
        }
        if let std::collections::hash_map::Entry::Vacant(e) = projectors.entry(n) {
            let jw = jw_projector::<S>(n as usize, p)?;
            // local point l (0..2n) of the TL picture to its offset inside the edge block
            let local: Vec<u32> = (0..2 * n)
                .map(|l| if l < n { n - 1 - l } else { n + (l - n) })
                .collect();
            let mut terms = Vec::with_capacity(jw.len());
            for (pair, c) in jw.terms() {
                let mut partner = vec![0u32; 2 * n as usize];
                for l in 0..2 * n {
                    partner[local[l as usize] as usize] = local[pair.partner(l as usize)];
                }
                terms.push((partner, c.clone()));
            }
            e.insert(terms);
        }
        let terms = &projectors[&n];
        let lo = base[e][0];
        let hi = lo + 2 * n;
        let mut next: HashMap<Vec<u32>, S> = HashMap::with_capacity(states.len());
        for (state, coeff) in &states {
            work += terms.len() as u64;
            if work > cfg.budget {
                return Err(Error::OracleBudget {
                    needed: work,
                    budget: cfg.budget,
                });
            }
            for (partner, c) in terms {
                let (new_state, loops) = contract(state, lo, hi, partner, &owner, e as u32);
                let mut w = coeff.clone() * c.clone();
                for _ in 0..loops {
                    w = w * d.clone();
                }
                match next.get_mut(&new_state) {
                    Some(v) => *v = v.clone() + w,
                    None => {
                        next.insert(new_state, w);
                    }
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        states = next;
    }
    // Every strand has been absorbed, so at most the empty state is left.
    Ok(states.into_values().next().unwrap_or_else(S::zero))
}

/// Glue one edge's TL diagram into the connectivity state. Points in
/// `lo..hi` belong to the edge; `partner` pairs them (offsets from `lo`).
fn contract(
    state: &[u32],
    lo: u32,
    hi: u32,
    partner: &[u32],
    owner: &[u32],
    edge: u32,
) -> (Vec<u32>, usize) {
    let inside = |x: u32| x != NONE && owner[x as usize] == edge;
    let mut out = state.to_vec();
    let mut visited = vec![false; (hi - lo) as usize];
    for x in lo..hi {
        out[x as usize] = NONE;
    }
    for x in lo..hi {
        let y = state[x as usize];
        if inside(y) || visited[(x - lo) as usize] {
            continue;
        }
        // y is outside; walk from x through the edge until we exit
        let mut at = x;
        loop {
            visited[(at - lo) as usize] = true;
            let across = lo + partner[(at - lo) as usize];
            visited[(across - lo) as usize] = true;
            let z = state[across as usize];
            if !inside(z) {
                out[y as usize] = z;
                out[z as usize] = y;
                break;
            }
            at = z;
        }
    }
    let mut loops = 0;
    for x in lo..hi {
        if visited[(x - lo) as usize] {
            continue;
        }
        loops += 1;
        let mut at = x;
        loop {
            visited[(at - lo) as usize] = true;
            let across = lo + partner[(at - lo) as usize];
            visited[(across - lo) as usize] = true;
            at = state[across as usize];
            if at == x {
                break;
            }
        }
    }
    (out, loops)
}

/// Breadth-first edge order keeps the set of dangling strands small.
fn edge_order(net: &PlanarNet) -> Vec<usize> {
    let nv = net.rotation.len();
    let mut rank = vec![usize::MAX; nv];
    let mut next = 0;
    for start in 0..nv {
        if rank[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        rank[start] = next;
        next += 1;
        while let Some(v) = queue.pop_front() {
            for &(e, end) in &net.rotation[v] {
                let w = net.edges[e][1 - end];
                if rank[w] == usize::MAX {
                    rank[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..net.edges.len()).collect();
    order.sort_by_key(|&e| {
        let [u, v] = net.edges[e];
        (rank[u].max(rank[v]), rank[u].min(rank[v]), e)
    });
    order
}
