//! Closed forms for loops, θ-nets, tetrahedra and 6j symbols in the
//! Kauffman–Lins (unnormalized vertex) convention.
//!
//! Edge colors count strands. A `Recoupling<S>` owns the memo tables for one
//! backend; `Engine::shared` hands out process-wide instances so that repeated
//! evaluations reuse each other's work.

use std::sync::{Arc, RwLock};

use dashmap::DashMap;
use num_complex::Complex64;
use num_rational::BigRational;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{QParam, QScalar, Scalar};

pub type SpinColor = u32;

/// Parity, triangle and (for roots of unity) level conditions at a vertex.
pub fn is_admissible(a: SpinColor, b: SpinColor, c: SpinColor, p: QParam) -> bool {
    let (a, b, c) = (a as u64, b as u64, c as u64);
    if (a + b + c) % 2 != 0 || a > b + c || b > a + c || c > a + b {
        return false;
    }
    match p {
        QParam::Classical => true,
        QParam::RootOfUnity(r) => a + b + c + 4 <= 2 * r && a.max(b).max(c) + 2 <= r,
    }
}

/// Position of each tetrahedron edge, listed as `(a,b,e,c,d,f)`, in the
/// vertex-pair order (12,13,14,23,24,34) with vertices
/// 1=(a,d,f), 2=(b,c,f), 3=(a,b,e), 4=(c,d,e).
const PAIR_OF_SLOT: [(usize, usize); 6] = [(0, 2), (1, 2), (2, 3), (1, 3), (0, 3), (0, 1)];

fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    for &x in &p {
                        seen[x] = true;
                    }
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

static PERMS4: Lazy<Vec<[usize; 4]>> = Lazy::new(permutations4);

/// Canonical representative of the tetrahedral symmetry class of
/// `tet(a,b,e,c,d,f)`, returned again in `(a,b,e,c,d,f)` order.
pub fn tet_canonical(args: [SpinColor; 6]) -> [SpinColor; 6] {
    let mut by_pair = [0; 6];
    for (slot, &(i, j)) in PAIR_OF_SLOT.iter().enumerate() {
        by_pair[pair_index(i, j)] = args[slot];
    }
    let mut best: Option<[SpinColor; 6]> = None;
    for perm in PERMS4.iter() {
        let mut v = [0; 6];
        for (k, slot) in v.iter_mut().enumerate() {
            let (i, j) = pair_of(k);
            *slot = by_pair[pair_index(perm[i], perm[j])];
        }
        if best.is_none_or(|b| v < b) {
            best = Some(v);
        }
    }
    let best = best.expect("24 permutations");
    let mut out = [0; 6];
    for (slot, &(i, j)) in PAIR_OF_SLOT.iter().enumerate() {
        out[slot] = best[pair_index(i, j)];
    }
    out
}

fn pair_of(k: usize) -> (usize, usize) {
    [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)][k]
}

/// Recoupling closed forms over one value ring, with optional memoization.
pub struct Recoupling<S: Scalar> {
    param: QParam,
    memo: bool,
    factorials: RwLock<Vec<S>>,
    theta_cache: DashMap<[SpinColor; 3], S>,
    tet_cache: DashMap<[SpinColor; 6], S>,
}

impl<S: Scalar> Recoupling<S> {
    pub fn new(param: QParam) -> Self {
        Recoupling {
            param,
            memo: true,
            factorials: RwLock::new(vec![S::one()]),
            theta_cache: DashMap::new(),
            tet_cache: DashMap::new(),
        }
    }

    /// An engine that recomputes every value; used to check cache transparency.
    pub fn uncached(param: QParam) -> Self {
        Recoupling {
            memo: false,
            ..Self::new(param)
        }
    }

    pub fn param(&self) -> QParam {
        self.param
    }

    pub fn memoized(&self) -> bool {
        self.memo
    }

    pub fn admissible(&self, a: SpinColor, b: SpinColor, c: SpinColor) -> bool {
        is_admissible(a, b, c, self.param)
    }

    pub fn quantum_int(&self, n: u32) -> S {
        S::quantum_int(n, self.param)
    }

    /// `[n]! = [1][2]...[n]`.
    pub fn qfact(&self, n: u32) -> S {
        let n = n as usize;
        {
            let f = self.factorials.read().expect("factorial table poisoned");
            if n < f.len() {
                return f[n].clone();
            }
        }
        let mut f = self.factorials.write().expect("factorial table poisoned");
        while f.len() <= n {
            let k = f.len() as u32;
            let next = f[f.len() - 1].clone() * self.quantum_int(k);
            f.push(next);
        }
        f[n].clone()
    }

    /// Loop value `Δ_n = (-1)^n [n+1]`.
    pub fn delta(&self, n: SpinColor) -> S {
        let v = self.quantum_int(n + 1);
        if n.is_multiple_of(2) {
            v
        } else {
            -v
        }
    }

    pub fn theta(&self, a: SpinColor, b: SpinColor, c: SpinColor) -> S {
        if !self.admissible(a, b, c) {
            return S::zero();
        }
        let mut key = [a, b, c];
        key.sort_unstable();
        if self.memo {
            if let Some(v) = self.theta_cache.get(&key) {
                return v.clone();
            }
        }
        let v = self.theta_raw(key[0], key[1], key[2]);
        if self.memo {
            self.theta_cache.entry(key).or_insert_with(|| v.clone());
        }
        v
    }

    fn theta_raw(&self, a: SpinColor, b: SpinColor, c: SpinColor) -> S {
        let m = (a + b - c) / 2;
        let n = (b + c - a) / 2;
        let p = (a + c - b) / 2;
        let num = self.qfact(m + n + p + 1) * self.qfact(m) * self.qfact(n) * self.qfact(p);
        let den = self.qfact(m + n) * self.qfact(n + p) * self.qfact(m + p);
        let v = num / den;
        if (m + n + p).is_multiple_of(2) {
            v
        } else {
            -v
        }
    }

    /// Tetrahedral net with vertex triples (a,d,f), (b,c,f), (a,b,e), (c,d,e).
    pub fn tet(
        &self,
        a: SpinColor,
        b: SpinColor,
        e: SpinColor,
        c: SpinColor,
        d: SpinColor,
        f: SpinColor,
    ) -> S {
        if !(self.admissible(a, d, f)
            && self.admissible(b, c, f)
            && self.admissible(a, b, e)
            && self.admissible(c, d, e))
        {
            return S::zero();
        }
        if !self.memo {
            return self.tet_raw([a, b, e, c, d, f]);
        }
        let key = tet_canonical([a, b, e, c, d, f]);
        if let Some(v) = self.tet_cache.get(&key) {
            return v.clone();
        }
        let v = self.tet_raw(key);
        self.tet_cache.entry(key).or_insert_with(|| v.clone());
        v
    }

    fn tet_raw(&self, args: [SpinColor; 6]) -> S {
        let [a, b, e, c, d, f] = args;
        let lows = [
            (a + d + f) / 2,
            (b + c + f) / 2,
            (a + b + e) / 2,
            (c + d + e) / 2,
        ];
        let highs = [
            (a + b + c + d) / 2,
            (a + c + e + f) / 2,
            (b + d + e + f) / 2,
        ];
        let mut outer = S::one();
        for &hi in &highs {
            for &lo in &lows {
                outer = outer * self.qfact(hi - lo);
            }
        }
        let mut edges = S::one();
        for x in args {
            edges = edges * self.qfact(x);
        }
        let s_min = *lows.iter().max().expect("four vertices");
        let s_max = *highs.iter().min().expect("three pairs");
        let mut terms = Vec::new();
        for s in s_min..=s_max {
            let mut den = S::one();
            for &lo in &lows {
                den = den * self.qfact(s - lo);
            }
            for &hi in &highs {
                den = den * self.qfact(hi - s);
            }
            let t = self.qfact(s + 1) / den;
            terms.push(if s % 2 == 0 { t } else { -t });
        }
        outer / edges * S::sum_all(&terms)
    }

    /// The symbol `{a b f; c d e}`: `Tet · Δ_f / (θ(a,d,f) θ(b,c,f))`.
    ///
    /// It is the coefficient of the move that turns the pair of vertices
    /// (a,b,e), (c,d,e) into (a,d,f), (b,c,f).
    pub fn sixj(
        &self,
        a: SpinColor,
        b: SpinColor,
        e: SpinColor,
        c: SpinColor,
        d: SpinColor,
        f: SpinColor,
    ) -> S {
        let t = self.tet(a, b, e, c, d, f);
        if t.is_zero() {
            return t;
        }
        t * self.delta(f) / (self.theta(a, d, f) * self.theta(b, c, f))
    }

    pub fn cache_len(&self) -> (usize, usize) {
        (self.theta_cache.len(), self.tet_cache.len())
    }

    pub fn clear_cache(&self) {
        self.theta_cache.clear();
        self.tet_cache.clear();
    }

    /// Copy the memo tables into a serializable, sorted snapshot.
    pub fn snapshot(&self) -> CacheSnapshot {
        let mut theta: Vec<_> = self
            .theta_cache
            .iter()
            .map(|kv| (*kv.key(), kv.value().clone().into_qscalar()))
            .collect();
        theta.sort_by_key(|x| x.0);
        let mut tet: Vec<_> = self
            .tet_cache
            .iter()
            .map(|kv| (*kv.key(), kv.value().clone().into_qscalar()))
            .collect();
        tet.sort_by_key(|x| x.0);
        CacheSnapshot {
            format: CACHE_FORMAT.to_string(),
            version: CACHE_VERSION,
            param: self.param,
            theta,
            tet,
        }
    }

    /// Load entries from a snapshot; stale formats and foreign backends are rejected.
    pub fn restore(&self, snap: &CacheSnapshot) -> Result<usize> {
        snap.check(self.param)?;
        let mut loaded = 0;
        for (k, v) in &snap.theta {
            let v = S::from_qscalar(v)
                .ok_or_else(|| Error::Parse("cache value has wrong backend".into()))?;
            self.theta_cache.insert(*k, v);
            loaded += 1;
        }
        for (k, v) in &snap.tet {
            let v = S::from_qscalar(v)
                .ok_or_else(|| Error::Parse("cache value has wrong backend".into()))?;
            self.tet_cache.insert(*k, v);
            loaded += 1;
        }
        Ok(loaded)
    }
}

pub const CACHE_FORMAT: &str = "honeycomb-recoupling-cache";
pub const CACHE_VERSION: u32 = 1;

/// Persisted memo tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheSnapshot {
    pub format: String,
    pub version: u32,
    pub param: QParam,
    pub theta: Vec<([SpinColor; 3], QScalar)>,
    pub tet: Vec<([SpinColor; 6], QScalar)>,
}

impl CacheSnapshot {
    pub fn check(&self, param: QParam) -> Result<()> {
        if self.format != CACHE_FORMAT || self.version != CACHE_VERSION {
            return Err(Error::Parse(format!(
                "cache header {}/{} does not match {CACHE_FORMAT}/{CACHE_VERSION}",
                self.format, self.version
            )));
        }
        if self.param != param {
            return Err(Error::Parse(format!(
                "cache was built for {} not {param}",
                self.param
            )));
        }
        Ok(())
    }
}

/// A shared engine for either backend.
#[derive(Clone)]
pub enum Engine {
    Classical(Arc<Recoupling<BigRational>>),
    Quantum(Arc<Recoupling<Complex64>>),
}

static CLASSICAL: Lazy<Arc<Recoupling<BigRational>>> =
    Lazy::new(|| Arc::new(Recoupling::new(QParam::Classical)));
static QUANTUM: Lazy<DashMap<u64, Arc<Recoupling<Complex64>>>> = Lazy::new(DashMap::new);

impl Engine {
    /// The process-wide memoized engine for `p`.
    pub fn shared(p: QParam) -> Engine {
        match p {
            QParam::Classical => Engine::Classical(CLASSICAL.clone()),
            QParam::RootOfUnity(r) => Engine::Quantum(
                QUANTUM
                    .entry(r)
                    .or_insert_with(|| Arc::new(Recoupling::new(p)))
                    .clone(),
            ),
        }
    }

    /// A private engine, memoized or not.
    pub fn fresh(p: QParam, memo: bool) -> Engine {
        match (p, memo) {
            (QParam::Classical, true) => Engine::Classical(Arc::new(Recoupling::new(p))),
            (QParam::Classical, false) => Engine::Classical(Arc::new(Recoupling::uncached(p))),
            (_, true) => Engine::Quantum(Arc::new(Recoupling::new(p))),
            (_, false) => Engine::Quantum(Arc::new(Recoupling::uncached(p))),
        }
    }

    pub fn param(&self) -> QParam {
        match self {
            Engine::Classical(e) => e.param(),
            Engine::Quantum(e) => e.param(),
        }
    }

    pub fn snapshot(&self) -> CacheSnapshot {
        match self {
            Engine::Classical(e) => e.snapshot(),
            Engine::Quantum(e) => e.snapshot(),
        }
    }

    pub fn restore(&self, snap: &CacheSnapshot) -> Result<usize> {
        match self {
            Engine::Classical(e) => e.restore(snap),
            Engine::Quantum(e) => e.restore(snap),
        }
    }
}

macro_rules! dispatch {
    ($p:expr, |$e:ident| $body:expr) => {
        match Engine::shared($p) {
            Engine::Classical($e) => ($body).into_qscalar(),
            Engine::Quantum($e) => ($body).into_qscalar(),
        }
    };
}

pub fn quantum_int(n: u32, p: QParam) -> QScalar {
    match p {
        QParam::Classical => BigRational::quantum_int(n, p).into_qscalar(),
        QParam::RootOfUnity(_) => Complex64::quantum_int(n, p).into_qscalar(),
    }
}

pub fn delta(n: SpinColor, p: QParam) -> QScalar {
    dispatch!(p, |e| e.delta(n))
}

pub fn theta(a: SpinColor, b: SpinColor, c: SpinColor, p: QParam) -> QScalar {
    dispatch!(p, |e| e.theta(a, b, c))
}

pub fn tet(
    a: SpinColor,
    b: SpinColor,
    e_: SpinColor,
    c: SpinColor,
    d: SpinColor,
    f: SpinColor,
    p: QParam,
) -> QScalar {
    dispatch!(p, |e| e.tet(a, b, e_, c, d, f))
}

pub fn sixj(
    a: SpinColor,
    b: SpinColor,
    e_: SpinColor,
    c: SpinColor,
    d: SpinColor,
    f: SpinColor,
    p: QParam,
) -> QScalar {
    dispatch!(p, |e| e.sixj(a, b, e_, c, d, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(v: i64) -> BigRational {
        BigRational::from_i64(v)
    }

    #[test]
    fn small_values() {
        let e = Recoupling::<BigRational>::new(QParam::Classical);
        assert_eq!(e.delta(0), q(1));
        assert_eq!(e.delta(1), q(-2));
        assert_eq!(e.delta(2), q(3));
        assert_eq!(e.theta(1, 1, 0), q(-2));
        assert_eq!(e.theta(1, 1, 2), q(3));
        assert!(e.theta(1, 1, 1).is_zero());
        assert!(e.tet(1, 1, 1, 1, 1, 1).is_zero());
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(1, 1, 2, QParam::Classical));
        assert!(!is_admissible(1, 1, 1, QParam::Classical));
        assert!(!is_admissible(2, 2, 4, QParam::RootOfUnity(4)));
        assert!(is_admissible(1, 1, 2, QParam::RootOfUnity(4)));
    }

    #[test]
    fn theta_symmetric_and_collapses() {
        for p in [QParam::Classical, QParam::RootOfUnity(11)] {
            for a in 0..=6 {
                assert!(theta(a, a, 0, p).approx_eq(&delta(a, p), 1e-12));
                for b in 0..=6 {
                    for c in 0..=6 {
                        let v = theta(a, b, c, p);
                        for w in [
                            theta(a, c, b, p),
                            theta(b, a, c, p),
                            theta(b, c, a, p),
                            theta(c, a, b, p),
                            theta(c, b, a, p),
                        ] {
                            assert!(v.approx_eq(&w, 1e-12));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tet_with_zero_edge_is_theta() {
        let e = Recoupling::<BigRational>::new(QParam::Classical);
        for a in 0..=5 {
            for b in 0..=5 {
                for c in 0..=5 {
                    if e.admissible(a, b, c) {
                        assert_eq!(e.tet(a, b, c, b, a, 0), e.theta(a, b, c), "({a},{b},{c})");
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_key_is_class_invariant() {
        let [a, b, e, c, d, f] = [2, 3, 3, 4, 1, 3];
        // Swapping the vertices (a,d,f) and (b,c,f) is a symmetry of the net.
        assert_eq!(
            tet_canonical([a, b, e, c, d, f]),
            tet_canonical([b, a, e, d, c, f])
        );
        let raw = Recoupling::<BigRational>::uncached(QParam::Classical);
        assert_eq!(raw.tet(a, b, e, c, d, f), raw.tet(b, a, e, d, c, f));
        let k = tet_canonical([a, b, e, c, d, f]);
        assert_eq!(
            raw.tet(a, b, e, c, d, f),
            raw.tet(k[0], k[1], k[2], k[3], k[4], k[5])
        );
    }

    #[test]
    fn level_bound_zeroes_quantum_values() {
        let p = QParam::RootOfUnity(4);
        assert!(theta(2, 2, 4, p).is_zero());
        assert!(!theta(1, 1, 2, p).is_zero());
    }

    #[test]
    fn cache_snapshot_round_trip() {
        let e = Recoupling::<BigRational>::new(QParam::Classical);
        let v = e.tet(2, 2, 2, 2, 2, 2);
        let snap = e.snapshot();
        let text = serde_json::to_string(&snap).unwrap();
        let back: CacheSnapshot = serde_json::from_str(&text).unwrap();
        let f = Recoupling::<BigRational>::new(QParam::Classical);
        assert!(f.restore(&back).unwrap() > 0);
        assert_eq!(f.cache_len(), e.cache_len());
        assert_eq!(f.tet(2, 2, 2, 2, 2, 2), v);
        let g = Recoupling::<Complex64>::new(QParam::RootOfUnity(7));
        assert!(g.restore(&back).is_err());
    }
}
