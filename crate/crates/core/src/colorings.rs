//! Compatible colorings built from simple cycles of `H_n`.
//!
//! A configuration is a multiset of cycles; every edge gets the number of
//! cycles (with multiplicity) running through it. Each cycle adds 0 or 2 to
//! the color sum at a vertex, so parity and the triangle inequalities hold by
//! construction.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_h, HoneycombNet};
use crate::SpinColor;

/// A simple cycle as a sequence of edge ids, stored in canonical
/// rotation/reflection form (smallest edge first, then the smaller
/// neighbour second).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cycle {
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn canonical(mut edges: Vec<usize>) -> Self {
        let len = edges.len();
        let at = (0..len).min_by_key(|&i| edges[i]).unwrap_or(0);
        edges.rotate_left(at);
        if len > 2 && edges[len - 1] < edges[1] {
            edges[1..].reverse();
        }
        Cycle { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Undirected vertex graph of a closed network: `adj[v]` lists `(w, edge)`.
fn vertex_graph(net: &HoneycombNet) -> Result<Vec<Vec<(usize, usize)>>> {
    let mut adj = vec![Vec::new(); net.vertices.len()];
    for e in &net.edges {
        let [Some(a), Some(b)] = e.ends else {
            return Err(Error::OpenNetwork(1));
        };
        if a == b {
            return Err(Error::Malformed(format!("edge {} is a self-loop", e.id)));
        }
        adj[a].push((b, e.id));
        adj[b].push((a, e.id));
    }
    Ok(adj)
}

/// Johnson's circuit search on the symmetric digraph of an undirected graph.
/// Every undirected cycle shows up in both directions; only the direction
/// whose second vertex is smaller than its last is kept, and back-and-forth
/// walks along one edge are dropped.
struct Johnson<'a> {
    adj: &'a [Vec<(usize, usize)>],
    start: usize,
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    blist: Vec<Vec<usize>>,
    vstack: Vec<usize>,
    estack: Vec<usize>,
    out: Vec<Cycle>,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        let mut work = vec![u];
        while let Some(x) = work.pop() {
            if self.blocked[x] {
                self.blocked[x] = false;
                work.append(&mut self.blist[x]);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.vstack.push(v);
        self.blocked[v] = true;
        for &(w, e) in &self.adj[v] {
            if !self.allowed[w] {
                continue;
            }
            if w == self.start {
                let len = self.vstack.len();
                if len >= 3 && self.vstack[1] < self.vstack[len - 1] {
                    let mut edges = self.estack.clone();
                    edges.push(e);
                    self.out.push(Cycle::canonical(edges));
                }
                // a 2-step return still proves a circuit through v exists
                found = true;
            } else if !self.blocked[w] {
                self.estack.push(e);
                if self.circuit(w) {
                    found = true;
                }
                self.estack.pop();
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &(w, _) in &self.adj[v] {
                if self.allowed[w] && !self.blist[w].contains(&v) {
                    self.blist[w].push(v);
                }
            }
        }
        self.vstack.pop();
        found
    }
}

/// All simple cycles of a closed network, sorted by length and then by
/// canonical edge sequence.
pub fn simple_cycles(net: &HoneycombNet) -> Result<Vec<Cycle>> {
    let adj = vertex_graph(net)?;
    let nv = adj.len();
    let mut out = Vec::new();
    for s in 0..nv {
        // the strong component of s among vertices >= s is its connected
        // component there, since the digraph is symmetric
        let mut allowed = vec![false; nv];
        let mut stack = vec![s];
        allowed[s] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if w > s && !allowed[w] {
                    allowed[w] = true;
                    stack.push(w);
                }
            }
        }
        let mut j = Johnson {
            adj: &adj,
            start: s,
            allowed,
            blocked: vec![false; nv],
            blist: vec![Vec::new(); nv],
            vstack: Vec::new(),
            estack: Vec::new(),
            out: Vec::new(),
        };
        j.circuit(s);
        out.append(&mut j.out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges)));
    let before = out.len();
    out.dedup();
    if out.len() != before {
        return Err(Error::Invariant(
            "cycle search reported a cycle twice".into(),
        ));
    }
    Ok(out)
}

pub fn enumerate_cycles(n: usize) -> Result<Vec<Cycle>> {
    if n < 1 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    simple_cycles(&build_h(n)?)
}

#[derive(Serialize, Deserialize)]
struct CycleDump {
    n: usize,
    count: usize,
    cycles: Vec<Vec<usize>>,
}

pub fn cycles_to_json(n: usize, cycles: &[Cycle]) -> Result<String> {
    let dump = CycleDump {
        n,
        count: cycles.len(),
        cycles: cycles.iter().map(|c| c.edges.clone()).collect(),
    };
    Ok(serde_json::to_string(&dump)?)
}

pub fn cycles_from_json(text: &str) -> Result<(usize, Vec<Cycle>)> {
    let dump: CycleDump = serde_json::from_str(text)?;
    let cycles = dump.cycles.into_iter().map(Cycle::canonical).collect();
    Ok((dump.n, cycles))
}

fn binom(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Multisets of size `k` drawn from `n` kinds.
fn multichoose(n: u128, k: u128) -> u128 {
    if n == 0 {
        return u128::from(k == 0);
    }
    binom(n + k - 1, k)
}

fn multichoose_big(n: u64, k: u64) -> BigUint {
    if n == 0 {
        return if k == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n + i) / BigUint::from(i + 1);
    }
    r
}

/// Number of cycle multisets with total multiplicity in `1..=cmax`.
pub fn config_count(n_cycles: u64, cmax: u64) -> BigUint {
    (1..=cmax).map(|k| multichoose_big(n_cycles, k)).sum()
}

/// Cycle ids with multiplicities; keys are ids into the cycle list.
pub type CycleMultiset = BTreeMap<usize, u32>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringConfig {
    pub rank: u128,
    pub multiset: CycleMultiset,
    pub colors: Vec<SpinColor>,
}

/// Multisets ordered by size, then lexicographically as nondecreasing id
/// sequences. Ranks index that order from 0.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    cycles: Vec<Cycle>,
    n_edges: usize,
    cmax: usize,
    /// `offsets[k]` is the rank of the first multiset of size `k + 1`.
    offsets: Vec<u128>,
}

impl ConfigSpace {
    pub fn new(cycles: Vec<Cycle>, n_edges: usize, cmax: usize) -> Result<Self> {
        if cmax < 1 {
            return Err(Error::InvalidParam("c_M must be at least 1".into()));
        }
        if let Some(e) = cycles
            .iter()
            .flat_map(|c| &c.edges)
            .find(|&&e| e >= n_edges)
        {
            return Err(Error::InvalidParam(format!(
                "cycle edge {e} is outside the network"
            )));
        }
        let total = config_count(cycles.len() as u64, cmax as u64);
        if total.to_u128().is_none() {
            return Err(Error::InvalidParam(format!(
                "{total} configurations do not fit in 128-bit ranks"
            )));
        }
        let mut offsets = vec![0u128];
        for k in 1..=cmax {
            let last = *offsets.last().unwrap();
            offsets.push(last + multichoose(cycles.len() as u128, k as u128));
        }
        Ok(ConfigSpace {
            cycles,
            n_edges,
            cmax,
            offsets,
        })
    }

    pub fn for_patch(n: usize, cmax: usize) -> Result<Self> {
        let net = build_h(n)?;
        Self::new(simple_cycles(&net)?, net.edges.len(), cmax)
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn cmax(&self) -> usize {
        self.cmax
    }

    pub fn len(&self) -> u128 {
        self.offsets[self.cmax]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nondecreasing cycle-id sequence of the multiset with this rank.
    pub fn unrank(&self, rank: u128) -> Result<Vec<usize>> {
        if rank >= self.len() {
            return Err(Error::InvalidParam(format!("rank {rank} is out of range")));
        }
        let k = (1..=self.cmax).find(|&k| rank < self.offsets[k]).unwrap();
        let mut r = rank - self.offsets[k - 1];
        let n = self.cycles.len();
        let mut seq = Vec::with_capacity(k);
        let mut lo = 0;
        for pos in 0..k {
            let rest = (k - pos - 1) as u128;
            let mut v = lo;
            loop {
                // completions when this slot takes v: the rest draw from v..n
                let block = multichoose((n - v) as u128, rest);
                if r < block {
                    break;
                }
                r -= block;
                v += 1;
            }
            seq.push(v);
            lo = v;
        }
        Ok(seq)
    }

    pub fn rank_of(&self, seq: &[usize]) -> Result<u128> {
        let k = seq.len();
        if k == 0 || k > self.cmax || seq.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParam(
                "not a nondecreasing sequence of allowed size".into(),
            ));
        }
        let n = self.cycles.len();
        if seq[k - 1] >= n {
            return Err(Error::InvalidParam("cycle id out of range".into()));
        }
        let mut r = self.offsets[k - 1];
        let mut lo = 0;
        for (pos, &v) in seq.iter().enumerate() {
            let rest = (k - pos - 1) as u128;
            for u in lo..v {
                r += multichoose((n - u) as u128, rest);
            }
            lo = v;
        }
        Ok(r)
    }

    pub fn config_of(&self, rank: u128, seq: &[usize]) -> ColoringConfig {
        let mut colors = vec![0; self.n_edges];
        let mut multiset = CycleMultiset::new();
        for &c in seq {
            *multiset.entry(c).or_insert(0) += 1;
            for &e in &self.cycles[c].edges {
                colors[e] += 1;
            }
        }
        ColoringConfig {
            rank,
            multiset,
            colors,
        }
    }

    pub fn config(&self, rank: u128) -> Result<ColoringConfig> {
        let seq = self.unrank(rank)?;
        Ok(self.config_of(rank, &seq))
    }

    pub fn stream(&self) -> ConfigStream<'_> {
        self.range(0, self.len())
    }

    /// Configurations with ranks in `start..end`.
    pub fn range(&self, start: u128, end: u128) -> ConfigStream<'_> {
        let end = end.min(self.len());
        let seq = if start < end {
            self.unrank(start).ok()
        } else {
            None
        };
        ConfigStream {
            space: self,
            seq,
            rank: start,
            end,
        }
    }

    /// Advances a nondecreasing sequence to its successor in rank order.
    fn advance(&self, seq: &mut Vec<usize>) {
        let n = self.cycles.len();
        match seq.iter().rposition(|&v| v + 1 < n) {
            Some(i) => {
                let v = seq[i] + 1;
                for s in &mut seq[i..] {
                    *s = v;
                }
            }
            None => {
                let k = seq.len() + 1;
                seq.clear();
                seq.resize(k, 0);
            }
        }
    }
}

pub struct ConfigStream<'a> {
    space: &'a ConfigSpace,
    seq: Option<Vec<usize>>,
    rank: u128,
    end: u128,
}

impl ConfigStream<'_> {
    /// Rank of the next configuration to be produced.
    pub fn cursor(&self) -> u128 {
        self.rank
    }
}

impl Iterator for ConfigStream<'_> {
    type Item = ColoringConfig;

    fn next(&mut self) -> Option<ColoringConfig> {
        if self.rank >= self.end {
            return None;
        }
        let seq = self.seq.as_mut()?;
        let out = self.space.config_of(self.rank, seq);
        self.rank += 1;
        if self.rank < self.end {
            self.space.advance(seq);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.rank.min(self.end))
            .try_into()
            .unwrap_or(usize::MAX);
        (left, Some(left))
    }
}

/// How many configurations repeat the coloring of an earlier one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupStats {
    pub total: u64,
    pub distinct: u64,
    pub duplicates: u64,
}

pub fn dedup_stats<I: IntoIterator<Item = ColoringConfig>>(configs: I) -> DedupStats {
    let mut seen = HashSet::new();
    let mut total = 0;
    for c in configs {
        total += 1;
        seen.insert(c.colors);
    }
    let distinct = seen.len() as u64;
    DedupStats {
        total,
        distinct,
        duplicates: total - distinct,
    }
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"HCCK";
const CHECKPOINT_VERSION: u32 = 1;

/// Resumable cursor: magic, version, byte length, little-endian rank.
pub fn write_checkpoint<W: Write>(mut w: W, rank: u128) -> Result<()> {
    let bytes = BigUint::from(rank).to_bytes_le();
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<u128> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)?;
    if &head[..4] != CHECKPOINT_MAGIC {
        return Err(Error::Parse("not a config checkpoint".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let len = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    if len > 64 {
        return Err(Error::Parse("checkpoint rank is implausibly long".into()));
    }
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    BigUint::from_bytes_le(&bytes)
        .to_u128()
        .ok_or_else(|| Error::Parse("checkpoint rank exceeds 128 bits".into()))
}
