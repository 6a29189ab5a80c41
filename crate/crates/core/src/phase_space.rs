//! Transition probabilities between coloring configurations.
//!
//! The physical inner product of two evaluations is `conj(e_i)·e_j`, so each
//! matrix entry depends only on the two evaluations. Everything here starts
//! from one evaluation per configuration and never re-evaluates per pair.

use std::io::{Read, Write};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colorings::ConfigSpace;
use crate::error::{Error, Result};
use crate::evaluator::evaluate_on;
use crate::recoupling::Engine;
use crate::scalar::{pairwise_sum_f64, QScalar};

pub fn physical_inner_product(e1: &QScalar, e2: &QScalar) -> QScalar {
    e1.conj().mul(e2)
}

/// `|conj(e_i) e_j|^2 / max(|e_i|^4, |e_j|^4)`, and 0 when both vanish.
pub fn transition_entry(ei: &QScalar, ej: &QScalar) -> f64 {
    let num = physical_inner_product(ei, ej).norm_sqr_f64();
    let (a, b) = (ei.norm_sqr_f64(), ej.norm_sqr_f64());
    let den = (a * a).max(b * b);
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// The same entry from squared magnitudes `m = |e|^2`: the numerator is
/// `m_i m_j`, so the entry is `min(m)/max(m) = (min|e| / max|e|)^2`.
pub fn entry_from_magnitudes(mi: f64, mj: f64) -> f64 {
    let (lo, hi) = if mi <= mj { (mi, mj) } else { (mj, mi) };
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

fn exact_entry(mi: &BigRational, mj: &BigRational) -> BigRational {
    let (lo, hi) = if mi <= mj { (mi, mj) } else { (mj, mi) };
    if hi.is_zero() {
        BigRational::zero()
    } else {
        lo / hi
    }
}

/// One evaluation per configuration with cached squared magnitudes.
#[derive(Debug, Clone)]
pub struct EvalVector {
    pub values: Vec<QScalar>,
    pub magnitudes: Vec<f64>,
    /// Exact squared magnitudes when every value is rational.
    pub exact: Option<Vec<BigRational>>,
}

impl EvalVector {
    pub fn new(values: Vec<QScalar>) -> Result<Self> {
        let magnitudes: Vec<f64> = values.iter().map(QScalar::norm_sqr_f64).collect();
        if let Some(i) = magnitudes.iter().position(|m| !m.is_finite()) {
            return Err(Error::InvalidParam(format!("evaluation {i} is not finite")));
        }
        let exact = values
            .iter()
            .map(|v| v.as_exact().map(|r| r * r))
            .collect::<Option<Vec<_>>>();
        Ok(EvalVector {
            values,
            magnitudes,
            exact,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Configurations grouped by equal magnitude, each group in index order,
    /// groups ordered by first index. Exact when possible.
    pub fn magnitude_classes(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        match &self.exact {
            Some(ex) => order.sort_by(|&a, &b| ex[a].cmp(&ex[b]).then(a.cmp(&b))),
            None => order.sort_by(|&a, &b| {
                self.magnitudes[a]
                    .total_cmp(&self.magnitudes[b])
                    .then(a.cmp(&b))
            }),
        }
        let same = |a: usize, b: usize| match &self.exact {
            Some(ex) => ex[a] == ex[b],
            None => self.magnitudes[a] == self.magnitudes[b],
        };
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in order {
            match classes.last_mut() {
                Some(c) if same(c[0], i) && self.magnitudes[i] > 0.0 => c.push(i),
                _ => classes.push(vec![i]),
            }
        }
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

#[derive(Debug, Clone)]
pub enum Storage {
    /// Row-major 32-bit entries.
    Dense(Vec<f32>),
    /// Entries recomputed from the magnitudes on demand.
    Implicit,
}

#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub dim: usize,
    pub storage: Storage,
    magnitudes: Vec<f64>,
    /// Row sums, accumulated in 64 bits from unrounded entries.
    pub s: Vec<f64>,
    /// Exact row sums, when the evaluations were rational.
    pub s_exact: Option<Vec<BigRational>>,
    /// Ranked order: `perm[k]` is the configuration at position `k`.
    pub perm: Vec<usize>,
}

pub const DEFAULT_MATRIX_BUDGET: u64 = 1 << 30;

/// Dense matrix with row sums. Fails if the entries do not fit the budget.
pub fn build_matrix(evals: &EvalVector, budget_bytes: u64) -> Result<TransitionMatrix> {
    let dim = evals.len();
    let needed = (dim as u64).saturating_mul(dim as u64).saturating_mul(4);
    if needed > budget_bytes {
        return Err(Error::StorageBudget {
            needed,
            budget: budget_bytes,
        });
    }
    let m = &evals.magnitudes;
    let mut entries = Vec::with_capacity(dim * dim);
    let mut s = Vec::with_capacity(dim);
    let mut row = vec![0.0f64; dim];
    for i in 0..dim {
        for j in 0..dim {
            row[j] = entry_from_magnitudes(m[i], m[j]);
        }
        s.push(pairwise_sum_f64(&row));
        entries.extend(row.iter().map(|&x| x as f32));
    }
    Ok(TransitionMatrix {
        dim,
        storage: Storage::Dense(entries),
        magnitudes: m.clone(),
        s,
        s_exact: exact_row_sums(evals),
        perm: (0..dim).collect(),
    })
}

/// Row sums without storing the matrix. With magnitudes sorted,
/// `S_i = (1/m_i) Σ_{m_j ≤ m_i} m_j + m_i Σ_{m_j > m_i} 1/m_j`,
/// both sums being prefix and suffix sums. Zero evaluations contribute nothing.
pub fn streaming_row_sums(magnitudes: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..magnitudes.len())
        .filter(|&i| magnitudes[i] > 0.0)
        .collect();
    order.sort_by(|&a, &b| magnitudes[a].total_cmp(&magnitudes[b]));
    let k = order.len();
    // groups of equal magnitude share every sum
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for t in 1..=k {
        if t == k || magnitudes[order[t]] != magnitudes[order[start]] {
            groups.push((start, t));
            start = t;
        }
    }
    let mut below = vec![0.0; groups.len()];
    let mut acc = Neumaier::default();
    for (g, &(a, b)) in groups.iter().enumerate() {
        let m = magnitudes[order[a]];
        acc.add((b - a) as f64 * m);
        below[g] = acc.value();
    }
    let mut above = vec![0.0; groups.len()];
    let mut acc = Neumaier::default();
    for (g, &(a, b)) in groups.iter().enumerate().rev() {
        above[g] = acc.value();
        let m = magnitudes[order[a]];
        acc.add((b - a) as f64 / m);
    }
    let mut s = vec![0.0; magnitudes.len()];
    for (g, &(a, b)) in groups.iter().enumerate() {
        let m = magnitudes[order[a]];
        let v = below[g] / m + m * above[g];
        for &i in &order[a..b] {
            s[i] = v;
        }
    }
    s
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact row sums over the distinct magnitudes, classical evaluations only.
pub fn exact_row_sums(evals: &EvalVector) -> Option<Vec<BigRational>> {
    let ex = evals.exact.as_ref()?;
    let mut distinct: Vec<(BigRational, usize)> = Vec::new();
    let mut sorted = ex.clone();
    sorted.sort();
    for m in sorted {
        match distinct.last_mut() {
            Some((v, c)) if *v == m => *c += 1,
            _ => distinct.push((m, 1)),
        }
    }
    let per_value: Vec<BigRational> = distinct
        .iter()
        .map(|(mi, _)| {
            distinct.iter().fold(BigRational::zero(), |acc, (mj, c)| {
                acc + exact_entry(mi, mj) * BigRational::from_integer((*c).into())
            })
        })
        .collect();
    Some(
        ex.iter()
            .map(|m| {
                let g = distinct.binary_search_by(|(v, _)| v.cmp(m)).unwrap();
                per_value[g].clone()
            })
            .collect(),
    )
}

/// Matrix that stores nothing; entries and row sums come from the magnitudes.
pub fn streaming_matrix(evals: &EvalVector) -> TransitionMatrix {
    TransitionMatrix {
        dim: evals.len(),
        storage: Storage::Implicit,
        magnitudes: evals.magnitudes.clone(),
        s: streaming_row_sums(&evals.magnitudes),
        s_exact: exact_row_sums(evals),
        perm: (0..evals.len()).collect(),
    }
}

impl TransitionMatrix {
    /// Entry in original configuration indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(v) => v[i * self.dim + j] as f64,
            Storage::Implicit => entry_from_magnitudes(self.magnitudes[i], self.magnitudes[j]),
        }
    }

    /// Entry at ranked positions.
    pub fn ranked_entry(&self, a: usize, b: usize) -> f64 {
        self.entry(self.perm[a], self.perm[b])
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }
}

/// Sorts configurations by ascending row sum, ties by index. Uses the exact
/// sums when present.
pub fn rank_states(mut m: TransitionMatrix) -> TransitionMatrix {
    let mut perm: Vec<usize> = (0..m.dim).collect();
    match &m.s_exact {
        Some(ex) => perm.sort_by(|&a, &b| ex[a].cmp(&ex[b]).then(a.cmp(&b))),
        None => perm.sort_by(|&a, &b| m.s[a].total_cmp(&m.s[b]).then(a.cmp(&b))),
    }
    m.perm = perm;
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// Configuration indices in ranked order.
    pub members: Vec<usize>,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPartition {
    pub blocks: Vec<Block>,
}

impl ClassPartition {
    /// Blocks as sorted index sets, sorted by first index.
    pub fn as_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut v = b.members.clone();
                v.sort();
                v
            })
            .collect();
        sets.sort_by_key(|v| v[0]);
        sets
    }
}

/// Maximal runs of the ranked order whose pairwise entries are all at least
/// `1 - tol`. Fails if a block's row sums disagree by more than `tol`
/// relative.
pub fn detect_blocks(m: &TransitionMatrix, tol: f64) -> Result<ClassPartition> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    let close = |run: &mut Vec<usize>, blocks: &mut Vec<Block>| -> Result<()> {
        if run.is_empty() {
            return Ok(());
        }
        let ss: Vec<f64> = run.iter().map(|&i| m.s[i]).collect();
        let lo = ss.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ss.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > tol * hi.abs().max(1.0) {
            return Err(Error::Invariant(format!(
                "block starting at configuration {} has row sums spread over [{lo}, {hi}]",
                run[0]
            )));
        }
        blocks.push(Block {
            members: std::mem::take(run),
            s: ss[0],
        });
        Ok(())
    };
    for k in 0..m.dim {
        let i = m.perm[k];
        let joins = !run.is_empty()
            && run
                .iter()
                .all(|&j| m.entry(i, j) >= 1.0 - tol && m.entry(j, i) >= 1.0 - tol);
        if !joins {
            close(&mut run, &mut blocks)?;
        }
        run.push(i);
    }
    close(&mut run, &mut blocks)?;
    Ok(ClassPartition { blocks })
}

/// Largest spread of exact row sums inside any block; zero when blocks are
/// genuine classes.
pub fn exact_block_spread(m: &TransitionMatrix, p: &ClassPartition) -> Option<BigRational> {
    let ex = m.s_exact.as_ref()?;
    let mut worst = BigRational::zero();
    for b in &p.blocks {
        let lo = b.members.iter().map(|&i| &ex[i]).min()?;
        let hi = b.members.iter().map(|&i| &ex[i]).max()?;
        let d = hi - lo;
        if d > worst {
            worst = d;
        }
    }
    Some(worst)
}

/// True when every entry outside the blocks is below one and every entry
/// inside is exactly one, checked in exact arithmetic when available.
pub fn is_exactly_block_diagonal(evals: &EvalVector, p: &ClassPartition) -> bool {
    let mut block_of = vec![usize::MAX; evals.len()];
    for (b, blk) in p.blocks.iter().enumerate() {
        for &i in &blk.members {
            block_of[i] = b;
        }
    }
    let one = BigRational::one();
    for i in 0..evals.len() {
        for j in 0..evals.len() {
            let unit = match &evals.exact {
                Some(ex) => exact_entry(&ex[i], &ex[j]) == one,
                None => entry_from_magnitudes(evals.magnitudes[i], evals.magnitudes[j]) == 1.0,
            };
            if unit != (block_of[i] == block_of[j] && evals.magnitudes[i] > 0.0) {
                return false;
            }
        }
    }
    true
}

const MATRIX_MAGIC: &[u8; 4] = b"HCTM";
const MATRIX_VERSION: u32 = 1;

/// Header, then row-major little-endian f32 entries in ranked order.
pub fn write_matrix<W: Write>(mut w: W, m: &TransitionMatrix) -> Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&MATRIX_VERSION.to_le_bytes())?;
    w.write_all(&(m.dim as u64).to_le_bytes())?;
    let mut row = Vec::with_capacity(m.dim * 4);
    for a in 0..m.dim {
        row.clear();
        for b in 0..m.dim {
            row.extend_from_slice(&(m.ranked_entry(a, b) as f32).to_le_bytes());
        }
        w.write_all(&row)?;
    }
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<(usize, Vec<f32>)> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if &head[..4] != MATRIX_MAGIC {
        return Err(Error::Parse("not a transition matrix file".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != MATRIX_VERSION {
        return Err(Error::Parse(format!(
            "unsupported matrix version {version}"
        )));
    }
    let dim = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != dim * dim * 4 {
        return Err(Error::Parse(format!(
            "matrix body has {} bytes, expected {}",
            bytes.len(),
            dim * dim * 4
        )));
    }
    let entries = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((dim, entries))
}

#[derive(Serialize)]
struct RankRow {
    position: usize,
    config: usize,
    s: f64,
    s_exact: Option<String>,
    magnitude: f64,
}

fn rank_rows(m: &TransitionMatrix) -> Vec<RankRow> {
    m.perm
        .iter()
        .enumerate()
        .map(|(position, &config)| RankRow {
            position,
            config,
            s: m.s[config],
            s_exact: m.s_exact.as_ref().map(|ex| ex[config].to_string()),
            magnitude: m.magnitudes[config],
        })
        .collect()
}

/// Ranking as CSV: ranked position, configuration, S, exact S, |e|^2.
pub fn ranking_csv(m: &TransitionMatrix) -> String {
    let mut out = String::from("position,config,s,s_exact,magnitude_sq\n");
    for r in rank_rows(m) {
        out.push_str(&format!(
            "{},{},{:.17e},{},{:.17e}\n",
            r.position,
            r.config,
            r.s,
            r.s_exact.unwrap_or_default(),
            r.magnitude
        ));
    }
    out
}

pub fn ranking_json(m: &TransitionMatrix, blocks: &ClassPartition) -> Result<String> {
    #[derive(Serialize)]
    struct Out<'a> {
        dim: usize,
        ranking: Vec<RankRow>,
        blocks: &'a [Block],
    }
    Ok(serde_json::to_string_pretty(&Out {
        dim: m.dim,
        ranking: rank_rows(m),
        blocks: &blocks.blocks,
    })?)
}

pub fn blocks_csv(p: &ClassPartition) -> String {
    let mut out = String::from("block,size,s,members\n");
    for (b, blk) in p.blocks.iter().enumerate() {
        let members: Vec<String> = blk.members.iter().map(usize::to_string).collect();
        out.push_str(&format!(
            "{b},{},{:.17e},{}\n",
            blk.members.len(),
            blk.s,
            members.join(" ")
        ));
    }
    out
}

/// Grayscale P5 image of the ranked matrix, white for 1. Larger matrices are
/// averaged down to at most `max_side` pixels a side.
pub fn heatmap_pgm(m: &TransitionMatrix, max_side: usize) -> Vec<u8> {
    let side = m.dim.min(max_side.max(1));
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    if side == 0 {
        return out;
    }
    let span = |p: usize| {
        (
            p * m.dim / side,
            ((p + 1) * m.dim / side).max(p * m.dim / side + 1),
        )
    };
    for py in 0..side {
        let (r0, r1) = span(py);
        for px in 0..side {
            let (c0, c1) = span(px);
            let mut acc = 0.0;
            for a in r0..r1 {
                for b in c0..c1 {
                    acc += m.ranked_entry(a, b);
                }
            }
            let mean = acc / ((r1 - r0) * (c1 - c0)) as f64;
            out.push((mean.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    out
}

/// Relative difference of two row-sum vectors, the worst entry.
pub fn max_relative_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Order-insensitive comparison used when checking partitions.
pub fn same_partition(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    let norm = |p: &[Vec<usize>]| {
        let mut v: Vec<Vec<usize>> = p
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort();
                s
            })
            .collect();
        v.sort();
        v
    };
    norm(a) == norm(b)
}

/// Evaluates configurations `start..end` of a space on `H_n`, split into
/// rank chunks that rayon works through in parallel. Output order is rank
/// order whatever the thread count.
pub fn evaluate_configs(
    engine: &Engine,
    n: usize,
    space: &ConfigSpace,
    start: u128,
    end: u128,
) -> Result<Vec<QScalar>> {
    const CHUNK: u128 = 512;
    let end = end.min(space.len());
    let starts: Vec<u128> = (0..)
        .map(|k| start + k * CHUNK)
        .take_while(|&s| s < end)
        .collect();
    let chunks: Vec<Vec<QScalar>> = starts
        .par_iter()
        .map(|&s| {
            space
                .range(s, (s + CHUNK).min(end))
                .map(|c| evaluate_on(engine, n, &c.colors))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
