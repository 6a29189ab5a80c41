//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 5 and 8 each contain a sub-check whose stated number contradicts
//! the definitions it is derived from. Those are implemented literally and
//! reported as FAIL with both values; they do not fail the process unless
//! `HONEYCOMB_ACCEPTANCE_STRICT` is set. Any other failure exits nonzero.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use honeycomb_core::colorings::{config_count, enumerate_cycles, ConfigSpace};
use honeycomb_core::evaluator::{build_trace, evaluate, summation_count};
use honeycomb_core::lattice::{build_h, EdgeColoring, HoneycombNet};
use honeycomb_core::phase_space::{
    build_matrix, detect_blocks, evaluate_configs, exact_block_spread, is_exactly_block_diagonal,
    max_relative_diff, rank_states, same_partition, streaming_matrix, transition_entry, EvalVector,
    DEFAULT_MATRIX_BUDGET,
};
use honeycomb_core::tl_oracle::oracle_evaluate;
use honeycomb_core::{Engine, QParam, QScalar};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria with a sub-check that cannot hold alongside the rest of the
/// definitions; see the module docs.
const KNOWN_CONFLICTS: [usize; 2] = [5, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    outcome(false, detail)
}

fn admissible_colorings(net: &HoneycombNet, max: u32) -> Vec<Vec<u32>> {
    let s = net.smoothing();
    let base = max as u64 + 1;
    let mut out = Vec::new();
    for code in 0..base.pow(s.chains.len() as u32) {
        let mut c = code;
        let mut colors = vec![0; net.edges.len()];
        for chain in &s.chains {
            let v = (c % base) as u32;
            c /= base;
            for &e in &chain.edges {
                colors[e] = v;
            }
        }
        if net
            .check_coloring(&EdgeColoring::new(colors.clone()), QParam::Classical)
            .is_ok()
        {
            out.push(colors);
        }
    }
    out
}

fn closed_forms() -> Outcome {
    match common::closed_forms_vs_oracle(4) {
        Ok(n) => outcome(
            true,
            format!("{n} loop/theta/tet tuples with colors <= 4 agree exactly"),
        ),
        Err(e) => fail(e),
    }
}

fn bubble_and_schur() -> Outcome {
    let bubble = match common::bubble_move_holds(3) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    match common::schur_holds(3) {
        Ok(s) => outcome(
            true,
            format!("bubble move on {bubble} colorings, Schur on {s}, colors <= 3"),
        ),
        Err(e) => fail(e),
    }
}

fn pentagon_and_orthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = QParam::RootOfUnity(10);
    let runs = [
        (
            "orthogonality exact",
            common::orthogonality::<BigRational, _>(QParam::Classical, 100, 6, 0.0, &mut rng),
        ),
        (
            "pentagon exact",
            common::pentagon::<BigRational, _>(QParam::Classical, 100, 6, 0.0, &mut rng),
        ),
        (
            "orthogonality r=10",
            common::orthogonality::<Complex64, _>(q, 100, 6, 1e-8, &mut rng),
        ),
        (
            "pentagon r=10",
            common::pentagon::<Complex64, _>(q, 100, 6, 1e-8, &mut rng),
        ),
    ];
    let mut parts = Vec::new();
    for (name, r) in runs {
        match r {
            Ok(n) => parts.push(format!("{name} {n}")),
            Err(e) => return fail(format!("{name}: {e}")),
        }
    }
    outcome(true, parts.join(", "))
}

fn crown_vs_oracle() -> Outcome {
    let p = QParam::Classical;
    let mut counts = Vec::new();
    let mut run = |n: usize, colorings: Vec<Vec<u32>>| -> Result<(), String> {
        let net = build_h(n).map_err(|e| e.to_string())?;
        let planar = net.to_planar().map_err(|e| e.to_string())?;
        for c in &colorings {
            let a = evaluate(&net, &EdgeColoring::new(c.clone()), p).map_err(|e| e.to_string())?;
            let b = oracle_evaluate(&planar, c, p).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("H{n} {c:?}: evaluate {a}, oracle {b}"));
            }
        }
        counts.push(format!("H{n}: {}", colorings.len()));
        Ok(())
    };
    let outcome_of = |r: Result<(), String>| r.err();
    for n in 1..=2 {
        let net = build_h(n).unwrap();
        if let Some(e) = outcome_of(run(n, admissible_colorings(&net, 2))) {
            return fail(e);
        }
    }
    let mut h3 = admissible_colorings(&build_h(3).unwrap(), 1);
    h3.shuffle(&mut ChaCha8Rng::seed_from_u64(4));
    h3.truncate(20);
    if let Some(e) = outcome_of(run(3, h3)) {
        return fail(e);
    }
    outcome(true, format!("exact agreement ({})", counts.join(", ")))
}

fn counts() -> Outcome {
    let mut got = Vec::new();
    for (n, want) in [(2, 14), (3, 280), (4, 18_370)] {
        match enumerate_cycles(n) {
            Ok(c) if c.len() == want => got.push(format!("n={n}: {}", c.len())),
            Ok(c) => return fail(format!("n={n}: {} cycles, expected {want}", c.len())),
            Err(e) => return fail(e.to_string()),
        }
    }
    let small = config_count(280, 2);
    if small != BigUint::from(39_620u32) {
        return fail(format!("config_count(280, 2) = {small}, expected 39620"));
    }
    let stated = BigUint::from(168_737_635u64);
    let big = config_count(18_370, 2);
    let detail = format!(
        "cycles {}; config_count(280, 2) = 39620; config_count(18370, 2) = {big}, stated {stated}",
        got.join(", ")
    );
    if big == stated {
        outcome(true, detail)
    } else {
        fail(format!(
            "{detail}. The stated value is the number of size-2 multisets alone; the same formula gives 39620 for 280 cycles, so no reading satisfies both"
        ))
    }
}

fn summation_counts() -> Outcome {
    let mut parts = Vec::new();
    for n in 3..=4 {
        let trace = match build_trace(n) {
            Ok(t) => t,
            Err(e) => return fail(e.to_string()),
        };
        let recorded = trace.total_indices();
        let rec = summation_count(n - 1).unwrap() + 2 * n - 5;
        if recorded != rec || recorded != summation_count(n).unwrap() {
            return fail(format!(
                "n={n}: trace has {recorded} summed indices, recursion gives {rec}"
            ));
        }
        parts.push(format!("a_{n} = {recorded}"));
    }
    outcome(true, parts.join(", "))
}

fn patch_evals(n: usize, cmax: usize) -> Result<EvalVector, String> {
    let space = ConfigSpace::for_patch(n, cmax).map_err(|e| e.to_string())?;
    let values = evaluate_configs(
        &Engine::shared(QParam::Classical),
        n,
        &space,
        0,
        space.len(),
    )
    .map_err(|e| e.to_string())?;
    EvalVector::new(values).map_err(|e| e.to_string())
}

fn block_structure() -> Outcome {
    let evals = match patch_evals(2, 2) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let m = match build_matrix(&evals, DEFAULT_MATRIX_BUDGET) {
        Ok(m) => rank_states(m),
        Err(e) => return fail(e.to_string()),
    };
    let blocks = match detect_blocks(&m, 1e-9) {
        Ok(b) => b,
        Err(e) => return fail(e.to_string()),
    };
    if !same_partition(&blocks.as_sets(), &evals.magnitude_classes()) {
        return fail("detected blocks differ from the equal-magnitude classes");
    }
    if !is_exactly_block_diagonal(&evals, &blocks) {
        return fail("entries are not exactly one inside blocks and below one outside");
    }
    match exact_block_spread(&m, &blocks) {
        Some(s) if s.is_zero() => {}
        Some(s) => return fail(format!("exact row-sum spread inside a block is {s}")),
        None => return fail("no exact row sums"),
    }
    outcome(
        true,
        format!(
            "{} configs, {} blocks, exact intra-block spread 0",
            evals.len(),
            blocks.blocks.len()
        ),
    )
}

fn random_value<R: Rng>(rng: &mut R) -> QScalar {
    match rng.gen_range(0..4) {
        0 => QScalar::from_int(0),
        1 => QScalar::from_int(rng.gen_range(-30..=30)),
        _ => QScalar::Float(Complex64::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        )),
    }
}

fn transition_entries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut literal_misses = 0;
    let mut worst_literal = 0.0f64;
    for _ in 0..1000 {
        let (ei, ej) = (random_value(&mut rng), random_value(&mut rng));
        let a = transition_entry(&ei, &ej);
        let (mi, mj) = (ei.norm_sqr_f64(), ej.norm_sqr_f64());
        // the definition, evaluated directly
        let direct = if mi == 0.0 || mj == 0.0 {
            0.0
        } else {
            ei.conj().mul(&ej).norm_sqr_f64() / (mi * mi).max(mj * mj)
        };
        if (a - direct).abs() > 1e-12 {
            return fail(format!(
                "entry {a} differs from its definition {direct} for {ei}, {ej}"
            ));
        }
        let literal = if mi == 0.0 || mj == 0.0 {
            0.0
        } else {
            (mi.min(mj) / mi.max(mj)).powi(2)
        };
        if (a - literal).abs() > 1e-12 {
            literal_misses += 1;
            worst_literal = worst_literal.max((a - literal).abs());
        }
    }
    let evals = match patch_evals(2, 2) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let m = match build_matrix(&evals, DEFAULT_MATRIX_BUDGET) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    for i in 0..m.dim {
        let diag = if evals.values[i].is_zero() { 0.0 } else { 1.0 };
        if m.entry(i, i) != diag {
            return fail(format!("diagonal entry {i} is {}", m.entry(i, i)));
        }
        for j in 0..m.dim {
            let a = m.entry(i, j);
            if a != m.entry(j, i) || !(0.0..=1.0).contains(&a) {
                return fail(format!("entry ({i}, {j}) = {a} breaks symmetry or range"));
            }
        }
    }
    let detail = format!(
        "1000 pairs match |conj(e_i) e_j|^2 / max(|e_i|^4, |e_j|^4) = min(|e|^2)/max(|e|^2) to 1e-12; \
         diagonal 1 (0 for null states), symmetric, in [0, 1] on the {0}x{0} matrix",
        m.dim
    );
    if literal_misses == 0 {
        outcome(true, detail)
    } else {
        fail(format!(
            "{detail}. The stated form (min(|e|^2)/max(|e|^2))^2 disagrees on {literal_misses}/1000 pairs \
             (max gap {worst_literal:.3}); it squares the reduced ratio once more than the definition does"
        ))
    }
}

fn streaming() -> Outcome {
    let evals = match patch_evals(2, 2) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let dense = match build_matrix(&evals, DEFAULT_MATRIX_BUDGET) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    let stream = streaming_matrix(&evals);
    let diff = max_relative_diff(&dense.s, &stream.s);
    if diff > 1e-9 {
        return fail(format!("streaming and dense row sums differ by {diff:e}"));
    }
    let big = match patch_evals(2, 6) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let m = streaming_matrix(&big);
    if m.is_dense() || m.dim != 38_759 || !m.s.iter().all(|s| s.is_finite()) {
        return fail(format!(
            "streaming run over {} configs did not produce finite row sums",
            m.dim
        ));
    }
    outcome(
        true,
        format!(
            "max relative diff {diff:.1e} on 119 configs; {} row sums streamed without a matrix",
            m.dim
        ),
    )
}

fn quantum_limit() -> Outcome {
    let net = build_h(2).unwrap();
    let mut all: Vec<Vec<u32>> = admissible_colorings(&net, 2);
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(10));
    let mut worst = 0.0f64;
    let mut used = 0;
    for c in &all {
        let coloring = EdgeColoring::new(c.clone());
        let classical = evaluate(&net, &coloring, QParam::Classical).unwrap();
        if classical.is_zero() {
            continue;
        }
        let quantum = match evaluate(&net, &coloring, QParam::RootOfUnity(1_000_000)) {
            Ok(q) => q,
            Err(e) => return fail(e.to_string()),
        };
        let rel = quantum.relative_diff(&classical);
        worst = worst.max(rel);
        if rel > 1e-6 {
            return fail(format!("{c:?}: quantum {quantum}, classical {classical}"));
        }
        used += 1;
        if used == 10 {
            break;
        }
    }
    if used < 10 {
        return fail(format!("only {used} nonzero colorings available"));
    }
    outcome(
        true,
        format!("10 H2 colorings at r = 10^6, max relative diff {worst:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed forms vs oracle", closed_forms),
        ("bubble move and Schur", bubble_and_schur),
        ("pentagon and orthogonality", pentagon_and_orthogonality),
        ("crown reduction vs oracle", crown_vs_oracle),
        ("cycle and configuration counts", counts),
        ("summation-count recursion", summation_counts),
        ("block structure n=2 cmax=2", block_structure),
        ("transition entries", transition_entries),
        ("streaming row sums", streaming),
        ("quantum/classical limit", quantum_limit),
    ];
    let strict = std::env::var_os("HONEYCOMB_ACCEPTANCE_STRICT").is_some();
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let t = Instant::now();
        let o = run();
        let secs = t.elapsed().as_secs_f64();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} [{secs:7.2}s] {name}: {}", o.detail);
        if !o.pass {
            failed.push(id);
        }
    }
    let unexpected: Vec<usize> = failed
        .iter()
        .copied()
        .filter(|id| strict || !KNOWN_CONFLICTS.contains(id))
        .collect();
    println!(
        "{} passed, {} failed {:?}; {} unexplained",
        10 - failed.len(),
        failed.len(),
        failed,
        unexpected.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
