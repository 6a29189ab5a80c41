//! Shared fixtures for the benchmarks.

use honeycomb_core::colorings::ConfigSpace;
use honeycomb_core::lattice::build_h;
use honeycomb_core::phase_space::{evaluate_configs, EvalVector};
use honeycomb_core::{Engine, QParam, SpinColor};

/// Every edge of `H_n` colored `c`.
pub fn uniform(n: usize, c: SpinColor) -> Vec<SpinColor> {
    vec![c; build_h(n).expect("n >= 1").edges.len()]
}

/// Classical evaluations of every cycle configuration of `H_n` up to `cmax`.
pub fn patch_evals(n: usize, cmax: usize) -> EvalVector {
    let space = ConfigSpace::for_patch(n, cmax).expect("valid patch");
    let values = evaluate_configs(
        &Engine::shared(QParam::Classical),
        n,
        &space,
        0,
        space.len(),
    )
    .expect("configs evaluate");
    EvalVector::new(values).expect("finite evaluations")
}
