use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use honeycomb_bench::{patch_evals, uniform};
use honeycomb_core::colorings::enumerate_cycles;
use honeycomb_core::evaluator::{build_trace, evaluate_on, replay};
use honeycomb_core::phase_space::{build_matrix, streaming_row_sums, DEFAULT_MATRIX_BUDGET};
use honeycomb_core::{Engine, QParam, Recoupling};
use num_rational::BigRational;

fn recoupling(c: &mut Criterion) {
    c.bench_function("tet colors<=6, cold memo", |b| {
        b.iter_batched(
            || Recoupling::<BigRational>::new(QParam::Classical),
            |eng| {
                for a in 0..=6 {
                    black_box(eng.tet(a, 6, 6, a, 6, 6));
                }
            },
            BatchSize::SmallInput,
        )
    });
    let warm = Recoupling::<BigRational>::new(QParam::Classical);
    c.bench_function("tet colors<=6, warm memo", |b| {
        b.iter(|| {
            for a in 0..=6 {
                black_box(warm.tet(a, 6, 6, a, 6, 6));
            }
        })
    });
}

fn evaluation(c: &mut Criterion) {
    for (n, col) in [(2, 4), (3, 2), (4, 2)] {
        let colors = uniform(n, col);
        c.bench_function(&format!("evaluate H{n} uniform {col}, fresh engine"), |b| {
            b.iter(|| {
                let e = Engine::fresh(QParam::Classical, true);
                black_box(evaluate_on(&e, n, &colors).unwrap())
            })
        });
    }
    let colors = uniform(3, 2);
    let trace = build_trace(3).unwrap();
    c.bench_function("replay H3 uniform 2", |b| {
        b.iter(|| black_box(replay(&trace, &colors, QParam::Classical).unwrap()))
    });
    let q = uniform(3, 2);
    c.bench_function("evaluate H3 uniform 2 at r=10", |b| {
        b.iter(|| {
            let e = Engine::fresh(QParam::RootOfUnity(10), true);
            black_box(evaluate_on(&e, 3, &q).unwrap())
        })
    });
}

fn phase_space(c: &mut Criterion) {
    c.bench_function("enumerate cycles H4", |b| {
        b.iter(|| black_box(enumerate_cycles(4).unwrap().len()))
    });
    let small = patch_evals(2, 2);
    c.bench_function("dense matrix n=2 cmax=2", |b| {
        b.iter(|| black_box(build_matrix(&small, DEFAULT_MATRIX_BUDGET).unwrap().dim))
    });
    let large = patch_evals(2, 6);
    c.bench_function("streaming row sums n=2 cmax=6", |b| {
        b.iter(|| black_box(streaming_row_sums(&large.magnitudes)))
    });
}

criterion_group!(benches, recoupling, evaluation, phase_space);
criterion_main!(benches);
