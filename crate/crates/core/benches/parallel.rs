//! Parallel lane vs sequential lane on the crate's hot loops.
//!
//! With the default `parallel` feature the `par` helpers run on rayon;
//! their `_seq` twins always run sequentially, so each group pits the
//! two lanes against each other on the same closure. Build with
//! `--no-default-features` to confirm the fallback compiles to the same
//! numbers as the `_seq` lane.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use zdm_core::encoder::circle_distance;
use zdm_core::encoder::psi::tent;
use zdm_core::markers::{find_marker, verify_marker};
use zdm_core::par;
use zdm_core::symbolic::{FrequencyTable, Shape, Subshift};

const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

fn quadrature_sum(c: &mut Criterion) {
    let nodes = 200_000usize;
    let score = |j: usize| {
        let x = (j as f64 * SILVER).rem_euclid(1.0);
        tent(circle_distance(x, 0.25), 0.14, 0.015)
    };
    let mut group = c.benchmark_group("quadrature_sum");
    group.bench_function("parallel", |b| {
        b.iter(|| par::sum_indexed(nodes, score));
    });
    group.bench_function("sequential", |b| {
        b.iter(|| par::sum_indexed_seq(nodes, score));
    });
    group.finish();
}

fn window_frequency_tables(c: &mut Criterion) {
    let fib = Subshift::fibonacci();
    let row = fib.generic_row(48 * 64 + 2048).unwrap();
    let windows: Vec<_> = (0..48)
        .map(|i| {
            let start = i * 64;
            zdm_core::symbolic::ArrayWindow::single_row(
                fib.alphabet().clone(),
                0,
                row[start..start + 2048].to_vec(),
            )
            .unwrap()
        })
        .collect();
    let shapes = [Shape::new(1, 1), Shape::new(1, 2), Shape::new(1, 3)];
    let table_of = |w: &zdm_core::symbolic::ArrayWindow| {
        FrequencyTable::empirical(w, &shapes).unwrap()
    };
    let mut group = c.benchmark_group("window_frequency_tables");
    group.bench_function("parallel", |b| {
        b.iter(|| par::map_slice(&windows, table_of));
    });
    group.bench_function("sequential", |b| {
        b.iter(|| par::map_slice_seq(&windows, table_of));
    });
    group.finish();
}

fn language_enumeration(c: &mut Criterion) {
    c.bench_function("fibonacci_language_16", |b| {
        b.iter_batched(
            Subshift::fibonacci,
            |fib| fib.language(16).unwrap().len(),
            BatchSize::SmallInput,
        );
    });
}

fn marker_checks(c: &mut Criterion) {
    let fib = Subshift::fibonacci();
    let marker = find_marker(&fib, 4, 8).unwrap();
    c.bench_function("verify_marker_fib_n4", |b| {
        b.iter(|| verify_marker(&fib, &marker.words, 4, 16).unwrap());
    });
    c.bench_function("find_marker_fib_n4", |b| {
        b.iter_batched(
            Subshift::fibonacci,
            |fresh| find_marker(&fresh, 4, 8).unwrap(),
            BatchSize::SmallInput,
        );
    });
}

criterion_group!(
    benches,
    quadrature_sum,
    window_frequency_tables,
    language_enumeration,
    marker_checks
);
criterion_main!(benches);
