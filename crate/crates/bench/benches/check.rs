use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dynscope_bench::{model, ASSERTION};
use dynscope_core::sat::{solve, to_cnf};
use dynscope_core::{check, translate_assertion, Bounds, CheckOptions};
use std::hint::black_box;

fn translate(c: &mut Criterion) {
    let m = model("list_buggy.dal");
    let mut g = c.benchmark_group("translate");
    for unroll in 1..=3 {
        let b = Bounds::new(3, unroll, 4);
        g.bench_with_input(BenchmarkId::from_parameter(unroll), &b, |bench, b| {
            bench.iter(|| translate_assertion(&m, ASSERTION, black_box(b)).unwrap())
        });
    }
    g.finish();
}

fn solve_cnf(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for file in ["list_buggy.dal", "list_fixed.dal"] {
        let m = model(file);
        let p = translate_assertion(&m, ASSERTION, &Bounds::new(3, 3, 4)).unwrap();
        let cnf = to_cnf(&p.circuit, p.root);
        g.bench_function(file, |bench| bench.iter(|| solve(black_box(&cnf))));
    }
    g.finish();
}

fn full_check(c: &mut Criterion) {
    let mut g = c.benchmark_group("check");
    g.sample_size(20);
    for file in ["list_buggy.dal", "list_fixed.dal"] {
        let m = model(file);
        let b = Bounds::new(3, 3, 4);
        g.bench_function(file, |bench| {
            bench.iter(|| check(&m, ASSERTION, &b, &CheckOptions::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, translate, solve_cnf, full_check);
criterion_main!(benches);
