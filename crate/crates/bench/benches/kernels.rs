use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schauder::levelset::cover_count;
use schauder::stochastic::{bridge_sample, percolation_estimate};
use schauder::{named_schedule, SchauderSeries};

fn takagi(depth: u32) -> SchauderSeries {
    SchauderSeries::from_schedule(named_schedule("takagi", &[]).unwrap(), depth).unwrap()
}

fn grid_eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_grid");
    let t = takagi(30);
    let b = bridge_sample(30, 1).unwrap().series;
    for level in [12u32, 16] {
        g.bench_with_input(BenchmarkId::new("takagi", level), &level, |bch, &l| {
            bch.iter(|| t.eval_grid(black_box(l)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bridge", level), &level, |bch, &l| {
            bch.iter(|| b.eval_grid(black_box(l)).unwrap())
        });
    }
    g.finish();
}

fn level_sets(c: &mut Criterion) {
    let mut g = c.benchmark_group("cover_count");
    g.sample_size(10);
    let t = takagi(30);
    for n in [12u32, 16] {
        g.bench_with_input(BenchmarkId::new("kahane", n), &n, |bch, &n| {
            bch.iter(|| cover_count(&t, black_box(4.0 / 3.0), n).unwrap())
        });
    }
    g.finish();
}

fn percolation(c: &mut Criterion) {
    let mut g = c.benchmark_group("percolation");
    g.sample_size(10);
    g.bench_function("n12_k5_eps0.9_1000", |bch| {
        bch.iter(|| percolation_estimate(12, 5, black_box(0.9), 1000, 1).unwrap())
    });
    g.bench_function("n6_k3_eps0.5_1000", |bch| {
        bch.iter(|| percolation_estimate(6, 3, black_box(0.5), 1000, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, grid_eval, level_sets, percolation);
criterion_main!(benches);
