use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use unidisc::par::Execution;
use unidisc::probe::{self, Functional, Grid};
use unidisc::series::{EvalOptions, FunctionId};
use unidisc::zeros::{self, ZeroFamily, ZeroOptions};

const MODES: [(&str, Execution); 2] =
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn zero_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("zero_table_100");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = ZeroOptions { exec, ..ZeroOptions::default() };
        for family in [ZeroFamily::Bessel, ZeroFamily::Phi0] {
            group.bench_with_input(BenchmarkId::new(name, family.name()), &family, |b, &f| {
                b.iter(|| zeros::zeros(f, black_box(0.5), 100, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn probe_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("probe_default_grid");
    let grid = Grid::default();
    let id = FunctionId::bessel_f(0.0);
    let eval = EvalOptions::default();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| probe::probe(&id, Functional::ConvexRe, black_box(&grid), exec, &eval).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, zero_tables, probe_grid);
criterion_main!(benches);
