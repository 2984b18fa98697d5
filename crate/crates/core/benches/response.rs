use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use herd_core::cascade::{filter_response_with, CascadeOptions};
use herd_core::leakage::inband_loss_curve_with;
use herd_core::{prototype_design, Execution, FrequencyGrid};

fn response(c: &mut Criterion) {
    let design = prototype_design().with_sections(16);
    let opts = CascadeOptions::with_mismatch();
    let mut group = c.benchmark_group("filter_response");
    for points in [1_000usize, 100_000] {
        let grid = FrequencyGrid::log(1e8, 145e9, points).unwrap();
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, points), &grid, |b, grid| {
                b.iter(|| filter_response_with(&design, grid, &opts, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn inband(c: &mut Criterion) {
    let design = prototype_design();
    let grid = FrequencyGrid::linear(1e8, 20e9, 100_000).unwrap();
    let mut group = c.benchmark_group("inband_loss_curve");
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| inband_loss_curve_with(&design, &grid, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, response, inband);
criterion_main!(benches);
