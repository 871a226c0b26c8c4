use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use illusion_core::generators::{grid, random_model};
use illusion_core::partition::partition;
use illusion_core::rng::spin_streams;
use illusion_core::sampler::{chromatic_sweep, greedy_coloring, sequential_sweep, Execution};
use illusion_core::{
    BetaSchedule, ChipConfig, IllusionSystem, InterconnectConfig, Kernel, PartitionSpec,
    SamplerConfig, ScheduleMode, SpinState,
};

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    for side in [32usize, 128] {
        let m = grid(side, side, 1.0);
        let n = m.n();
        let coloring = greedy_coloring(&m);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("sequential", n), &m, |b, m| {
            let mut s = SpinState::all_down(n);
            let mut streams = spin_streams(1, 0..n);
            b.iter(|| sequential_sweep(m, &mut s, 0.44, &mut streams).unwrap());
        });
        for (name, exec) in [
            ("chromatic", Execution::Serial),
            ("chromatic_parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| {
                let mut s = SpinState::all_down(n);
                let mut streams = spin_streams(1, 0..n);
                b.iter(|| chromatic_sweep(m, &mut s, 0.44, &coloring, &mut streams, exec).unwrap());
            });
        }
    }
    group.finish();
}

fn partitioning(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition");
    group.sample_size(20);
    for n in [200usize, 2000] {
        let m = random_model(n, 6.0 / n as f64, 0.0, 3);
        for k in [2usize, 8] {
            group.bench_with_input(BenchmarkId::new(format!("k{k}"), n), &m, |b, m| {
                b.iter(|| partition(black_box(m), &PartitionSpec::new(k)).unwrap());
            });
        }
    }
    group.finish();
}

fn illusion_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("illusion");
    group.sample_size(10);
    let m = grid(64, 64, 1.0);
    let cfg = SamplerConfig::new(Kernel::ChromaticGibbs, BetaSchedule::constant(0.44), 20, 5);
    group.throughput(Throughput::Elements(20 * m.n() as u64));
    for (label, mode, delay) in [
        ("sync", ScheduleMode::Synchronous, 0),
        ("async", ScheduleMode::Asynchronous, 1),
    ] {
        let p = partition(&m, &PartitionSpec::new(4)).unwrap();
        let sys = IllusionSystem::build(
            &m,
            &p,
            &ChipConfig::default(),
            &InterconnectConfig::new(4, delay),
            mode,
        )
        .unwrap();
        group.bench_function(label, |b| b.iter(|| sys.run(&cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sweeps, partitioning, illusion_runs);
criterion_main!(benches);
