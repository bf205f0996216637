use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lmg_core::dicke::EvolveOptions;
use lmg_core::hpboson::{fig4_grid, HpSolver};
use lmg_core::par::Exec;
use lmg_core::semiclassical::{sweep_phase_diagram_with, GridAxis, SecondAxis, SolveMode, SweepSpec};

fn phase_sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        h: 1.0,
        lambda: GridAxis::new(0.0, 3.0, 121),
        second: SecondAxis::GammaDep(GridAxis::new(0.0, 1.0, 21)),
        gamma_b: 0.5,
        gamma_dep: 0.0,
    };
    let mut group = c.benchmark_group("phase_sweep");
    for mode in [SolveMode::Paper, SolveMode::Oracle] {
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(mode.name(), format!("{exec:?}")), &exec, |b, &exec| {
                b.iter(|| sweep_phase_diagram_with(black_box(&spec), mode, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn squeezing_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("squeezing_grid");
    group.sample_size(10);
    let moments = EvolveOptions { t_end: 3.0, dt: 1e-3, samples: 300 };
    let fock = EvolveOptions { t_end: 0.3, dt: 1e-3, samples: 10 };
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::new("moments", format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| fig4_grid(0.0, 1.0, black_box(&moments), HpSolver::Moments, 0, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fock", format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| fig4_grid(0.0, 1.0, black_box(&fock), HpSolver::Fock, 40, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, phase_sweep, squeezing_grid);
criterion_main!(benches);
