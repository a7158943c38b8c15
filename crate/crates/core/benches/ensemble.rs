use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use see_deriv::estimators::{probe_norms, MonteCarlo};
use see_deriv::model::{CanonicalDefaults, CanonicalModel};
use see_deriv::simulator::{simulate_ensemble, Simulator, TimeGrid};
use see_deriv::spectral::{DiagonalOperator, SpectralVector};
use see_deriv::Execution;

const N: usize = 32;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn ensembles(c: &mut Criterion) {
    let op = DiagonalOperator::dirichlet_laplacian(N).unwrap();
    let model = CanonicalModel::with_defaults(N, N, &CanonicalDefaults::default()).unwrap();
    let grid = TimeGrid::new(1.0, 128).unwrap();
    let x = SpectralVector::basis(N, 1, 1.0).unwrap();
    let dirs: Vec<SpectralVector> = (1..=2).map(|m| SpectralVector::basis(N, m, 1.0).unwrap()).collect();
    let mut g = c.benchmark_group("ensemble_k2");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_ensemble(&op, &model, &grid, &x, &dirs, 2, 64, 0, exec).unwrap())
        });
    }
    g.finish();
}

fn probes(c: &mut Criterion) {
    let op = DiagonalOperator::dirichlet_laplacian(N).unwrap();
    let model = CanonicalModel::with_defaults(N, N, &CanonicalDefaults::default()).unwrap();
    let sim = Simulator::new(&op, &model, TimeGrid::new(1.0, 128).unwrap()).unwrap();
    let x = SpectralVector::basis(N, 1, 1.0).unwrap();
    let schedule: Vec<Vec<usize>> = [1, 4, 16].iter().map(|&m| vec![m]).collect();
    let mut g = c.benchmark_group("probe_norms_k1");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| probe_norms(&sim, &x, 1, &schedule, MonteCarlo::new(128, 0, exec)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, ensembles, probes);
criterion_main!(benches);
