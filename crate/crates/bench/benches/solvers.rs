use criterion::{criterion_group, criterion_main, Criterion};
use qbrown_bench::{cold_params, gaussian, harmonic_params};
use qbrown_core::dispersion_models::log_time_grid;
use qbrown_core::{
    eigen_density, evolve, imaginary_time_density, solve_overdamped_full, EvolveSpec, Grid1D,
    ImaginaryTimeConfig, PdeModel, PhysicalParams, PicardConfig, PotentialSpec,
};

fn dispersion(c: &mut Criterion) {
    let p = PhysicalParams::natural();
    let times = log_time_grid(1e-4, 10.0, 10);
    let betas = qbrown_core::dispersion_models::default_beta_grid(&p).unwrap();
    let cfg = PicardConfig::default();
    c.bench_function("overdamped_full_default_grid", |b| {
        b.iter(|| solve_overdamped_full(&p, &times, &betas, &cfg).unwrap())
    });
}

fn pde(c: &mut Criterion) {
    let p = cold_params(100.0);
    let rho = gaussian(4.0, 241, 0.04);
    let spec = EvolveSpec {
        record_every: 1000,
        ..EvolveSpec::new(PdeModel::QuantumZeroTSmoluchowski, PotentialSpec::Free, 0.01)
    };
    c.bench_function("quantum_smoluchowski_241_nodes", |b| b.iter(|| evolve(&rho, &spec, &p).unwrap()));
}

fn equilibrium(c: &mut Criterion) {
    let p = harmonic_params(2.0);
    let u = PotentialSpec::Harmonic { omega0: 1.0 };
    let grid = Grid1D::centered(0.0, 8.0, 201).unwrap();
    let cfg = ImaginaryTimeConfig::new(2.0, grid);
    let mut group = c.benchmark_group("equilibrium_201_nodes");
    group.sample_size(10);
    group.bench_function("imaginary_time", |b| b.iter(|| imaginary_time_density(&u, &p, &cfg).unwrap()));
    group.bench_function("eigen", |b| b.iter(|| eigen_density(&u, &p, 2.0, grid, None).unwrap()));
    group.finish();
}

criterion_group!(benches, dispersion, pde, equilibrium);
criterion_main!(benches);
