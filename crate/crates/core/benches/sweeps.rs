use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bogoliubov::critical::{grand_canonical_samples, EIGHT_PI};
use bogoliubov::freegas::rho_fc;
use bogoliubov::sweep::Execution;
use bogoliubov::thermo::{linspace, phase_diagram, GasModel, ThermoOptions};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grand_canonical(c: &mut Criterion) {
    let ks = linspace(-6.0, 6.0, 241);
    let mut group = c.benchmark_group("grand_canonical_curve");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| grand_canonical_samples(&ks, EIGHT_PI, 0.226, exec).unwrap())
        });
    }
    group.finish();
}

fn phase_grid(c: &mut Criterion) {
    let a = 1e-3;
    let model = GasModel::new(EIGHT_PI, a, ThermoOptions::default()).unwrap();
    model.maxwell().unwrap();
    let rho = (rho_fc(1.0) * 0.8, rho_fc(1.0) * 1.6);
    let mut group = c.benchmark_group("phase_diagram");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| phase_diagram(&model, (0.8, 1.2), rho, (8, 16), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, grand_canonical, phase_grid);
criterion_main!(benches);
