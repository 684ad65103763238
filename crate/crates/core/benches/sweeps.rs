use acasimir::acoustics::{design_bandwidth, pressure_profile, AcousticEnvironment, Bandwidth};
use acasimir::mems::{bifurcation_curve, f_dimensionless, LumpedDevice};
use acasimir::{Execution, Tolerance};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn profile(c: &mut Criterion) {
    let band = Bandwidth::new(9e7, 1e8).unwrap();
    let env = AcousticEnvironment::default();
    let tol = Tolerance::default();
    let gaps: Vec<f64> = (0..256).map(|i| 5e-6 + i as f64 * 0.5e-6).collect();
    let mut group = c.benchmark_group("pressure_profile_256");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| pressure_profile(black_box(&gaps), &band, &env, &tol, exec).unwrap())
        });
    }
    group.finish();
}

fn bifurcation(c: &mut Criterion) {
    let dev = LumpedDevice::default();
    let env = AcousticEnvironment::default();
    let band = design_bandwidth(40e-6, 1, 340.0, 0.075).unwrap();
    let tol = Tolerance::default();
    let grid: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
    let mut group = c.benchmark_group("bifurcation_curve_200");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                bifurcation_curve(
                    black_box(&grid),
                    0.2,
                    |x| f_dimensionless(x, &dev, &env, &band, &tol),
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = profile, bifurcation
}
criterion_main!(benches);
