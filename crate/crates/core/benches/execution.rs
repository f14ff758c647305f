use bidepo::grid::{GridSpec, RegionGrid};
use bidepo::linalg::herm_spectrum;
use bidepo::oracle::{numeric_choi, oracle_positive};
use bidepo::{Dims, Execution, PhiParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn positivity_oracle(c: &mut Criterion) {
    let p = PhiParams::new(0.3, -0.4, 0.2, Dims::new(2, 6).unwrap());
    let mut group = c.benchmark_group("oracle_positive");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| oracle_positive(&p, 500, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn grid_sweep(c: &mut Criterion) {
    let spec = GridSpec::cube(Dims::new(2, 6).unwrap(), -1.0, 2.0, 31).unwrap();
    let mut group = c.benchmark_group("grid_sweep");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| RegionGrid::sweep(spec.clone(), exec))
        });
    }
    group.finish();
}

fn choi_spectra(c: &mut Criterion) {
    let points: Vec<PhiParams> = (0..64)
        .map(|k| {
            let t = k as f64 / 64.0;
            PhiParams::new(t - 0.5, 0.5 - t, t, Dims::new(3, 4).unwrap())
        })
        .collect();
    let mut group = c.benchmark_group("choi_spectra");
    group.sample_size(20);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                exec.map_indexed(points.len(), |k| {
                    herm_spectrum(&numeric_choi(&points[k]).unwrap()).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, positivity_oracle, grid_sweep, choi_spectra);
criterion_main!(benches);
