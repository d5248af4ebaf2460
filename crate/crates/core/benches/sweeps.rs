use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subkraus::casestudy::{sweep, SweepConfig};
use subkraus::linalg::Subsystem;
use subkraus::reduction::{reduce_subsystem, Bipartition};
use subkraus::{random, DensityMatrix, Execution, KrausMap};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn case_study_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("case_study_sweep");
    let cfg = SweepConfig::new(0.3, 1.0, 0.3, 1.0, 256).unwrap();
    for mode in MODES {
        group.bench_with_input(
            BenchmarkId::new(format!("{mode:?}"), cfg.steps),
            &cfg,
            |b, cfg| b.iter(|| black_box(sweep(cfg, mode).unwrap())),
        );
    }
    group.finish();
}

fn random_reductions(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let split = Bipartition::new(3, 3).unwrap();
    let batch: Vec<(KrausMap, DensityMatrix)> = (0..64)
        .map(|_| {
            (
                random::kraus_map(&mut rng, 9, 3),
                random::density_matrix(&mut rng, 3),
            )
        })
        .collect();
    let mut group = c.benchmark_group("random_reductions_3x3");
    for mode in MODES {
        group.bench_with_input(
            BenchmarkId::new(format!("{mode:?}"), batch.len()),
            &batch,
            |b, batch| {
                b.iter(|| {
                    mode.map(batch, |(map, rho)| {
                        reduce_subsystem(map, split, rho, Subsystem::First, 1e-12)
                            .unwrap()
                            .eigenvalues[0]
                    })
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, case_study_sweep, random_reductions);
criterion_main!(benches);
