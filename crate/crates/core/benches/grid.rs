use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tomowitness::classical::log_grid;
use tomowitness::lift::{consistency_check, lift_generator, scan_grid};
use tomowitness::{sampling, Execution, LiftStrategy};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grid_scan(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let generator = sampling::random_gksl(3, 2, 1.0, &mut rng);
    let quorum = sampling::random_quorum(3, 4, &mut rng);
    let lifted = lift_generator(&generator, &quorum, LiftStrategy::Pseudoinverse).unwrap();
    let mut group = c.benchmark_group("grid_scan");
    for points in [13, 200] {
        let grid = log_grid(1e-3, 10.0, points);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, points), &grid, |b, grid| {
                b.iter(|| scan_grid(&lifted, grid, 1e-9, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn commuting_square(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let generator = sampling::random_gksl(2, 2, 1.0, &mut rng);
    let quorum = sampling::random_pauli_quorum(&mut rng);
    let states: Vec<_> = (0..50).map(|_| sampling::random_density(2, &mut rng)).collect();
    let grid = log_grid(1e-2, 5.0, 64);
    let mut group = c.benchmark_group("consistency_check");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| consistency_check(&generator, &quorum, LiftStrategy::SectorLocal, &states, &grid, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, grid_scan, commuting_square);
criterion_main!(benches);
