//! Rayon paths against the sequential fallback: elimination, charge analysis and
//! Monte Carlo decoding.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use topocharge::charge::{analyze_charges, ChargeConfig};
use topocharge::decode::{monte_carlo, DecodeConfig, NoiseKind, NoiseModel};
use topocharge::exec::Execution;
use topocharge::fixtures::fixture;
use topocharge::gf2::BitMatrix;
use topocharge::lattice::{generator_matrix, place_all, TorusLattice};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn elimination(c: &mut Criterion) {
    let mut g = c.benchmark_group("rank");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dense: Vec<Vec<bool>> = (0..600).map(|_| (0..1200).map(|_| rng.random_bool(0.5)).collect()).collect();
    let dense = BitMatrix::from_bools(&dense, 1200).unwrap();
    let code = fixture("toric").unwrap();
    let lat = TorusLattice::new(24, 24, code.qubits_per_site);
    let toric = generator_matrix(&lat, &place_all(&lat, &code.stabilizer_recipes));
    for (input, m) in [("random 600x1200", &dense), ("toric 24x24", &toric)] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, input), m, |b, m| b.iter(|| black_box(m.rank_with(exec))));
        }
    }
    g.finish();
}

fn charges(c: &mut Criterion) {
    let mut g = c.benchmark_group("charge analysis");
    g.sample_size(10);
    for fixture_name in ["toric", "subsystem-color"] {
        let code = fixture(fixture_name).unwrap();
        let code = code.coarse_grain(code.normalization_level());
        for (name, exec) in MODES {
            let cfg = ChargeConfig { exec, ..ChargeConfig::default() };
            g.bench_with_input(BenchmarkId::new(name, fixture_name), &code, |b, code| {
                b.iter(|| black_box(analyze_charges(code, &cfg).unwrap().characteristic))
            });
        }
    }
    g.finish();
}

fn decoding(c: &mut Criterion) {
    let mut g = c.benchmark_group("decode toric");
    g.sample_size(10);
    let code = fixture("toric").unwrap();
    let a = analyze_charges(&code, &ChargeConfig::default()).unwrap();
    for (name, exec) in MODES {
        let cfg = DecodeConfig {
            sizes: vec![16],
            noise: NoiseModel::new(NoiseKind::IndependentXz, 0.05).unwrap(),
            trials: 500,
            seed: 7,
            exec,
        };
        g.bench_function(BenchmarkId::new(name, "16x16, 500 trials"), |b| {
            b.iter(|| black_box(monte_carlo(&a, &code, &cfg).unwrap()[0].failures))
        });
    }
    g.finish();
}

criterion_group!(benches, elimination, charges, decoding);
criterion_main!(benches);
