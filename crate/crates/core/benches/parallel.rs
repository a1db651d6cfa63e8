//! Sequential versus rayon execution of the data-parallel kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use routed::circuit::examples::{random_circuit, trajectories};
use routed::circuit::Algorithm;
use routed::par::Exec;
use routed::{sample, Mode};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn accessible(c: &mut Criterion) {
    let mut group = c.benchmark_group("accessible_by_definition");
    for n in [3, 4] {
        let circuit = trajectories(&mut ChaCha8Rng::seed_from_u64(1), n, 2);
        let slice: Vec<String> = (0..n).map(routed::circuit::examples::line_name).collect();
        let slice: Vec<&str> = slice.iter().map(String::as_str).collect();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| {
                    black_box(
                        circuit
                            .accessible_space(&slice, Algorithm::Definition, exec)
                            .unwrap(),
                    )
                })
            });
        }
    }
    group.finish();
}

fn sampled_isometries(c: &mut Criterion) {
    let mut group = c.benchmark_group("isometry_trials");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                exec.trials(64, 7, |_, rng| {
                    let a = sample::random_space(rng, 3, 3);
                    let z = sample::random_space(rng, 3, 4);
                    let route = sample::random_relation(rng, a.labels(), z.labels(), 0.6);
                    sample::random_practical_isometry(rng, &route, &a, &z)
                        .map(|f| f.isometry_defect())
                })
            })
        });
    }
    group.finish();
}

fn foliations(c: &mut Criterion) {
    let mut group = c.benchmark_group("circuit_evaluation_trials");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                exec.trials(16, 3, |_, rng| {
                    let circuit = random_circuit(rng, 5, Mode::Cpm);
                    black_box(circuit.evaluate().unwrap());
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, accessible, sampled_isometries, foliations);
criterion_main!(benches);
