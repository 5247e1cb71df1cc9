use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schurlab::gaussian::{sgn_covariance, GaussianSampler};
use schurlab::linalg::{norming_pair, random_complex, schatten_norm};
use schurlab::riesz::riesz_transform;
use schurlab::suite::random_riesz_family;
use schurlab::{estimate_sp_norm, EstimateOptions, Provenance, RieszInstance, SchurSymbol, VectorFamily};

fn schatten(c: &mut Criterion) {
    let mut g = c.benchmark_group("schatten");
    for n in [8, 16, 32] {
        let a = random_complex(n, n, &mut ChaCha8Rng::seed_from_u64(1));
        g.bench_with_input(BenchmarkId::new("norm_p1.5", n), &a, |b, a| {
            b.iter(|| schatten_norm(black_box(a), 1.5).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("norming_p3", n), &a, |b, a| {
            b.iter(|| norming_pair(black_box(a), 3.0).unwrap())
        });
    }
    g.finish();
}

fn rc_norm(c: &mut Criterion) {
    let mut g = c.benchmark_group("rc_norm");
    g.sample_size(20);
    for (n, d) in [(4, 2), (8, 2), (16, 4)] {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let family = random_riesz_family(n, d, true, &mut rng).unwrap();
        let x = random_complex(n, n, &mut rng);
        let xi = riesz_transform(&RieszInstance::new(family, x, 1.5).unwrap()).unwrap();
        for p in [1.5, 3.0] {
            g.bench_with_input(BenchmarkId::new(format!("p{p}"), format!("n{n}_d{d}")), &xi, |b, xi| {
                b.iter(|| xi.rc_norm(p).unwrap())
            });
        }
    }
    g.finish();
}

fn estimator(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_sp_norm");
    g.sample_size(10);
    for n in [4, 8, 16] {
        let m = SchurSymbol::new(
            random_complex(n, n, &mut ChaCha8Rng::seed_from_u64(3)),
            Provenance::new("random"),
        )
        .unwrap();
        g.bench_with_input(BenchmarkId::new("p4", n), &m, |b, m| {
            b.iter(|| estimate_sp_norm(m, 4.0, &EstimateOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn sampler(c: &mut Criterion) {
    let family = VectorFamily::from_real(3, &[vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0]]).unwrap();
    let s = GaussianSampler::new(&family, 4);
    let mut g = c.benchmark_group("gaussian");
    g.sample_size(20);
    g.bench_function("sgn_covariance_1e5", |b| {
        b.iter(|| sgn_covariance(&s, &family, 0, 1, 0, 100_000).unwrap())
    });
    g.finish();
}

criterion_group!(benches, schatten, rc_norm, estimator, sampler);
criterion_main!(benches);
