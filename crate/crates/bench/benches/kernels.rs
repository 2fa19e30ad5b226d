use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use p20_core::atverify::{classify_two_torsion, verify_surface};
use p20_core::ellsurf::Surface;
use p20_core::heckecm::CMRule;
use p20_core::qforms::FormClassGroup;
use p20_core::registry::builtin;

fn surface_count(c: &mut Criterion) {
    let mut g = c.benchmark_group("surface_count");
    g.sample_size(10);
    for name in ["d19", "d7-tate"] {
        let s = Surface::new(builtin(name).unwrap()).unwrap();
        for p in [101u64, 1009, 4001] {
            if !s.good_prime(p) {
                continue;
            }
            g.bench_with_input(BenchmarkId::new(name, p), &p, |b, &p| b.iter(|| s.surface_count(black_box(p)).unwrap()));
        }
    }
    g.finish();
}

fn class_groups(c: &mut Criterion) {
    c.bench_function("class_group/-7392", |b| b.iter(|| FormClassGroup::new(black_box(-7392)).unwrap().class_number()));
    c.bench_function("class_group/-100003", |b| {
        b.iter(|| FormClassGroup::new(black_box(-100_003)).unwrap().elementary_divisors().to_vec())
    });
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    g.bench_function("two_torsion/10000", |b| b.iter(|| classify_two_torsion(black_box(10_000)).len()));
    g.finish();
}

fn verification(c: &mut Criterion) {
    let m = builtin("d19").unwrap();
    let rule = CMRule::new(-19).unwrap();
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("d19/200", |b| b.iter(|| verify_surface(&m, &rule, black_box(200)).unwrap().all_passed()));
    g.finish();
}

criterion_group!(benches, surface_count, class_groups, verification);
criterion_main!(benches);
