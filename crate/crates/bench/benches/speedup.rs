use cantorspeed::dimension::{ergodic_measures, is_coboundary};
use cantorspeed::speedup::{build_speedup, infinitesimal_speedup, strong_speedup, verify_speedup, CylinderEpimorphism};
use cantorspeed::towers::canonical_towers;
use cantorspeed::CylinderFunction;
use cantorspeed_bench::{atom_set, d2, d2_onto_m11, m2112};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn towers(c: &mut Criterion) {
    let d = m2112();
    let mut g = c.benchmark_group("canonical_towers");
    for n in [2usize, 4, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| canonical_towers(&d, black_box(n))));
    }
    g.finish();
}

fn coboundary(c: &mut Criterion) {
    let d = m2112();
    let f = CylinderFunction::from_fn(&d, 3, |a| (a.index as i64 % 3) - 1);
    c.bench_function("is_coboundary/m2112_level3", |b| b.iter(|| is_coboundary(&d, black_box(&f))));
}

fn strong(c: &mut Criterion) {
    let d = d2();
    let mus = ergodic_measures(&d).unwrap();
    let (a, t) = (atom_set(5, 0, 3), atom_set(5, 0, 17));
    c.bench_function("strong_speedup/d2_level5", |b| b.iter(|| strong_speedup(&d, black_box(&a), black_box(&t))));
    let map = strong_speedup(&d, &a, &t).unwrap();
    c.bench_function("verify_speedup/d2_level5", |b| b.iter(|| verify_speedup(&d, black_box(&map), &mus, Some(&t), &[])));
}

fn infinitesimal(c: &mut Criterion) {
    let d = m2112();
    let mus = ergodic_measures(&d).unwrap();
    let (a, t) = (atom_set(1, 0, 0), atom_set(1, 1, 0));
    let mut g = c.benchmark_group("infinitesimal_speedup");
    g.sample_size(10);
    for depth in [2usize, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &n| {
            b.iter(|| infinitesimal_speedup(&d, &mus, &a, &t, None, n))
        });
    }
    g.finish();
}

fn build(c: &mut Criterion) {
    let id = CylinderEpimorphism::identity(&d2()).unwrap();
    let e = d2_onto_m11();
    let mut g = c.benchmark_group("build_speedup");
    g.sample_size(10);
    g.bench_function("identity_d2_n3", |b| b.iter(|| build_speedup(&id, 3)));
    g.bench_function("d2_onto_m11_n2", |b| b.iter(|| build_speedup(&e, 2)));
    g.finish();
}

criterion_group!(benches, towers, coboundary, strong, infinitesimal, build);
criterion_main!(benches);
