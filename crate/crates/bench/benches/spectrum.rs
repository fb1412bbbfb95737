use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use voltspec::asymptotics::{convergence_study, StudySubject};
use voltspec::modal_sim::{assemble, integrate};
use voltspec::oracle::{augmented_matrix, companion_roots, crosscheck, matrix_eigs};
use voltspec::roots::{full_slice, upper_zero, RootOptions};
use voltspec::symbol::poly_coeffs;
use voltspec_bench::{geometric_kernel, mode, power_law_kernel, probe_point};

fn laplace(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplace");
    for n in [4usize, 64, 10_000] {
        let k = geometric_kernel(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &k, |b, k| {
            b.iter(|| k.laplace(black_box(probe_point())).unwrap())
        });
    }
    group.finish();
}

fn slices(c: &mut Criterion) {
    let opts = RootOptions::default();
    let mut group = c.benchmark_group("full_slice");
    for n in [1usize, 4, 12, 64] {
        let k = geometric_kernel(n);
        let m = mode(30.0, 0.5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &k, |b, k| {
            b.iter(|| full_slice(black_box(&m), k, &opts).unwrap())
        });
    }
    group.finish();

    let (_, k) = power_law_kernel(30_000);
    let m = mode(1e4, 0.3);
    c.bench_function("upper_zero/power_law_30000", |b| {
        b.iter(|| upper_zero(black_box(&m), &k, &opts).unwrap())
    });
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [4usize, 12] {
        let k = geometric_kernel(n);
        let m = mode(10.0, 0.25);
        let poly = poly_coeffs(&m, &k).unwrap();
        let mat = augmented_matrix(&m, &k);
        group.bench_with_input(BenchmarkId::new("companion", n), &poly, |b, p| {
            b.iter(|| companion_roots(p).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("matrix", n), &mat, |b, a| {
            b.iter(|| matrix_eigs(a).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("crosscheck", n), &k, |b, k| {
            b.iter(|| crosscheck(&m, k).unwrap())
        });
    }
    group.finish();
}

fn studies(c: &mut Criterion) {
    let (family, _) = power_law_kernel(1);
    let subject = StudySubject::Family { family, terms: 10_000 };
    let grid = [1e2, 1e3, 1e4];
    c.bench_function("convergence_study/power_law_10000", |b| {
        b.iter(|| convergence_study(black_box(&subject), 0.875, &grid).unwrap())
    });

    let sys = assemble(&mode(1.0, 0.0), &geometric_kernel(4), 1.0, 0.0);
    let dt = sys.max_step().min(1e-2);
    c.bench_function("integrate/n4_T100", |b| {
        b.iter(|| integrate(black_box(&sys), 100.0, dt).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = laplace, slices, oracles, studies
}
criterion_main!(benches);
