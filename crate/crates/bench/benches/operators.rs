use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fockops_bench::{amplitudes, label};
use fockops_core::coherent::{displacement, u_element_closed};
use fockops_core::quadrature::{conjecture_integral, DiskGrid};
use fockops_core::schwinger::paris_residual;
use fockops_core::su11::{decomposition_residual, v_element_closed, v_operator};
use fockops_core::{SpinWeight, TruncatedSpace};
use num_complex::Complex64;

fn exponentials(c: &mut Criterion) {
    let mut g = c.benchmark_group("exponentials");
    g.sample_size(10);
    let single = TruncatedSpace::single_mode(256).unwrap();
    let spin = TruncatedSpace::spin_k(256, 2.5).unwrap();
    for z in amplitudes() {
        g.bench_with_input(
            BenchmarkId::new("displacement_256", label(z)),
            &z,
            |b, &z| b.iter(|| displacement(&single, black_box(z)).unwrap()),
        );
        g.bench_with_input(BenchmarkId::new("v_operator_256", label(z)), &z, |b, &z| {
            b.iter(|| v_operator(&spin, black_box(z)).unwrap())
        });
    }
    g.finish();
}

fn closed_forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("closed_forms");
    let spin = SpinWeight::new(2.5).unwrap();
    let z = Complex64::new(1.0, -0.5);
    g.bench_function("u_block_31", |b| {
        b.iter(|| {
            (0..31)
                .flat_map(|n| (0..31).map(move |m| (n, m)))
                .map(|(n, m)| u_element_closed(n, m, black_box(z)).norm())
                .sum::<f64>()
        })
    });
    g.bench_function("v_block_21", |b| {
        b.iter(|| {
            (0..21)
                .flat_map(|n| (0..21).map(move |m| (n, m)))
                .map(|(n, m)| v_element_closed(spin, n, m, black_box(z)).unwrap().norm())
                .sum::<f64>()
        })
    });
    g.finish();
}

fn identities(c: &mut Criterion) {
    let mut g = c.benchmark_group("identities");
    g.sample_size(10);
    g.bench_function("conjecture_default_grid", |b| {
        b.iter(|| {
            conjecture_integral(2.0, Complex64::new(0.5, 0.0), &DiskGrid::default(), 1e-5).unwrap()
        })
    });
    let spin = TruncatedSpace::spin_k(128, 2.0).unwrap();
    g.bench_function("decomposition_128", |b| {
        b.iter(|| decomposition_residual(&spin, Complex64::new(0.5, 0.5), 11).unwrap())
    });
    let two = TruncatedSpace::two_mode(24).unwrap();
    g.bench_function("paris_24", |b| {
        b.iter(|| paris_residual(&two, Complex64::new(0.5, 0.0), 8).unwrap())
    });
    g.finish();
}

criterion_group!(benches, exponentials, closed_forms, identities);
criterion_main!(benches);
