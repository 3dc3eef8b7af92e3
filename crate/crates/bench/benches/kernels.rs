use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use veloreg_core::diffops::{fd8_partial, SpectralOps};
use veloreg_core::interp::{interp_eval, prefilter_bspline, InterpInput};
use veloreg_core::synth::{perturbed_nodes, sinsq};
use veloreg_core::{Axis, Grid, InterpVariant};

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for n in [32usize, 64] {
        let grid = Grid::cubic(n).unwrap();
        let f = sinsq(grid);
        let points = perturbed_nodes(grid, 42, 0.5);
        let coeffs = prefilter_bspline(&f);
        let spectral = SpectralOps::<f32>::new(grid);

        group.bench_with_input(BenchmarkId::new("prefilter", n), &f, |b, f| b.iter(|| prefilter_bspline(black_box(f))));
        for variant in [InterpVariant::Linear, InterpVariant::Lagrange] {
            group.bench_with_input(BenchmarkId::new(variant.name(), n), &f, |b, f| {
                b.iter(|| interp_eval(InterpInput::Nodal(black_box(f)), &points, variant).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("bspline", n), &coeffs, |b, c| {
            b.iter(|| interp_eval(InterpInput::Coefficients(black_box(c)), &points, InterpVariant::Bspline).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fd8-partial", n), &f, |b, f| b.iter(|| fd8_partial(black_box(f), Axis::X3)));
        group.bench_with_input(BenchmarkId::new("fft-partial", n), &f, |b, f| {
            b.iter(|| spectral.partial(black_box(f), Axis::X3))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
