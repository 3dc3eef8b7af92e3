//! Wall-clock throughput of single kernels with model-based byte counts.

use std::time::Instant;

use rayon::prelude::*;
use veloreg_core::diffops::fd8_partial;
use veloreg_core::interp::{interp_eval, prefilter_bspline, InterpInput};
use veloreg_core::synth::{perturbed_nodes, sinsq, sinsq_value};
use veloreg_core::{Axis, Grid, InterpVariant, ScalarField};

use crate::intensity::{IntensityModel, KernelTag};
use crate::report::BenchReport;
use crate::BenchError;

fn relative_error_at(values: &ScalarField, points: &veloreg_core::DeparturePoints) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (idx, &v) in values.as_slice().iter().enumerate() {
        let exact = sinsq_value(points.physical(idx));
        num += (v as f64 - exact).powi(2);
        den += exact * exact;
    }
    (num / den).sqrt()
}

/// Runs `kernel` `reps` times on an N³ grid after one warm-up call.
pub fn throughput_bench(kernel: KernelTag, n: usize, reps: usize, model: &IntensityModel) -> Result<BenchReport, BenchError> {
    let grid = Grid::cubic(n)?;
    let reps = reps.max(1);
    let f = sinsq(grid);
    let points = perturbed_nodes(grid, crate::accuracy::DEFAULT_SEED, crate::accuracy::DEFAULT_FRACTION);
    let coeffs = prefilter_bspline(&f);

    let mut out = ScalarField::zeros(grid);
    let mut run = || -> Result<ScalarField, BenchError> {
        Ok(match kernel {
            KernelTag::Prefilter => prefilter_bspline(&f).into_field(),
            KernelTag::Linear => interp_eval(InterpInput::Nodal(&f), &points, InterpVariant::Linear)?,
            KernelTag::Lagrange => interp_eval(InterpInput::Nodal(&f), &points, InterpVariant::Lagrange)?,
            KernelTag::Bspline => interp_eval(InterpInput::Coefficients(&coeffs), &points, InterpVariant::Bspline)?,
            KernelTag::Fd8Partial => fd8_partial(&f, Axis::X3),
            KernelTag::CopyBaseline => {
                out.as_mut_slice()
                    .par_chunks_mut(4096)
                    .zip(f.as_slice().par_chunks(4096))
                    .for_each(|(dst, src)| dst.copy_from_slice(src));
                out.clone()
            }
        })
    };
    let mut last = run()?;
    let start = Instant::now();
    for _ in 0..reps {
        last = std::hint::black_box(run()?);
    }
    let time_s = start.elapsed().as_secs_f64() / reps as f64;

    let rel_err = match kernel {
        KernelTag::Linear | KernelTag::Lagrange | KernelTag::Bspline => Some(relative_error_at(&last, &points)),
        _ => None,
    };
    let bytes = kernel.cost().bytes * grid.len() as f64;
    Ok(BenchReport {
        kernel: kernel.name().to_string(),
        n,
        time_s,
        bytes,
        eff_bw: bytes / time_s / 1e9,
        rel_err,
        intensity: model.intensity(kernel),
    })
}
