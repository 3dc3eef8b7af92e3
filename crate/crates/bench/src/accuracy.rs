//! Interpolation accuracy on randomly perturbed nodes and forward/backward
//! transport round trips.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use veloreg_core::synth::{band_limited_velocity, blobs_with_concentration, interpolation_error, perturbed_nodes, sinsq_value};
use veloreg_core::transport::solve_state;
use veloreg_core::{DerivativeBackend, Grid, InterpVariant, Kernels, ScalarField, TimeGrid};

use crate::BenchError;

/// Relative errors of the three kernels at 64³ for the sin² test function,
/// as measured on the reference GPU; used as reference magnitudes only.
pub const REFERENCE_ERRORS_64: [(InterpVariant, f64); 3] = [
    (InterpVariant::Linear, 2.61e-2),
    (InterpVariant::Lagrange, 9.85e-3),
    (InterpVariant::Bspline, 2.25e-3),
];

pub const DEFAULT_SEED: u64 = 42;
/// Perturbation magnitude as a fraction of the grid spacing.
pub const DEFAULT_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpRow {
    pub variant: InterpVariant,
    pub n: usize,
    pub rel_err: f64,
    /// Mean seconds per call, prefiltering included.
    pub time_per_call_s: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpParams {
    pub seed: u64,
    pub fraction: f64,
    pub reps: usize,
}

impl Default for InterpParams {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, fraction: DEFAULT_FRACTION, reps: 100 }
    }
}

pub fn interp_accuracy_bench(n: usize, variant: InterpVariant, params: &InterpParams) -> Result<InterpRow, BenchError> {
    let grid = Grid::cubic(n)?;
    let points = perturbed_nodes(grid, params.seed, params.fraction);
    let rel_err = interpolation_error(sinsq_value, &points, variant)?;

    let kernels = Kernels::new(DerivativeBackend::Fd8, variant);
    let f = veloreg_core::synth::sinsq(grid);
    let reps = params.reps.max(1);
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(kernels.interpolate(&f, &points)?);
    }
    let time_per_call_s = start.elapsed().as_secs_f64() / reps as f64;
    Ok(InterpRow { variant, n, rel_err, time_per_call_s, reps })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundtripRow {
    pub variant: InterpVariant,
    pub n: usize,
    pub rel_err: f64,
    pub n_interp: u64,
    pub time_s: f64,
}

/// Blob count and concentration range of the round-trip image. The blobs are
/// narrow enough that 64³ only just resolves them, like an anatomical image.
pub const ROUNDTRIP_BLOBS: usize = 16;
pub const ROUNDTRIP_CONCENTRATION: std::ops::Range<f64> = 10.0..20.0;

/// Transports a smooth image forward by v and back by −v over unit time
/// (Nt = 4 each way) and compares with the original.
pub fn advect_roundtrip_bench(n: usize, variant: InterpVariant, seed: u64, amplitude: f64) -> Result<RoundtripRow, BenchError> {
    let grid = Grid::cubic(n)?;
    let image = blobs_with_concentration(grid, seed, ROUNDTRIP_BLOBS, ROUNDTRIP_CONCENTRATION);
    let v = band_limited_velocity(grid, seed.wrapping_add(1), 2, amplitude);
    roundtrip(&image, &v, variant)
}

pub(crate) fn roundtrip(
    image: &ScalarField,
    v: &veloreg_core::VectorField,
    variant: InterpVariant,
) -> Result<RoundtripRow, BenchError> {
    let kernels = Kernels::new(DerivativeBackend::Fd8, variant);
    let tg = TimeGrid::default();
    let start = Instant::now();
    let forward = solve_state(&kernels, v, image, &tg)?;
    let back = solve_state(&kernels, &v.scaled(-1.0), forward.final_slice(), &tg)?;
    let time_s = start.elapsed().as_secs_f64();
    let rel_err = back.final_slice().sub(image).norm() / image.norm();
    Ok(RoundtripRow {
        variant,
        n: image.grid().dims()[0],
        rel_err,
        n_interp: kernels.counters().snapshot().n_interp,
        time_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use veloreg_core::interp::PREFILTER_TOLERANCE;
    use veloreg_core::synth::blobs;
    use veloreg_core::VectorField;

    #[test]
    fn zero_velocity_roundtrip() {
        let g = Grid::cubic(16).unwrap();
        let image = blobs(g, 1, 4);
        for variant in InterpVariant::ALL {
            let row = roundtrip(&image, &VectorField::zeros(g), variant).unwrap();
            assert!(row.rel_err <= PREFILTER_TOLERANCE);
            assert_eq!(row.n_interp, 14);
        }
    }

    #[test]
    fn interp_row_is_deterministic() {
        let p = InterpParams { reps: 2, ..Default::default() };
        let a = interp_accuracy_bench(16, InterpVariant::Lagrange, &p).unwrap();
        let b = interp_accuracy_bench(16, InterpVariant::Lagrange, &p).unwrap();
        assert_eq!(a.rel_err, b.rel_err);
        assert!(a.time_per_call_s > 0.0);
    }
}
