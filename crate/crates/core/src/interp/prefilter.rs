//! Cubic B-spline prefilter as a truncated 15-tap FIR.

use crate::field::{Real, ScalarField};
use crate::grid::Axis;
use crate::stencil::convolve_axis;

/// Pole of the exact inverse cubic B-spline filter.
pub const BSPLINE_POLE: f64 = -0.267_949_192_431_122_7; // √3 − 2

/// Half-width of the truncated filter.
pub const PREFILTER_RADIUS: usize = 7;

/// Largest deviation of the truncated filter from the exact inverse, per
/// axis, over all frequencies: max_θ |H(θ)·(4 + 2cos θ)/6 − 1|.
pub const PREFILTER_TOLERANCE: f64 = 1.5e-4;

/// Taps t₋₇..t₇, proportional to z₁^|n| and normalized to unit DC gain.
pub fn prefilter_taps() -> [f64; 2 * PREFILTER_RADIUS + 1] {
    let scale = 3f64.sqrt();
    let mut taps: [f64; 2 * PREFILTER_RADIUS + 1] = std::array::from_fn(|i| {
        let n = i.abs_diff(PREFILTER_RADIUS) as i32;
        scale * BSPLINE_POLE.powi(n)
    });
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// B-spline coefficients c with Σ c·φ = f at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField<T: Real = f32>(ScalarField<T>);

impl<T: Real> CoefficientField<T> {
    pub fn as_field(&self) -> &ScalarField<T> {
        &self.0
    }

    pub fn into_field(self) -> ScalarField<T> {
        self.0
    }
}

/// Transfer function of the truncated filter at angular frequency θ = k·h.
pub fn prefilter_response(theta: f64) -> f64 {
    prefilter_taps()
        .iter()
        .enumerate()
        .map(|(i, &t)| t * ((i as f64 - PREFILTER_RADIUS as f64) * theta).cos())
        .sum()
}

pub fn prefilter_bspline<T: Real>(f: &ScalarField<T>) -> CoefficientField<T> {
    let grid = *f.grid();
    let taps: Vec<(isize, T)> = prefilter_taps()
        .iter()
        .enumerate()
        .map(|(i, &w)| (i as isize - PREFILTER_RADIUS as isize, T::of(w)))
        .collect();
    let mut data = convolve_axis(&grid, f.as_slice(), Axis::X1, &taps);
    data = convolve_axis(&grid, &data, Axis::X2, &taps);
    data = convolve_axis(&grid, &data, Axis::X3, &taps);
    CoefficientField(ScalarField::from_vec_unchecked(grid, data))
}
