//! Eighth-order central finite differences on the periodic grid.

use crate::field::{Real, ScalarField, VectorField};
use crate::grid::Axis;
use crate::stencil::convolve_axis;

/// Weights of f(x + n·h) − f(x − n·h) for n = 1..4.
pub const FD8_COEFFS: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn taps<T: Real>(h: f64) -> [(isize, T); 8] {
    let mut taps = [(0isize, T::zero()); 8];
    for (n, &c) in FD8_COEFFS.iter().enumerate() {
        let off = n as isize + 1;
        taps[2 * n] = (-off, T::of(-c / h));
        taps[2 * n + 1] = (off, T::of(c / h));
    }
    taps
}

/// ∂f/∂xₐ with the 9-point stencil.
pub fn fd8_partial<T: Real>(f: &ScalarField<T>, axis: Axis) -> ScalarField<T> {
    let grid = *f.grid();
    let h = grid.spacing_along(axis);
    let data = convolve_axis(&grid, f.as_slice(), axis, &taps::<T>(h));
    ScalarField::from_vec_unchecked(grid, data)
}

pub fn fd8_gradient<T: Real>(f: &ScalarField<T>) -> VectorField<T> {
    VectorField::from_components(Axis::ALL.map(|a| fd8_partial(f, a)))
        .expect("partials share the input grid")
}

pub fn fd8_divergence<T: Real>(u: &VectorField<T>) -> ScalarField<T> {
    let mut div = fd8_partial(u.component(Axis::X1), Axis::X1);
    div.axpy(T::one(), &fd8_partial(u.component(Axis::X2), Axis::X2));
    div.axpy(T::one(), &fd8_partial(u.component(Axis::X3), Axis::X3));
    div
}
