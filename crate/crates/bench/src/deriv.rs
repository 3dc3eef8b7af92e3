//! Accuracy of first derivatives along x₃ on sin(ωx₃) + cos(ωx₃).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use veloreg_core::diffops::{fd8_partial, SpectralOps};
use veloreg_core::{Axis, DerivativeBackend, Grid, Real, ScalarField};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Single,
    Double,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Single => "f32",
            Precision::Double => "f64",
        })
    }
}

impl FromStr for Precision {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "f32" | "single" => Ok(Precision::Single),
            "f64" | "double" => Ok(Precision::Double),
            other => Err(BenchError::UnknownPrecision(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivRow {
    pub backend: DerivativeBackend,
    pub precision: Precision,
    pub n: usize,
    pub omega: usize,
    pub rel_err: f64,
}

/// Relative L² error of ∂₃ for one frequency.
pub fn derivative_error(grid: Grid, omega: usize, backend: DerivativeBackend, precision: Precision) -> f64 {
    match precision {
        Precision::Single => error_in::<f32>(grid, omega, backend),
        Precision::Double => error_in::<f64>(grid, omega, backend),
    }
}

fn error_in<T: Real>(grid: Grid, omega: usize, backend: DerivativeBackend) -> f64 {
    let w = omega as f64;
    let f = ScalarField::<T>::from_fn(grid, |x| (w * x[2]).sin() + (w * x[2]).cos());
    let exact = ScalarField::<f64>::from_fn(grid, |x| w * ((w * x[2]).cos() - (w * x[2]).sin()));
    let d = match backend {
        DerivativeBackend::Fd8 => fd8_partial(&f, Axis::X3),
        DerivativeBackend::Spectral => SpectralOps::<T>::new(grid).partial(&f, Axis::X3),
    };
    let diff = d.cast::<f64>().sub(&exact);
    diff.norm() / exact.norm()
}

/// Errors for ω = 1 … N₃/2 on an N³ grid.
pub fn derivative_accuracy_sweep(
    n: usize,
    backend: DerivativeBackend,
    precision: Precision,
) -> Result<Vec<DerivRow>, BenchError> {
    let grid = Grid::cubic(n)?;
    Ok((1..=n / 2)
        .map(|omega| DerivRow { backend, precision, n, omega, rel_err: derivative_error(grid, omega, backend, precision) })
        .collect())
}
