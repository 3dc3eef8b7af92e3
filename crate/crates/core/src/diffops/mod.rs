//! First-order differential operators and the regularization operator.

mod fd8;
mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fd8::{fd8_divergence, fd8_gradient, fd8_partial, FD8_COEFFS};
pub use spectral::{
    apply_inverse_regularization, apply_regularization, odd_wavenumber, spectral_divergence,
    spectral_gradient, spectral_laplacian, wavenumber, Fft3, SpectralOps,
};

/// Weights of the regularization functional (β/2)⟨Av, v⟩ with
/// A = −Δ − γ∇(∇·).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRegularization")]
pub struct RegularizationConfig {
    beta: f64,
    gamma: f64,
}

#[derive(Deserialize)]
struct RawRegularization {
    beta: f64,
    gamma: f64,
}

impl TryFrom<RawRegularization> for RegularizationConfig {
    type Error = Error;
    fn try_from(raw: RawRegularization) -> Result<Self> {
        Self::new(raw.beta, raw.gamma)
    }
}

impl RegularizationConfig {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta must be positive, got {beta}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be non-negative, got {gamma}")));
        }
        Ok(Self { beta, gamma })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same divergence penalty with a different β.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.gamma)
    }
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        Self { beta: 5e-4, gamma: 1e-4 }
    }
}

/// Which discretization evaluates gradients and divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeBackend {
    #[default]
    Fd8,
    Spectral,
}

impl DerivativeBackend {
    pub fn name(self) -> &'static str {
        match self {
            DerivativeBackend::Fd8 => "fd8",
            DerivativeBackend::Spectral => "spectral",
        }
    }
}

impl fmt::Display for DerivativeBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DerivativeBackend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fd8" => Ok(DerivativeBackend::Fd8),
            "spectral" | "fft" => Ok(DerivativeBackend::Spectral),
            other => Err(Error::InvalidConfig(format!("unknown derivative backend {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::grid::{Axis, Grid};

    #[test]
    fn config_validation() {
        assert!(RegularizationConfig::new(0.0, 0.0).is_err());
        assert!(RegularizationConfig::new(1e-3, -1.0).is_err());
        assert!(RegularizationConfig::new(f64::NAN, 0.0).is_err());
        let cfg = RegularizationConfig::new(1e-3, 0.0).unwrap();
        assert_eq!(cfg.with_beta(0.1).unwrap().gamma(), 0.0);
        let parsed: std::result::Result<RegularizationConfig, _> =
            serde_json::from_str(r#"{"beta": -1.0, "gamma": 0.0}"#);
        assert!(parsed.is_err());
    }

    #[test]
    fn backend_names_roundtrip() {
        for b in [DerivativeBackend::Fd8, DerivativeBackend::Spectral] {
            assert_eq!(b.name().parse::<DerivativeBackend>().unwrap(), b);
        }
        assert!("fd4".parse::<DerivativeBackend>().is_err());
    }

    #[test]
    fn backends_agree_on_low_frequencies() {
        let g = Grid::cubic(64).unwrap();
        let f = ScalarField::<f64>::from_fn(g, |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + (5.0 * x[2]).cos());
        let a = fd8_gradient(&f);
        let b = spectral_gradient(&f);
        assert!(a.sub(&b).norm() / b.norm() <= 1e-4);
        let d = fd8_partial(&f, Axis::X3).sub(b.component(Axis::X3)).norm();
        assert!(d / b.component(Axis::X3).norm() <= 1e-4);
    }
}
