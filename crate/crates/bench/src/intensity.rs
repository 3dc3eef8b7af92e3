//! Analytic arithmetic-intensity model.
//!
//! Interpolation moves five floats per target point (three coordinates, one
//! source value, one result). Stencil-like kernels read and write one float
//! per node.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelTag {
    Prefilter,
    Linear,
    Lagrange,
    /// Cubic B-spline evaluation of precomputed coefficients.
    Bspline,
    Fd8Partial,
    CopyBaseline,
}

impl KernelTag {
    pub const ALL: [KernelTag; 6] = [
        KernelTag::Prefilter,
        KernelTag::Linear,
        KernelTag::Lagrange,
        KernelTag::Bspline,
        KernelTag::Fd8Partial,
        KernelTag::CopyBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelTag::Prefilter => "prefilter",
            KernelTag::Linear => "linear",
            KernelTag::Lagrange => "lagrange",
            KernelTag::Bspline => "bspline",
            KernelTag::Fd8Partial => "fd8-partial",
            KernelTag::CopyBaseline => "copy-baseline",
        }
    }

    /// (FLOPS, bytes) per output point; an FMA counts as two FLOPS.
    pub fn cost(self) -> KernelCost {
        let (flops, bytes) = match self {
            KernelTag::Prefilter => (22.0, 8.0),
            KernelTag::Linear => (30.0, 20.0),
            KernelTag::Lagrange => (221.0, 20.0),
            KernelTag::Bspline => (294.0, 20.0),
            // four differences and four FMAs
            KernelTag::Fd8Partial => (12.0, 8.0),
            KernelTag::CopyBaseline => (0.0, 8.0),
        };
        KernelCost { flops, bytes }
    }
}

impl fmt::Display for KernelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelTag {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.to_ascii_lowercase().as_str() {
            "prefilter" => Ok(KernelTag::Prefilter),
            "linear" | "trilinear" => Ok(KernelTag::Linear),
            "lagrange" => Ok(KernelTag::Lagrange),
            "bspline" | "spline" => Ok(KernelTag::Bspline),
            "fd8-partial" | "fd8" => Ok(KernelTag::Fd8Partial),
            "copy-baseline" | "copy" => Ok(KernelTag::CopyBaseline),
            other => Err(BenchError::UnknownKernel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCost {
    pub flops: f64,
    pub bytes: f64,
}

impl KernelCost {
    pub fn intensity(&self) -> f64 {
        self.flops / self.bytes
    }
}

/// Peak compute and bandwidth of a device, plus the per-kernel costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityModel {
    pub peak_gflops: f64,
    pub peak_gbps: f64,
}

impl IntensityModel {
    /// A 32 GB data-centre GPU of 2018 vintage: 14 TFLOP/s single precision
    /// and 900 GB/s.
    pub const REFERENCE_GPU: IntensityModel = IntensityModel { peak_gflops: 14000.0, peak_gbps: 900.0 };

    pub fn new(peak_gflops: f64, peak_gbps: f64) -> Result<Self, BenchError> {
        if !(peak_gflops > 0.0 && peak_gbps > 0.0 && peak_gflops.is_finite() && peak_gbps.is_finite()) {
            return Err(BenchError::InvalidDevice { peak_gflops, peak_gbps });
        }
        Ok(Self { peak_gflops, peak_gbps })
    }

    /// Device intensity in FLOPS per byte.
    pub fn device_ratio(&self) -> f64 {
        self.peak_gflops / self.peak_gbps
    }

    pub fn intensity(&self, kernel: KernelTag) -> f64 {
        kernel.cost().intensity()
    }

    pub fn is_memory_bound(&self, kernel: KernelTag) -> bool {
        self.intensity(kernel) < self.device_ratio()
    }
}

impl Default for IntensityModel {
    fn default() -> Self {
        Self::REFERENCE_GPU
    }
}
