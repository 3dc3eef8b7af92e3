//! Accuracy sweeps, kernel throughput and an analytic arithmetic-intensity
//! model for the veloreg kernels.

pub mod accuracy;
pub mod deriv;
pub mod intensity;
pub mod report;
pub mod throughput;

pub use accuracy::{advect_roundtrip_bench, interp_accuracy_bench, InterpParams, InterpRow, RoundtripRow};
pub use deriv::{derivative_accuracy_sweep, derivative_error, DerivRow, Precision};
pub use intensity::{IntensityModel, KernelCost, KernelTag};
pub use report::{write_csv, write_json, BenchReport, BenchSummary, Classification};
pub use throughput::throughput_bench;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] veloreg_core::Error),
    #[error("unknown kernel {0:?}")]
    UnknownKernel(String),
    #[error("unknown precision {0:?}")]
    UnknownPrecision(String),
    #[error("device peaks must be positive and finite (got {peak_gflops} GFLOP/s, {peak_gbps} GB/s)")]
    InvalidDevice { peak_gflops: f64, peak_gbps: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
