use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::intensity::{IntensityModel, KernelTag};
use crate::BenchError;

/// One measured configuration. `eff_bw` is model bytes over wall time in
/// GB/s; hardware counters are never consulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub kernel: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub time_s: f64,
    pub bytes: f64,
    pub eff_bw: f64,
    pub rel_err: Option<f64>,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kernel: String,
    pub intensity: f64,
    pub memory_bound: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchSummary {
    pub device: IntensityModel,
    pub device_ratio: f64,
    pub classification: Vec<Classification>,
    pub rows: Vec<BenchReport>,
}

impl BenchSummary {
    pub fn new(device: IntensityModel, rows: Vec<BenchReport>) -> Self {
        let classification = KernelTag::ALL
            .iter()
            .map(|&k| Classification {
                kernel: k.name().to_string(),
                intensity: device.intensity(k),
                memory_bound: device.is_memory_bound(k),
            })
            .collect();
        Self { device_ratio: device.device_ratio(), device, classification, rows }
    }
}

/// CSV with one row per report; missing errors are left empty.
pub fn write_csv<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(out: W, value: &T) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(out, value)?;
    Ok(())
}
