use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;
use veloreg_bench::accuracy::{REFERENCE_ERRORS_64, ROUNDTRIP_BLOBS, ROUNDTRIP_CONCENTRATION};
use veloreg_bench::{
    advect_roundtrip_bench, derivative_accuracy_sweep, interp_accuracy_bench, throughput_bench, write_csv,
    BenchSummary, InterpParams, IntensityModel, KernelTag, Precision,
};
use veloreg_core::{DerivativeBackend, InterpVariant};

use crate::{write_json, Outcome};

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Relative error of ∂₃ on sin(ωx₃)+cos(ωx₃) for ω = 1 … N/2.
    Deriv {
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value = "fd8")]
        backend: DerivativeBackend,
        #[arg(long, default_value = "f32")]
        precision: Precision,
        #[command(flatten)]
        output: Output,
    },
    /// Interpolation error and time per call on perturbed grid nodes.
    Interp {
        #[arg(long, default_value_t = 64)]
        size: usize,
        /// A single variant; all three when omitted.
        #[arg(long)]
        variant: Option<InterpVariant>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Perturbation bound as a fraction of the grid spacing.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Forward-then-backward transport of a synthetic image.
    Roundtrip {
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long)]
        variant: Option<InterpVariant>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        amplitude: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Kernel wall time, model bandwidth and analytic intensity.
    Throughput {
        /// A single kernel; every kernel when omitted.
        #[arg(long)]
        kernel: Option<KernelTag>,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        /// Device peak arithmetic rate used for the roofline classification.
        #[arg(long, default_value_t = IntensityModel::REFERENCE_GPU.peak_gflops)]
        peak_gflops: f64,
        #[arg(long, default_value_t = IntensityModel::REFERENCE_GPU.peak_gbps)]
        peak_gbps: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON summary destination.
    #[arg(long)]
    json: Option<PathBuf>,
}

impl Output {
    fn emit<R: Serialize, S: Serialize>(&self, rows: &[R], summary: &S) -> anyhow::Result<()> {
        match &self.csv {
            Some(path) => write_csv(std::fs::File::create(path)?, rows)?,
            None => write_csv(std::io::stdout().lock(), rows)?,
        }
        if let Some(path) = &self.json {
            write_json(path, summary)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Summary<R, M> {
    bench: &'static str,
    rows: R,
    reference: M,
}

fn variants(v: Option<InterpVariant>) -> Vec<InterpVariant> {
    v.map_or_else(|| InterpVariant::ALL.to_vec(), |v| vec![v])
}

pub fn run(cmd: BenchCommand) -> anyhow::Result<Outcome> {
    match cmd {
        BenchCommand::Deriv { size, backend, precision, output } => {
            let rows = derivative_accuracy_sweep(size, backend, precision)?;
            output.emit(&rows, &Summary { bench: "deriv", rows: &rows, reference: () })?;
        }
        BenchCommand::Interp { size, variant, seed, fraction, reps, output } => {
            let params = InterpParams { seed, fraction, reps };
            let rows = variants(variant)
                .into_iter()
                .map(|v| interp_accuracy_bench(size, v, &params))
                .collect::<Result<Vec<_>, _>>()?;
            #[derive(Serialize)]
            struct Reference {
                n: usize,
                rel_err: Vec<(InterpVariant, f64)>,
            }
            let reference = Reference { n: 64, rel_err: REFERENCE_ERRORS_64.to_vec() };
            output.emit(&rows, &Summary { bench: "interp", rows: &rows, reference })?;
        }
        BenchCommand::Roundtrip { size, variant, seed, amplitude, output } => {
            let rows = variants(variant)
                .into_iter()
                .map(|v| advect_roundtrip_bench(size, v, seed, amplitude))
                .collect::<Result<Vec<_>, _>>()?;
            #[derive(Serialize)]
            struct Image {
                blobs: usize,
                concentration: [f64; 2],
            }
            let image = Image {
                blobs: ROUNDTRIP_BLOBS,
                concentration: [ROUNDTRIP_CONCENTRATION.start, ROUNDTRIP_CONCENTRATION.end],
            };
            output.emit(&rows, &Summary { bench: "roundtrip", rows: &rows, reference: image })?;
        }
        BenchCommand::Throughput { kernel, size, reps, peak_gflops, peak_gbps, output } => {
            let model = IntensityModel::new(peak_gflops, peak_gbps)?;
            let kernels = kernel.map_or_else(|| KernelTag::ALL.to_vec(), |k| vec![k]);
            let rows = kernels
                .into_iter()
                .map(|k| throughput_bench(k, size, reps, &model))
                .collect::<Result<Vec<_>, _>>()?;
            let summary = BenchSummary::new(model, rows);
            output.emit(&summary.rows, &summary)?;
        }
    }
    Ok(Outcome::Success)
}
