mod bench;
mod metrics;
mod register;
mod volumes;
mod warp;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use veloreg_core::{DerivativeBackend, InterpVariant, TimeGrid};

#[derive(Debug, Parser)]
#[command(name = "veloreg", version, about = "Diffeomorphic image registration on periodic 3D grids")]
struct Cli {
    /// Worker threads for data-parallel kernels.
    #[arg(long, global = true, env = "VELOREG_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Register a template image to a reference image.
    Register(register::RegisterArgs),
    /// Transport an image or label map by a velocity field.
    Warp(warp::WarpArgs),
    /// Generate a synthetic registration problem with known velocity.
    Synth(warp::SynthArgs),
    #[command(subcommand)]
    Bench(bench::BenchCommand),
    #[command(subcommand)]
    Metrics(metrics::MetricsCommand),
}

/// Discretization flags shared by every command that transports images.
#[derive(Debug, Clone, Args)]
pub(crate) struct Discretization {
    /// Time steps on [0, 1].
    #[arg(long, default_value_t = 4)]
    nt: usize,
    #[arg(long = "interp", default_value = "bspline")]
    variant: InterpVariant,
    #[arg(long = "deriv", default_value = "fd8")]
    backend: DerivativeBackend,
}

impl Discretization {
    fn timegrid(&self) -> anyhow::Result<TimeGrid> {
        Ok(TimeGrid::new(self.nt)?)
    }

    fn kernels(&self) -> veloreg_core::Kernels {
        veloreg_core::Kernels::new(self.backend, self.variant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Success,
    /// The solver stopped without meeting its tolerance.
    NotConverged,
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Register(args) => register::run(args),
        Command::Warp(args) => warp::run_warp(args),
        Command::Synth(args) => warp::run_synth(args),
        Command::Bench(cmd) => bench::run(cmd),
        Command::Metrics(cmd) => metrics::run(cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(cli);
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(exit_status(&result))
}

fn exit_status(result: &anyhow::Result<Outcome>) -> u8 {
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::NotConverged) => 2,
        Err(_) => 1,
    }
}
