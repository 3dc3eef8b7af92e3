use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use veloreg_core::optim::{solve_with_kernels, Continuation};
use veloreg_core::transport::solve_state;
use veloreg_core::{RegularizationConfig, SolveStatus, SolverConfig};

use crate::{volumes, write_json, Discretization, Outcome};

#[derive(Debug, Args)]
pub struct RegisterArgs {
    /// Reference image m₁.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Template image m₀.
    #[arg(long = "tpl")]
    template: PathBuf,
    #[arg(long, default_value_t = 5e-4)]
    beta: f64,
    #[arg(long, default_value_t = 1e-4)]
    gamma: f64,
    #[command(flatten)]
    disc: Discretization,
    /// Relative gradient tolerance.
    #[arg(long, default_value_t = 5e-2)]
    gtol: f64,
    /// Newton iteration cap across all continuation stages.
    #[arg(long, default_value_t = 50)]
    max_newton: usize,
    #[arg(long, default_value_t = 500)]
    max_pcg: usize,
    /// Solve directly at the target β without parameter continuation.
    #[arg(long)]
    no_continuation: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: RegisterArgs) -> anyhow::Result<Outcome> {
    let m1 = volumes::scalar(&args.reference)?;
    let m0 = volumes::scalar(&args.template)?;
    m1.grid().ensure_same(m0.grid()).context("reference and template grids differ")?;

    let cfg = SolverConfig {
        reg: RegularizationConfig::new(args.beta, args.gamma)?,
        timegrid: args.disc.timegrid()?,
        gtol: args.gtol,
        max_newton: args.max_newton,
        max_pcg: args.max_pcg,
        continuation: (!args.no_continuation).then(Continuation::default),
        variant: args.disc.variant,
        backend: args.disc.backend,
        ..SolverConfig::default()
    };
    let kernels = args.disc.kernels();
    let (v, report) = solve_with_kernels(&kernels, &m0, &m1, &cfg)?;
    let warped = solve_state(&kernels, &v, &m0, &cfg.timegrid)?.final_slice().clone();

    volumes::ensure_dir(&args.out)?;
    volumes::save_vector(&v, &args.out.join("velocity"))?;
    volumes::save_scalar(&warped, &args.out.join("warped_template"))?;
    write_json(&args.out.join("report.json"), &report)?;

    eprintln!(
        "{:?}: grad_rel {:.3e}, {} Newton iterations, {} matvecs, mismatch {}",
        report.status,
        report.grad_rel,
        report.newton_iterations,
        report.matvecs,
        report.mismatch.map_or("n/a".into(), |m| format!("{m:.3e}")),
    );
    Ok(match report.status {
        SolveStatus::Converged => Outcome::Success,
        SolveStatus::MaxIterations | SolveStatus::LineSearchFailed => Outcome::NotConverged,
    })
}
