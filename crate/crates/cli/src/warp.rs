use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::Serialize;
use veloreg_core::metrics::compute_deformation_map;
use veloreg_core::synth::{synthesize, SynthCase, SynthParams};
use veloreg_core::transport::solve_state;
use veloreg_core::Grid;

use crate::{volumes, write_json, Discretization, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WarpDirection {
    Forward,
    /// Transport by −v.
    Backward,
}

#[derive(Debug, Args)]
pub struct WarpArgs {
    /// Velocity stem; reads `<stem>_x1`, `<stem>_x2`, `<stem>_x3`.
    #[arg(long)]
    velocity: PathBuf,
    #[arg(long)]
    image: PathBuf,
    #[arg(long, value_enum, default_value = "forward")]
    direction: WarpDirection,
    /// Treat the input as a label map and use nearest-neighbour lookup.
    #[arg(long)]
    labels: bool,
    #[command(flatten)]
    disc: Discretization,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct WarpReport<'a> {
    command: &'static str,
    velocity: &'a PathBuf,
    image: &'a PathBuf,
    direction: WarpDirection,
    labels: bool,
    nt: usize,
    variant: veloreg_core::InterpVariant,
    backend: veloreg_core::DerivativeBackend,
    grid: [usize; 3],
    wall_time_s: f64,
}

pub fn run_warp(args: WarpArgs) -> anyhow::Result<Outcome> {
    let start = std::time::Instant::now();
    let mut v = volumes::vector(&args.velocity)?;
    if args.direction == WarpDirection::Backward {
        v.scale(-1.0);
    }
    let tg = args.disc.timegrid()?;
    let kernels = args.disc.kernels();
    let grid = *v.grid();
    if args.labels {
        let labels = volumes::labels(&args.image)?;
        grid.ensure_same(labels.grid()).context("velocity and label map grids differ")?;
        let map = compute_deformation_map(&kernels, &v, &tg)?;
        volumes::save_labels(&map.warp_labels(&labels)?, &args.out)?;
    } else {
        let image = volumes::scalar(&args.image)?;
        grid.ensure_same(image.grid()).context("velocity and image grids differ")?;
        let warped = solve_state(&kernels, &v, &image, &tg)?;
        volumes::save_scalar(warped.final_slice(), &args.out)?;
    }
    let report = WarpReport {
        command: "warp",
        velocity: &args.velocity,
        image: &args.image,
        direction: args.direction,
        labels: args.labels,
        nt: tg.nt(),
        variant: args.disc.variant,
        backend: args.disc.backend,
        grid: grid.dims(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&volumes::report_path(&args.out), &report)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value = "blobs")]
    case: SynthCase,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of blobs in the blobs case.
    #[arg(long, default_value_t = 8)]
    blobs: usize,
    /// Largest wavenumber of the ground-truth velocity.
    #[arg(long, default_value_t = 2)]
    kmax: i32,
    /// Largest velocity component magnitude.
    #[arg(long, default_value_t = 0.3)]
    amplitude: f64,
    /// Also write two-label maps of reference and template.
    #[arg(long)]
    labels: bool,
    #[command(flatten)]
    disc: Discretization,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SynthReport {
    command: &'static str,
    grid: [usize; 3],
    params: SynthParams,
    nt: usize,
    variant: veloreg_core::InterpVariant,
    backend: veloreg_core::DerivativeBackend,
    velocity_max_abs: f32,
}

pub fn run_synth(args: SynthArgs) -> anyhow::Result<Outcome> {
    let grid = Grid::cubic(args.size)?;
    let params = SynthParams {
        case: args.case,
        seed: args.seed,
        blob_count: args.blobs,
        kmax: args.kmax,
        amplitude: args.amplitude,
    };
    let tg = args.disc.timegrid()?;
    let pair = synthesize(grid, &params, &args.disc.kernels(), &tg)?;

    volumes::ensure_dir(&args.out)?;
    volumes::save_scalar(&pair.reference, &args.out.join("reference"))?;
    volumes::save_scalar(&pair.template, &args.out.join("template"))?;
    volumes::save_vector(&pair.velocity, &args.out.join("velocity"))?;
    if args.labels {
        volumes::save_labels(&pair.reference_labels, &args.out.join("reference_labels"))?;
        volumes::save_labels(&pair.template_labels, &args.out.join("template_labels"))?;
    }
    let report = SynthReport {
        command: "synth",
        grid: grid.dims(),
        velocity_max_abs: pair.velocity.max_abs(),
        params,
        nt: tg.nt(),
        variant: args.disc.variant,
        backend: args.disc.backend,
    };
    write_json(&args.out.join("synth.json"), &report)?;
    Ok(Outcome::Success)
}
