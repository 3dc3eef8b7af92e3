use std::path::PathBuf;

use anyhow::Context;
use clap::Subcommand;
use serde_json::json;
use veloreg_core::metrics::{compute_deformation_map, det_deformation_gradient, dice, foreground_labels, relative_mismatch};

use crate::{volumes, Discretization, Outcome};

#[derive(Debug, Subcommand)]
pub enum MetricsCommand {
    /// Dice overlap of two label maps.
    Dice {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Labels to pool; every non-zero label present when omitted.
        #[arg(long, value_delimiter = ',')]
        labels: Vec<u16>,
    },
    /// ‖m(1) − m₁‖ / ‖m₁ − m₀‖.
    Mismatch {
        #[arg(long)]
        warped: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long = "tpl")]
        template: PathBuf,
    },
    /// Determinant of the deformation gradient induced by a velocity.
    Detf {
        #[arg(long)]
        velocity: PathBuf,
        #[command(flatten)]
        disc: Discretization,
        /// Also write det F as a volume.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cmd: MetricsCommand) -> anyhow::Result<Outcome> {
    println!("{}", serde_json::to_string_pretty(&evaluate(cmd)?)?);
    Ok(Outcome::Success)
}

pub fn evaluate(cmd: MetricsCommand) -> anyhow::Result<serde_json::Value> {
    Ok(match cmd {
        MetricsCommand::Dice { a, b, labels } => {
            let (a, b) = (volumes::labels(&a)?, volumes::labels(&b)?);
            a.grid().ensure_same(b.grid()).context("label map grids differ")?;
            let labels = if labels.is_empty() { foreground_labels(&a, &b) } else { labels };
            json!({ "metric": "dice", "labels": labels, "value": dice(&a, &b, &labels)? })
        }
        MetricsCommand::Mismatch { warped, reference, template } => {
            let m = volumes::scalar(&warped)?;
            let m1 = volumes::scalar(&reference)?;
            let m0 = volumes::scalar(&template)?;
            json!({ "metric": "mismatch", "value": relative_mismatch(&m, &m1, &m0)? })
        }
        MetricsCommand::Detf { velocity, disc, out } => {
            let v = volumes::vector(&velocity)?;
            let map = compute_deformation_map(&disc.kernels(), &v, &disc.timegrid()?)?;
            let (det, stats) = det_deformation_gradient(&map, disc.backend);
            if let Some(path) = &out {
                volumes::save_scalar(&det, path)?;
            }
            json!({ "metric": "detf", "value": stats, "positive": stats.is_positive() })
        }
    })
}
