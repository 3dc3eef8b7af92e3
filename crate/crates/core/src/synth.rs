//! Synthetic images, velocities and label maps.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LabelMap, ScalarField, VectorField};
use crate::grid::Grid;
use crate::interp::{interpolate, DeparturePoints, InterpVariant};
use crate::kernels::Kernels;
use crate::transport::{solve_state, TimeGrid};

/// (sin²(8x₁) + sin²(2x₂) + sin²(4x₃)) / 3.
pub fn sinsq_value(x: [f64; 3]) -> f64 {
    ((8.0 * x[0]).sin().powi(2) + (2.0 * x[1]).sin().powi(2) + (4.0 * x[2]).sin().powi(2)) / 3.0
}

pub fn sinsq(grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, sinsq_value)
}

/// Periodic Gaussian-like bump exp(κ(cos(x − c) − 1)) per axis.
#[derive(Debug, Clone, Copy)]
struct Blob {
    centre: [f64; 3],
    kappa: f64,
    weight: f64,
}

impl Blob {
    fn eval(&self, x: [f64; 3]) -> f64 {
        let s: f64 = (0..3).map(|a| (x[a] - self.centre[a]).cos() - 1.0).sum();
        self.weight * (self.kappa * s).exp()
    }
}

/// Sum of `count` smooth periodic blobs with values in [0, 1].
pub fn blobs(grid: Grid, seed: u64, count: usize) -> ScalarField {
    blobs_with_concentration(grid, seed, count, 2.0..5.0)
}

/// Like [`blobs`], drawing each von Mises concentration from `kappa`.
/// Larger concentrations give narrower blobs with more high-frequency content.
pub fn blobs_with_concentration(grid: Grid, seed: u64, count: usize, kappa: std::ops::Range<f64>) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<Blob> = (0..count)
        .map(|_| Blob {
            centre: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
            kappa: rng.random_range(kappa.clone()),
            weight: rng.random_range(0.5..1.0),
        })
        .collect();
    let f = ScalarField::<f64>::from_fn(grid, |x| blobs.iter().map(|b| b.eval(x)).sum());
    let (_, max) = f.min_max();
    f.scaled(1.0 / max).cast()
}

/// Random smooth velocity with wavenumbers |kₐ| ≤ `kmax`, scaled so that
/// max |vₐ| equals `amplitude`.
pub fn band_limited_velocity(grid: Grid, seed: u64, kmax: i32, amplitude: f64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            for k3 in -kmax..=kmax {
                if (k1, k2, k3) == (0, 0, 0) {
                    continue;
                }
                let k = [k1 as f64, k2 as f64, k3 as f64];
                let decay = 1.0 / (1.0 + k.iter().map(|x| x * x).sum::<f64>());
                let coef: [[f64; 2]; 3] =
                    std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0) * decay));
                modes.push((k, coef));
            }
        }
    }
    let v = VectorField::<f64>::from_fn(grid, |x| {
        let mut out = [0.0; 3];
        for (k, coef) in &modes {
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            let (s, c) = phase.sin_cos();
            for a in 0..3 {
                out[a] += coef[a][0] * c + coef[a][1] * s;
            }
        }
        out
    });
    let peak = v.max_abs();
    v.scaled(amplitude / peak).cast()
}

/// Labels 1 and 2 on the intensity bands (t₁, t₂] and above t₂ of `image`.
pub fn threshold_labels(image: &ScalarField, t1: f32, t2: f32) -> LabelMap {
    let data = image
        .as_slice()
        .iter()
        .map(|&v| if v > t2 { 2 } else if v > t1 { 1 } else { 0 })
        .collect();
    LabelMap::from_vec(*image.grid(), data).expect("same length")
}

/// Grid nodes moved by independent uniform offsets in [−f·h, f·h] per axis.
pub fn perturbed_nodes(grid: Grid, seed: u64, fraction: f64) -> DeparturePoints {
    let h = grid.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<[f64; 3]> = (0..grid.len())
        .map(|_| std::array::from_fn(|a| fraction * h[a] * rng.random_range(-1.0..=1.0)))
        .collect();
    DeparturePoints::from_fn(grid, |idx, x| std::array::from_fn(|a| x[a] + offsets[idx][a]))
        .expect("finite offsets")
}

/// ‖I f − f‖ / ‖f‖ over `points`, with f sampled on the grid and compared
/// with its exact values at the points.
pub fn interpolation_error(
    f: impl Fn([f64; 3]) -> f64 + Sync,
    points: &DeparturePoints,
    variant: InterpVariant,
) -> Result<f64> {
    let grid = *points.grid();
    let samples = ScalarField::<f64>::from_fn(grid, &f);
    let approx = interpolate(&samples, points, variant)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (idx, &a) in approx.as_slice().iter().enumerate() {
        let exact = f(points.physical(idx));
        num += (a - exact) * (a - exact);
        den += exact * exact;
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthCase {
    #[default]
    Blobs,
    Sinsq,
}

impl fmt::Display for SynthCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthCase::Blobs => "blobs",
            SynthCase::Sinsq => "sinsq",
        })
    }
}

impl FromStr for SynthCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blobs" => Ok(SynthCase::Blobs),
            "sinsq" => Ok(SynthCase::Sinsq),
            other => Err(Error::InvalidConfig(format!("unknown synthetic case {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthParams {
    pub case: SynthCase,
    pub seed: u64,
    pub blob_count: usize,
    pub kmax: i32,
    pub amplitude: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self { case: SynthCase::Blobs, seed: 7, blob_count: 8, kmax: 2, amplitude: 0.3 }
    }
}

/// A registration problem with known ground truth.
#[derive(Debug, Clone)]
pub struct SynthPair {
    pub reference: ScalarField,
    pub velocity: VectorField,
    /// The reference transported by `velocity` over unit time.
    pub template: ScalarField,
    pub reference_labels: LabelMap,
    pub template_labels: LabelMap,
}

pub fn synthesize(grid: Grid, params: &SynthParams, kernels: &Kernels, tg: &TimeGrid) -> Result<SynthPair> {
    let reference = match params.case {
        SynthCase::Blobs => blobs(grid, params.seed, params.blob_count),
        SynthCase::Sinsq => sinsq(grid),
    };
    let velocity = band_limited_velocity(grid, params.seed.wrapping_add(1), params.kmax, params.amplitude);
    let template = solve_state(kernels, &velocity, &reference, tg)?.final_slice().clone();
    let (t1, t2) = match params.case {
        SynthCase::Blobs => (0.25, 0.55),
        SynthCase::Sinsq => (0.35, 0.65),
    };
    Ok(SynthPair {
        reference_labels: threshold_labels(&reference, t1, t2),
        template_labels: threshold_labels(&template, t1, t2),
        reference,
        velocity,
        template,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffops::{fd8_divergence, DerivativeBackend};
    use crate::interp::InterpVariant;

    #[test]
    fn generators_are_deterministic() {
        let g = Grid::cubic(16).unwrap();
        assert_eq!(blobs(g, 3, 5), blobs(g, 3, 5));
        assert_ne!(blobs(g, 3, 5), blobs(g, 4, 5));
        assert_eq!(band_limited_velocity(g, 1, 2, 0.3), band_limited_velocity(g, 1, 2, 0.3));
    }

    #[test]
    fn blob_range_and_velocity_amplitude() {
        let g = Grid::cubic(16).unwrap();
        let (lo, hi) = blobs(g, 1, 6).min_max();
        assert!(lo >= 0.0 && (hi - 1.0).abs() < 1e-6);
        let v = band_limited_velocity(g, 2, 2, 0.3);
        assert!((v.max_abs() - 0.3).abs() < 1e-6);
        // smooth, so FD8 divergence is well resolved and bounded
        assert!(fd8_divergence(&v).max_abs() < 10.0);
    }

    #[test]
    fn sinsq_matches_formula() {
        let g = Grid::cubic(16).unwrap();
        let f = sinsq(g);
        let x = g.coords(g.index(1, 2, 3));
        let want = ((8.0 * x[0]).sin().powi(2) + (2.0 * x[1]).sin().powi(2) + (4.0 * x[2]).sin().powi(2)) / 3.0;
        assert!((f.at(1, 2, 3) as f64 - want).abs() < 1e-7);
    }

    #[test]
    fn pair_has_labels_and_distinct_images() {
        let g = Grid::cubic(16).unwrap();
        let k = Kernels::new(DerivativeBackend::Fd8, InterpVariant::Bspline);
        let p = synthesize(g, &SynthParams::default(), &k, &TimeGrid::default()).unwrap();
        assert!(p.template.sub(&p.reference).norm() > 0.0);
        assert!(p.reference_labels.as_slice().contains(&2));
        assert!(p.reference_labels.as_slice().contains(&0));
    }
}
