//! Scattered-point interpolation of periodic grid data.
//!
//! A value at point x is Σ c_ijk φ_i(x₁)φ_j(x₂)φ_k(x₃) over the kernel's
//! support. Trilinear and Lagrange kernels use the nodal values as
//! coefficients; the cubic B-spline needs prefiltered coefficients.

mod prefilter;
mod weights;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LabelMap, Real, ScalarField};
use crate::grid::Grid;

pub use prefilter::{
    prefilter_bspline, prefilter_response, prefilter_taps, CoefficientField, BSPLINE_POLE,
    PREFILTER_RADIUS, PREFILTER_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpVariant {
    Linear,
    Lagrange,
    #[default]
    Bspline,
}

impl InterpVariant {
    pub const ALL: [InterpVariant; 3] =
        [InterpVariant::Linear, InterpVariant::Lagrange, InterpVariant::Bspline];

    pub fn name(self) -> &'static str {
        match self {
            InterpVariant::Linear => "linear",
            InterpVariant::Lagrange => "lagrange",
            InterpVariant::Bspline => "bspline",
        }
    }

    /// Nodes per axis in the kernel support.
    pub fn support(self) -> usize {
        match self {
            InterpVariant::Linear => 2,
            InterpVariant::Lagrange | InterpVariant::Bspline => 4,
        }
    }

    pub fn needs_prefilter(self) -> bool {
        self == InterpVariant::Bspline
    }
}

impl fmt::Display for InterpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InterpVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "trilinear" => Ok(InterpVariant::Linear),
            "lagrange" => Ok(InterpVariant::Lagrange),
            "bspline" | "spline" => Ok(InterpVariant::Bspline),
            other => Err(Error::InvalidConfig(format!("unknown interpolation variant {other:?}"))),
        }
    }
}

/// Target points for one interpolation sweep, one per grid node.
///
/// Coordinates are held in grid-index units wrapped to `[0, Nₐ)`, so a point
/// sitting on a node is an exact integer.
#[derive(Debug, Clone, PartialEq)]
pub struct DeparturePoints {
    grid: Grid,
    coords: [Vec<f32>; 3],
    on_nodes: bool,
}

#[inline]
fn wrap_index_coord(u: f64, n: usize) -> f32 {
    let n_f = n as f64;
    let w = u.rem_euclid(n_f) as f32;
    if w >= n as f32 {
        0.0
    } else {
        w
    }
}

impl DeparturePoints {
    /// The grid nodes themselves.
    pub fn identity(grid: Grid) -> Self {
        let coords = std::array::from_fn(|a| {
            (0..grid.len()).map(|idx| grid.unravel(idx)[a] as f32).collect()
        });
        Self { grid, coords, on_nodes: true }
    }

    fn new(grid: Grid, coords: [Vec<f32>; 3]) -> Self {
        let on_nodes = (0..grid.len()).into_par_iter().all(|idx| {
            let node = grid.unravel(idx);
            (0..3).all(|a| coords[a][idx] == node[a] as f32)
        });
        Self { grid, coords, on_nodes }
    }

    /// Builds points from physical coordinates, wrapping into `[0, 2π)` once.
    pub fn from_fn<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(usize, [f64; 3]) -> [f64; 3] + Sync,
    {
        let h = grid.spacing();
        let dims = grid.dims();
        let pts: Vec<[f64; 3]> =
            (0..grid.len()).into_par_iter().map(|idx| f(idx, grid.coords(idx))).collect();
        if pts.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("departure points"));
        }
        let coords =
            std::array::from_fn(|a| pts.iter().map(|p| wrap_index_coord(p[a] / h[a], dims[a])).collect());
        Ok(Self::new(grid, coords))
    }

    /// Points x + d(x) for a per-node offset given in grid-index units.
    pub(crate) fn from_index_offsets<F>(grid: Grid, offset: F) -> Result<Self>
    where
        F: Fn(usize) -> [f64; 3] + Sync,
    {
        let dims = grid.dims();
        let offsets: Vec<[f64; 3]> = (0..grid.len()).into_par_iter().map(&offset).collect();
        if offsets.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("departure points"));
        }
        let coords = std::array::from_fn(|a| {
            offsets
                .par_iter()
                .enumerate()
                .map(|(idx, d)| wrap_index_coord(grid.unravel(idx)[a] as f64 + d[a], dims[a]))
                .collect()
        });
        Ok(Self::new(grid, coords))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.coords[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether every point coincides with its own grid node.
    pub fn is_identity(&self) -> bool {
        self.on_nodes
    }

    /// Grid-index coordinates of point `idx`.
    #[inline]
    pub fn index_coords(&self, idx: usize) -> [f32; 3] {
        [self.coords[0][idx], self.coords[1][idx], self.coords[2][idx]]
    }

    /// Physical coordinates of point `idx`, in `[0, 2π)`.
    pub fn physical(&self, idx: usize) -> [f64; 3] {
        let h = self.grid.spacing();
        let p = self.index_coords(idx);
        std::array::from_fn(|a| p[a] as f64 * h[a])
    }

    /// Periodic offset of point `idx` from its own node, in physical units,
    /// taken as the representative in (−π, π].
    pub fn displacement(&self, idx: usize) -> [f64; 3] {
        let dims = self.grid.dims();
        let node = self.grid.unravel(idx);
        let p = self.index_coords(idx);
        std::array::from_fn(|a| {
            let n = dims[a] as f64;
            let mut d = p[a] as f64 - node[a] as f64;
            if d > n / 2.0 {
                d -= n;
            } else if d <= -n / 2.0 {
                d += n;
            }
            d * TAU / n
        })
    }
}

/// Input to [`interp_eval`]: nodal samples or B-spline coefficients.
#[derive(Debug, Clone, Copy)]
pub enum InterpInput<'a, T: Real = f32> {
    Nodal(&'a ScalarField<T>),
    Coefficients(&'a CoefficientField<T>),
}

impl<'a, T: Real> InterpInput<'a, T> {
    fn field(&self) -> &'a ScalarField<T> {
        match *self {
            InterpInput::Nodal(f) => f,
            InterpInput::Coefficients(c) => c.as_field(),
        }
    }
}

/// Evaluates `input` at every point with the given kernel.
///
/// B-spline evaluation takes coefficients; the other variants take nodal
/// values.
pub fn interp_eval<T: Real>(
    input: InterpInput<'_, T>,
    points: &DeparturePoints,
    variant: InterpVariant,
) -> Result<ScalarField<T>> {
    match (variant, &input) {
        (InterpVariant::Bspline, InterpInput::Nodal(_)) => {
            return Err(Error::InvalidConfig("bspline interpolation needs prefiltered coefficients".into()))
        }
        (InterpVariant::Linear | InterpVariant::Lagrange, InterpInput::Coefficients(_)) => {
            return Err(Error::InvalidConfig(format!("{variant} interpolation takes nodal values")))
        }
        _ => {}
    }
    let field = input.field();
    field.grid().ensure_same(points.grid())?;
    Ok(eval_unchecked(field, points, variant))
}

/// Interpolates nodal values, prefiltering first when the kernel needs it.
pub fn interpolate<T: Real>(
    f: &ScalarField<T>,
    points: &DeparturePoints,
    variant: InterpVariant,
) -> Result<ScalarField<T>> {
    if variant.needs_prefilter() && points.is_identity() {
        f.grid().ensure_same(points.grid())?;
        // the exact spline interpolant reproduces nodal data
        Ok(f.clone())
    } else if variant.needs_prefilter() {
        interp_eval(InterpInput::Coefficients(&prefilter_bspline(f)), points, variant)
    } else {
        interp_eval(InterpInput::Nodal(f), points, variant)
    }
}

pub(crate) fn eval_unchecked<T: Real>(
    field: &ScalarField<T>,
    points: &DeparturePoints,
    variant: InterpVariant,
) -> ScalarField<T> {
    let out = match variant {
        InterpVariant::Linear => sweep::<T, 2>(field, points, 0, weights::linear),
        InterpVariant::Lagrange => sweep::<T, 4>(field, points, -1, weights::lagrange),
        InterpVariant::Bspline => sweep::<T, 4>(field, points, -1, weights::bspline),
    };
    ScalarField::from_vec_unchecked(*field.grid(), out)
}

fn sweep<T: Real, const S: usize>(
    field: &ScalarField<T>,
    points: &DeparturePoints,
    first: isize,
    kernel: fn(f32) -> [f32; S],
) -> Vec<T> {
    let grid = field.grid();
    let dims = grid.dims().map(|n| n as isize);
    let (s1, s2) = (grid.stride(crate::grid::Axis::X1), grid.stride(crate::grid::Axis::X2));
    let data = field.as_slice();
    let wrap = |i: isize, n: isize| -> usize {
        (if i < 0 {
            i + n
        } else if i >= n {
            i - n
        } else {
            i
        }) as usize
    };
    (0..points.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|idx| {
            let p = points.index_coords(idx);
            let mut base = [0isize; 3];
            let mut w = [[T::zero(); S]; 3];
            for a in 0..3 {
                let fl = p[a].floor();
                base[a] = fl as isize + first;
                w[a] = kernel(p[a] - fl).map(|x| T::of(x as f64));
            }
            let i3: [usize; S] = std::array::from_fn(|s| wrap(base[2] + s as isize, dims[2]));
            let mut acc = T::zero();
            for a in 0..S {
                let o1 = wrap(base[0] + a as isize, dims[0]) * s1;
                let mut acc2 = T::zero();
                for b in 0..S {
                    let row = o1 + wrap(base[1] + b as isize, dims[1]) * s2;
                    let mut acc3 = T::zero();
                    for c in 0..S {
                        acc3 = acc3 + w[2][c] * data[row + i3[c]];
                    }
                    acc2 = acc2 + w[1][b] * acc3;
                }
                acc = acc + w[0][a] * acc2;
            }
            acc
        })
        .collect()
}

/// Nearest-node lookup, used for label maps.
pub fn nearest_labels(labels: &LabelMap, points: &DeparturePoints) -> Result<LabelMap> {
    labels.grid().ensure_same(points.grid())?;
    let grid = *labels.grid();
    let dims = grid.dims();
    let src = labels.as_slice();
    let out = (0..points.len())
        .into_par_iter()
        .map(|idx| {
            let p = points.index_coords(idx);
            let n: [usize; 3] = std::array::from_fn(|a| (p[a].round() as usize) % dims[a]);
            src[grid.index(n[0], n[1], n[2])]
        })
        .collect();
    LabelMap::from_vec(grid, out)
}
