//! Periodic domain (0, 2π)³ sampled on an equispaced node lattice.
//!
//! Node (i, j, k) sits at (i·h₁, j·h₂, k·h₃) with hᵢ = 2π/Nᵢ. Storage is
//! lexicographic with the third index running fastest.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible extent along any axis (the FD8 stencil spans 9 nodes).
pub const MIN_EXTENT: usize = 16;

/// Spatial axis of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct Grid {
    dims: [usize; 3],
}

impl Grid {
    /// Builds a grid; every extent must be even and at least [`MIN_EXTENT`].
    pub fn new(dims: [usize; 3]) -> Result<Self> {
        if dims.iter().any(|&n| n < MIN_EXTENT) {
            return Err(Error::InvalidGrid { dims, reason: "every extent must be at least 16" });
        }
        if dims.iter().any(|&n| n % 2 != 0) {
            return Err(Error::InvalidGrid { dims, reason: "every extent must be even" });
        }
        Ok(Self { dims })
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n, n, n])
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn extent(&self, axis: Axis) -> usize {
        self.dims[axis.index()]
    }

    /// Total number of nodes N₁N₂N₃.
    #[inline]
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.dims.map(|n| TAU / n as f64)
    }

    #[inline]
    pub fn spacing_along(&self, axis: Axis) -> f64 {
        TAU / self.extent(axis) as f64
    }

    /// Quadrature weight h₁h₂h₃ of a single node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// Linear offset between neighbours along `axis`.
    #[inline]
    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::X1 => self.dims[1] * self.dims[2],
            Axis::X2 => self.dims[2],
            Axis::X3 => 1,
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    /// Index of node (i, j, k) with each component wrapped periodically.
    #[inline]
    pub fn wrapped_index(&self, i: isize, j: isize, k: isize) -> usize {
        let w = |a: isize, n: usize| a.rem_euclid(n as isize) as usize;
        self.index(w(i, self.dims[0]), w(j, self.dims[1]), w(k, self.dims[2]))
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let rest = idx / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], k]
    }

    /// Physical coordinates of node `idx`.
    #[inline]
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unravel(idx);
        let h = self.spacing();
        [ijk[0] as f64 * h[0], ijk[1] as f64 * h[1], ijk[2] as f64 * h[2]]
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch { expected: self.dims, found: other.dims })
        }
    }
}

impl TryFrom<[usize; 3]> for Grid {
    type Error = Error;

    fn try_from(dims: [usize; 3]) -> Result<Self> {
        Grid::new(dims)
    }
}

impl From<Grid> for [usize; 3] {
    fn from(g: Grid) -> Self {
        g.dims
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.dims[0], self.dims[1], self.dims[2])
    }
}

/// Wraps a physical coordinate into [0, 2π).
#[inline]
pub fn wrap_coordinate(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}
