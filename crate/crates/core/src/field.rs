//! Node-valued fields on a [`Grid`] and deterministic reductions over them.
//!
//! Fields store single precision by default. Reductions accumulate in `f64`
//! over fixed-size chunks that are summed in index order, so results do not
//! depend on how the chunks are scheduled across threads.

use std::fmt::Debug;
use std::iter::Sum;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};

/// Chunk length for reductions; fixed so sums are reproducible.
const REDUCE_CHUNK: usize = 4096;

/// Floating point type a field can hold.
pub trait Real:
    num_traits::Float + rustfft::FftNum + Default + Send + Sync + Sum + Debug + 'static
{
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Ordered chunked sum of `f(i)` over `0..len`, accumulated in double precision.
pub(crate) fn chunked_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..len.div_ceil(REDUCE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(len);
            (lo..hi).map(&f).sum::<f64>()
        })
        .collect();
    partials.iter().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T: Real = f32> {
    grid: Grid,
    data: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, data: vec![T::zero(); grid.len()] }
    }

    pub fn constant(grid: Grid, value: T) -> Self {
        Self { grid, data: vec![value; grid.len()] }
    }

    /// Wraps `data`, checking its length and that every value is finite.
    pub fn from_vec(grid: Grid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field"));
        }
        Ok(Self { grid, data })
    }

    /// Length and finiteness are the caller's responsibility.
    pub(crate) fn from_vec_unchecked(grid: Grid, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    /// Samples `f` at every node.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        let data = (0..grid.len())
            .into_par_iter()
            .map(|idx| T::of(f(grid.coords(idx))))
            .collect();
        Self { grid, data }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.data[self.grid.index(i, j, k)]
    }

    pub fn cast<U: Real>(&self) -> ScalarField<U> {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T + Sync + Send) -> Self {
        Self { grid: self.grid, data: self.data.par_iter().map(|&v| f(v)).collect() }
    }

    /// Unweighted inner product Σ aᵢbᵢ; panics if the grids differ.
    pub fn sum_product(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "sum_product on mismatched grids");
        let (a, b) = (&self.data, &other.data);
        chunked_sum(a.len(), |i| a[i].as_f64() * b[i].as_f64())
    }

    /// Quadrature inner product h₁h₂h₃·Σ aᵢbᵢ; panics if the grids differ.
    pub fn dot(&self, other: &Self) -> f64 {
        self.grid.cell_volume() * self.sum_product(other)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// ∫ f dx by the periodic trapezoid rule.
    pub fn integral(&self) -> f64 {
        let a = &self.data;
        self.grid.cell_volume() * chunked_sum(a.len(), |i| a[i].as_f64())
    }

    pub fn mean(&self) -> f64 {
        let a = &self.data;
        chunked_sum(a.len(), |i| a[i].as_f64()) / a.len() as f64
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (T, T) {
        self.data
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// self ← self + alpha·x
    pub fn axpy(&mut self, alpha: T, x: &Self) {
        assert_eq!(self.grid, x.grid, "axpy on mismatched grids");
        self.data.par_iter_mut().zip(x.data.par_iter()).for_each(|(y, &xv)| *y = *y + alpha * xv);
    }

    pub fn scale(&mut self, alpha: T) {
        self.data.par_iter_mut().for_each(|v| *v = *v * alpha);
    }

    pub fn scaled(&self, alpha: T) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "sub on mismatched grids");
        Self {
            grid: self.grid,
            data: self.data.par_iter().zip(other.data.par_iter()).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Quadrature inner product of two fields on the same grid.
pub fn inner_product<T: Real>(a: &ScalarField<T>, b: &ScalarField<T>) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    Ok(a.dot(b))
}

/// L² norm with the h₁h₂h₃ quadrature weight.
pub fn norm2<T: Real>(a: &ScalarField<T>) -> f64 {
    a.norm()
}

/// Three scalar components on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T: Real = f32> {
    comps: [ScalarField<T>; 3],
}

impl<T: Real> VectorField<T> {
    pub fn zeros(grid: Grid) -> Self {
        Self { comps: std::array::from_fn(|_| ScalarField::zeros(grid)) }
    }

    pub fn from_components(comps: [ScalarField<T>; 3]) -> Result<Self> {
        comps[0].grid().ensure_same(comps[1].grid())?;
        comps[0].grid().ensure_same(comps[2].grid())?;
        Ok(Self { comps })
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        Self { comps: std::array::from_fn(|c| ScalarField::from_fn(grid, |x| f(x)[c])) }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    #[inline]
    pub fn component(&self, axis: Axis) -> &ScalarField<T> {
        &self.comps[axis.index()]
    }

    #[inline]
    pub fn components(&self) -> &[ScalarField<T>; 3] {
        &self.comps
    }

    #[inline]
    pub fn components_mut(&mut self) -> &mut [ScalarField<T>; 3] {
        &mut self.comps
    }

    pub fn into_components(self) -> [ScalarField<T>; 3] {
        self.comps
    }

    pub fn cast<U: Real>(&self) -> VectorField<U> {
        VectorField { comps: std::array::from_fn(|c| self.comps[c].cast()) }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.comps.iter().zip(&other.comps).map(|(a, b)| a.dot(b)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn axpy(&mut self, alpha: T, x: &Self) {
        for (y, xc) in self.comps.iter_mut().zip(&x.comps) {
            y.axpy(alpha, xc);
        }
    }

    pub fn scale(&mut self, alpha: T) {
        for c in &mut self.comps {
            c.scale(alpha);
        }
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self { comps: std::array::from_fn(|c| self.comps[c].scaled(alpha)) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { comps: std::array::from_fn(|c| self.comps[c].sub(&other.comps[c])) }
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.comps.iter().all(|c| c.all_finite())
    }

    /// Pointwise u·w as a scalar field.
    pub fn pointwise_dot(&self, other: &Self) -> ScalarField<T> {
        let [a1, a2, a3] = &self.comps;
        let [b1, b2, b3] = &other.comps;
        let (a1, a2, a3) = (a1.as_slice(), a2.as_slice(), a3.as_slice());
        let (b1, b2, b3) = (b1.as_slice(), b2.as_slice(), b3.as_slice());
        let data = (0..a1.len())
            .into_par_iter()
            .map(|i| a1[i] * b1[i] + a2[i] * b2[i] + a3[i] * b3[i])
            .collect();
        ScalarField::from_vec_unchecked(*self.grid(), data)
    }
}

/// Integer region labels, one per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    grid: Grid,
    labels: Vec<u16>,
}

impl LabelMap {
    pub fn from_vec(grid: Grid, labels: Vec<u16>) -> Result<Self> {
        if labels.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: labels.len() });
        }
        Ok(Self { grid, labels })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> u16) -> Self {
        Self { grid, labels: (0..grid.len()).map(|i| f(grid.coords(i))).collect() }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn as_slice(&self) -> &[u16] {
        &self.labels
    }

    pub fn into_vec(self) -> Vec<u16> {
        self.labels
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn constant_inner_product_is_domain_volume() {
        let g = Grid::cubic(64).unwrap();
        let one = ScalarField::<f32>::constant(g, 1.0);
        let ip = inner_product(&one, &one).unwrap();
        assert!((ip - TAU.powi(3)).abs() / TAU.powi(3) < 1e-12);
    }

    #[test]
    fn sine_cosine_orthogonal() {
        let g = Grid::cubic(64).unwrap();
        let s = ScalarField::<f32>::from_fn(g, |x| x[2].sin());
        let c = ScalarField::<f32>::from_fn(g, |x| x[2].cos());
        let ip = inner_product(&s, &c).unwrap();
        assert!(ip.abs() / (s.norm() * c.norm()) < 1e-6);
    }

    #[test]
    fn norm_squares_to_self_inner_product() {
        let g = Grid::cubic(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = (0..g.len()).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let a = ScalarField::from_vec(g, data).unwrap();
        let n = norm2(&a);
        assert!((n * n - inner_product(&a, &a).unwrap()).abs() < 1e-9 * n * n);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = ScalarField::<f32>::zeros(Grid::cubic(16).unwrap());
        let b = ScalarField::<f32>::zeros(Grid::new([16, 16, 18]).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch { .. })));
        assert!(VectorField::from_components([a.clone(), a, b]).is_err());
    }

    #[test]
    fn from_vec_validates() {
        let g = Grid::cubic(16).unwrap();
        assert!(matches!(
            ScalarField::<f32>::from_vec(g, vec![0.0; 10]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut v = vec![0.0f32; g.len()];
        v[7] = f32::NAN;
        assert!(matches!(ScalarField::from_vec(g, v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn reductions_are_reproducible() {
        let g = Grid::cubic(32).unwrap();
        let a = ScalarField::<f32>::from_fn(g, |x| (3.0 * x[0]).sin() * x[1].cos() + 0.1 * x[2]);
        let first = a.dot(&a);
        for _ in 0..5 {
            assert_eq!(a.dot(&a).to_bits(), first.to_bits());
        }
    }

    #[test]
    fn periodic_samples_repeat() {
        let g = Grid::cubic(16).unwrap();
        let f = |x: [f64; 3]| (x[0]).sin() + (2.0 * x[1]).cos() * (x[2]).sin();
        let a = ScalarField::<f64>::from_fn(g, f);
        for idx in [0, 5, 300, g.len() - 1] {
            let x = g.coords(idx);
            let shifted = f([x[0] + TAU, x[1], x[2]]);
            assert!((a.as_slice()[idx] - shifted).abs() < 1e-12);
        }
    }
}
