//! FFT-based operators on the periodic grid: first derivatives, the
//! Laplacian, and the regularization operator A = −Δ − γ∇(∇·) with its
//! inverse.
//!
//! Wavenumbers are integers because the domain has period 2π. First-order
//! operators drop the Nyquist mode along the differentiated axis so that
//! real inputs give real outputs; even operators keep it.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::field::{Real, ScalarField, VectorField};
use crate::grid::{Axis, Grid};

use super::RegularizationConfig;

/// Symmetric integer wavenumber of FFT index `m` on `n` points; the Nyquist
/// index maps to −n/2.
#[inline]
pub fn wavenumber(m: usize, n: usize) -> f64 {
    if m < n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// Wavenumber used by odd (first-order) operators: Nyquist zeroed.
#[inline]
pub fn odd_wavenumber(m: usize, n: usize) -> f64 {
    if 2 * m == n {
        0.0
    } else {
        wavenumber(m, n)
    }
}

/// Complex 3D FFT built from batched 1D transforms.
pub struct Fft3<T: Real> {
    grid: Grid,
    forward: [Arc<dyn Fft<T>>; 3],
    inverse: [Arc<dyn Fft<T>>; 3],
}

impl<T: Real> Fft3<T> {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let dims = grid.dims();
        Self {
            grid,
            forward: dims.map(|n| planner.plan_fft_forward(n)),
            inverse: dims.map(|n| planner.plan_fft_inverse(n)),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform including the 1/N normalization.
    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.inverse);
        let scale = T::of(1.0 / self.grid.len() as f64);
        data.par_iter_mut().for_each(|c| *c = *c * scale);
    }

    fn transform(&self, data: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>; 3]) {
        let [n1, n2, n3] = self.grid.dims();
        assert_eq!(data.len(), n1 * n2 * n3);

        // x3: contiguous lines.
        data.par_chunks_mut(n3 * n2).for_each(|slab| plans[2].process(slab));

        // x2: transpose each slab so lines become contiguous.
        data.par_chunks_mut(n2 * n3).for_each_init(
            || vec![Complex::default(); n2 * n3],
            |buf, slab| {
                for j in 0..n2 {
                    for k in 0..n3 {
                        buf[k * n2 + j] = slab[j * n3 + k];
                    }
                }
                plans[1].process(buf);
                for j in 0..n2 {
                    for k in 0..n3 {
                        slab[j * n3 + k] = buf[k * n2 + j];
                    }
                }
            },
        );

        // x1: full transpose into (j, k, i) order.
        let mut tmp = vec![Complex::default(); data.len()];
        {
            let src: &[Complex<T>] = data;
            tmp.par_chunks_mut(n1).enumerate().for_each(|(jk, line)| {
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = src[i * n2 * n3 + jk];
                }
            });
        }
        tmp.par_chunks_mut(n1 * n3).for_each(|block| plans[0].process(block));
        data.par_chunks_mut(n2 * n3).enumerate().for_each(|(i, slab)| {
            for (jk, slot) in slab.iter_mut().enumerate() {
                *slot = tmp[jk * n1 + i];
            }
        });
    }
}

/// Spectral operators on one grid, with cached transform plans.
pub struct SpectralOps<T: Real> {
    fft: Fft3<T>,
}

impl<T: Real> SpectralOps<T> {
    pub fn new(grid: Grid) -> Self {
        Self { fft: Fft3::new(grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.fft.grid()
    }

    fn to_spectrum(&self, re: &ScalarField<T>, im: Option<&ScalarField<T>>) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = match im {
            Some(im) => re
                .as_slice()
                .par_iter()
                .zip(im.as_slice().par_iter())
                .map(|(&a, &b)| Complex::new(a, b))
                .collect(),
            None => re.as_slice().par_iter().map(|&a| Complex::new(a, T::zero())).collect(),
        };
        self.fft.forward(&mut buf);
        buf
    }

    /// Inverse transform of a spectrum known to come from real fields:
    /// returns (real part, imaginary part).
    fn inverse_pair(&self, mut buf: Vec<Complex<T>>) -> (ScalarField<T>, ScalarField<T>) {
        self.fft.inverse(&mut buf);
        let grid = *self.grid();
        let re = buf.par_iter().map(|c| c.re).collect();
        let im = buf.par_iter().map(|c| c.im).collect();
        (ScalarField::from_vec_unchecked(grid, re), ScalarField::from_vec_unchecked(grid, im))
    }

    fn inverse_real(&self, mut buf: Vec<Complex<T>>) -> ScalarField<T> {
        self.fft.inverse(&mut buf);
        let re = buf.par_iter().map(|c| c.re).collect();
        ScalarField::from_vec_unchecked(*self.grid(), re)
    }

    /// Index of the mirrored frequency −k.
    #[inline]
    fn mirror(&self, idx: usize) -> usize {
        let g = self.grid();
        let [n1, n2, n3] = g.dims();
        let [i, j, k] = g.unravel(idx);
        g.index((n1 - i) % n1, (n2 - j) % n2, (n3 - k) % n3)
    }

    /// Spectra of u₁ + i·u₂ split back into the spectra of u₁ and u₂.
    fn spectra_of_three(&self, u: &VectorField<T>) -> [Vec<Complex<T>>; 3] {
        let [u1, u2, u3] = u.components();
        let z = self.to_spectrum(u1, Some(u2));
        let half = T::of(0.5);
        let (s1, s2): (Vec<_>, Vec<_>) = (0..z.len())
            .into_par_iter()
            .map(|idx| {
                let a = z[idx];
                let b = z[self.mirror(idx)].conj();
                // (a + b)/2 and (a − b)/(2i)
                let d = a - b;
                ((a + b) * half, Complex::new(d.im, -d.re) * half)
            })
            .unzip();
        [s1, s2, self.to_spectrum(u3, None)]
    }

    fn wavevector(&self, idx: usize) -> ([f64; 3], [f64; 3]) {
        let g = self.grid();
        let dims = g.dims();
        let m = g.unravel(idx);
        (
            std::array::from_fn(|a| wavenumber(m[a], dims[a])),
            std::array::from_fn(|a| odd_wavenumber(m[a], dims[a])),
        )
    }

    pub fn partial(&self, f: &ScalarField<T>, axis: Axis) -> ScalarField<T> {
        let a = axis.index();
        let mut s = self.to_spectrum(f, None);
        s.par_iter_mut().enumerate().for_each(|(idx, c)| {
            let k = T::of(self.wavevector(idx).1[a]);
            *c = Complex::new(-c.im * k, c.re * k);
        });
        self.inverse_real(s)
    }

    pub fn gradient(&self, f: &ScalarField<T>) -> VectorField<T> {
        let s = self.to_spectrum(f, None);
        // i·k₁F + i·(i·k₂F) carries ∂₁f in the real and ∂₂f in the imaginary part.
        let (s12, s3): (Vec<_>, Vec<_>) = s
            .par_iter()
            .enumerate()
            .map(|(idx, &c)| {
                let kd = self.wavevector(idx).1.map(T::of);
                let ik1 = Complex::new(-c.im * kd[0], c.re * kd[0]);
                let mk2 = c * (-kd[1]);
                let ik3 = Complex::new(-c.im * kd[2], c.re * kd[2]);
                (ik1 + mk2, ik3)
            })
            .unzip();
        let (d1, d2) = self.inverse_pair(s12);
        let d3 = self.inverse_real(s3);
        VectorField::from_components([d1, d2, d3]).expect("same grid")
    }

    pub fn divergence(&self, u: &VectorField<T>) -> ScalarField<T> {
        let [s1, s2, s3] = self.spectra_of_three(u);
        let d = (0..s1.len())
            .into_par_iter()
            .map(|idx| {
                let kd = self.wavevector(idx).1.map(T::of);
                let sum = s1[idx] * kd[0] + s2[idx] * kd[1] + s3[idx] * kd[2];
                Complex::new(-sum.im, sum.re)
            })
            .collect();
        self.inverse_real(d)
    }

    /// Δf with the full symbol −|k|².
    pub fn laplacian(&self, f: &ScalarField<T>) -> ScalarField<T> {
        let mut s = self.to_spectrum(f, None);
        s.par_iter_mut().enumerate().for_each(|(idx, c)| {
            let k = self.wavevector(idx).0;
            *c = *c * T::of(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
        });
        self.inverse_real(s)
    }

    /// Applies a per-frequency 3×3 map to a vector field.
    fn apply_symbol<F>(&self, v: &VectorField<T>, symbol: F) -> VectorField<T>
    where
        F: Fn([f64; 3], [f64; 3], [Complex<f64>; 3]) -> [Complex<f64>; 3] + Sync,
    {
        let [s1, s2, s3] = self.spectra_of_three(v);
        let cvt = |c: Complex<T>| Complex::new(c.re.as_f64(), c.im.as_f64());
        let back = |c: Complex<f64>| Complex::new(T::of(c.re), T::of(c.im));
        let (r12, r3): (Vec<_>, Vec<_>) = (0..s1.len())
            .into_par_iter()
            .map(|idx| {
                let (k, kd) = self.wavevector(idx);
                let r = symbol(k, kd, [cvt(s1[idx]), cvt(s2[idx]), cvt(s3[idx])]);
                // pack r₁ + i·r₂ for a single inverse transform
                let packed = r[0] + Complex::new(-r[1].im, r[1].re);
                (back(packed), back(r[2]))
            })
            .unzip();
        let (r1, r2) = self.inverse_pair(r12);
        let r3 = self.inverse_real(r3);
        VectorField::from_components([r1, r2, r3]).expect("same grid")
    }

    /// A·v with symbol |k|²I + γ·k̃k̃ᵀ (k̃: Nyquist-free wavevector); the
    /// zero mode passes through unchanged. β is not applied.
    pub fn regularization(&self, v: &VectorField<T>, cfg: &RegularizationConfig) -> VectorField<T> {
        let gamma = cfg.gamma();
        self.apply_symbol(v, |k, kd, s| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return s;
            }
            let kv = s[0] * kd[0] + s[1] * kd[1] + s[2] * kd[2];
            std::array::from_fn(|a| s[a] * k2 + kv * (gamma * kd[a]))
        })
    }

    /// (βA)⁻¹·r through the Sherman–Morrison inverse of each symbol.
    pub fn inverse_regularization(
        &self,
        r: &VectorField<T>,
        cfg: &RegularizationConfig,
    ) -> VectorField<T> {
        let (beta, gamma) = (cfg.beta(), cfg.gamma());
        self.apply_symbol(r, |k, kd, s| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return s.map(|c| c / beta);
            }
            let kd2 = kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2];
            let kv = s[0] * kd[0] + s[1] * kd[1] + s[2] * kd[2];
            let coupling = gamma / (k2 * (k2 + gamma * kd2));
            std::array::from_fn(|a| (s[a] / k2 - kv * (coupling * kd[a])) / beta)
        })
    }
}

pub fn spectral_gradient<T: Real>(f: &ScalarField<T>) -> VectorField<T> {
    SpectralOps::new(*f.grid()).gradient(f)
}

pub fn spectral_divergence<T: Real>(u: &VectorField<T>) -> ScalarField<T> {
    SpectralOps::new(*u.grid()).divergence(u)
}

pub fn spectral_laplacian<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    SpectralOps::new(*f.grid()).laplacian(f)
}

/// A·v (β applied by callers).
pub fn apply_regularization<T: Real>(
    v: &VectorField<T>,
    cfg: &RegularizationConfig,
) -> VectorField<T> {
    SpectralOps::new(*v.grid()).regularization(v, cfg)
}

/// β⁻¹A⁻¹·r.
pub fn apply_inverse_regularization<T: Real>(
    r: &VectorField<T>,
    cfg: &RegularizationConfig,
) -> VectorField<T> {
    SpectralOps::new(*r.grid()).inverse_regularization(r, cfg)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn rel<T: Real>(got: &ScalarField<T>, want: &ScalarField<T>) -> f64 {
        got.sub(want).norm() / want.norm()
    }

    fn vrel(got: &VectorField, want: &VectorField) -> f64 {
        got.sub(want).norm() / want.norm()
    }

    fn random_field(grid: Grid, seed: u64) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps = std::array::from_fn(|_| {
            let data = (0..grid.len()).map(|_| rng.random_range(-1.0f32..1.0)).collect();
            ScalarField::from_vec(grid, data).unwrap()
        });
        VectorField::from_components(comps).unwrap()
    }

    fn reg(beta: f64, gamma: f64) -> RegularizationConfig {
        RegularizationConfig::new(beta, gamma).unwrap()
    }

    #[test]
    fn wavenumbers_are_symmetric() {
        let ks: Vec<f64> = (0..8).map(|m| wavenumber(m, 8)).collect();
        assert_eq!(ks, [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        assert_eq!(odd_wavenumber(4, 8), 0.0);
    }

    #[test]
    fn fft_roundtrip() {
        let g = Grid::new([16, 18, 20]).unwrap();
        let fft = Fft3::<f64>::new(g);
        let orig: Vec<Complex<f64>> =
            (0..g.len()).map(|i| Complex::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut buf = orig.clone();
        fft.forward(&mut buf);
        // single mode lands where expected
        fft.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut delta = vec![Complex::new(0.0, 0.0); g.len()];
        delta[0] = Complex::new(1.0, 0.0);
        fft.forward(&mut delta);
        assert!(delta.iter().all(|c| (c - Complex::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn band_limited_derivative_is_exact_in_f32() {
        let g = Grid::cubic(32).unwrap();
        let f = ScalarField::<f32>::from_fn(g, |x| (5.0 * x[1]).sin());
        let want = ScalarField::<f32>::from_fn(g, |x| 5.0 * (5.0 * x[1]).cos());
        let grad = spectral_gradient(&f);
        assert!(rel(grad.component(Axis::X2), &want) <= 1e-5);
        assert!(grad.component(Axis::X1).max_abs() < 1e-4);
        let ops = SpectralOps::<f32>::new(g);
        assert!(rel(&ops.partial(&f, Axis::X2), &want) <= 1e-5);
    }

    #[test]
    fn gradient_components_on_anisotropic_grid() {
        let g = Grid::new([16, 32, 20]).unwrap();
        let f = ScalarField::<f64>::from_fn(g, |x| (2.0 * x[0]).sin() * (3.0 * x[1]).cos() + x[2].sin());
        let grad = spectral_gradient(&f);
        let want = [
            ScalarField::<f64>::from_fn(g, |x| 2.0 * (2.0 * x[0]).cos() * (3.0 * x[1]).cos()),
            ScalarField::<f64>::from_fn(g, |x| -3.0 * (2.0 * x[0]).sin() * (3.0 * x[1]).sin()),
            ScalarField::<f64>::from_fn(g, |x| x[2].cos()),
        ];
        for a in Axis::ALL {
            assert!(rel(grad.component(a), &want[a.index()]) < 1e-12, "{a:?}");
        }
    }

    #[test]
    fn divergence_of_gradient_matches_laplacian() {
        let g = Grid::cubic(32).unwrap();
        let f = ScalarField::<f32>::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() * (3.0 * x[2]).cos());
        let lap = spectral_laplacian(&f);
        assert!(rel(&spectral_divergence(&spectral_gradient(&f)), &lap) <= 1e-5);
    }

    #[test]
    fn nyquist_mode_has_zero_first_derivative() {
        let g = Grid::cubic(16).unwrap();
        let f = ScalarField::<f64>::from_fn(g, |x| (8.0 * x[0]).cos());
        assert!(spectral_gradient(&f).max_abs() < 1e-12);
    }

    #[test]
    fn divergence_free_field_sees_only_laplacian() {
        let g = Grid::cubic(16).unwrap();
        let v = VectorField::<f32>::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
        let av = apply_regularization(&v, &reg(1.0, 0.7));
        assert!(vrel(&av, &v) < 1e-5);
    }

    #[test]
    fn constant_field_is_passed_through() {
        let g = Grid::cubic(16).unwrap();
        let v = VectorField::<f32>::from_fn(g, |_| [1.5, -2.0, 0.25]);
        let av = apply_regularization(&v, &reg(5e-4, 1e-4));
        assert!(vrel(&av, &v) < 1e-6);
    }

    #[test]
    fn regularization_is_self_adjoint_and_nonnegative() {
        let g = Grid::cubic(16).unwrap();
        let cfg = reg(1.0, 0.3);
        let v = random_field(g, 1);
        let w = random_field(g, 2);
        let lhs = apply_regularization(&v, &cfg).dot(&w);
        let rhs = v.dot(&apply_regularization(&w, &cfg));
        assert!((lhs - rhs).abs() <= 1e-5 * lhs.abs());
        assert!(apply_regularization(&v, &cfg).dot(&v) >= 0.0);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = Grid::cubic(16).unwrap();
        let cfg = reg(5e-4, 1e-4);
        let mut v = random_field(g, 4);
        // remove the mean so the identity convention plays no role
        for c in v.components_mut() {
            let m = c.mean() as f32;
            c.as_mut_slice().iter_mut().for_each(|x| *x -= m);
        }
        let mut av = apply_regularization(&v, &cfg);
        av.scale(cfg.beta() as f32);
        assert!(vrel(&apply_inverse_regularization(&av, &cfg), &v) <= 1e-5);
        // with a strong divergence penalty as well
        let cfg = reg(0.1, 3.0);
        let mut av = apply_regularization(&v, &cfg);
        av.scale(0.1);
        assert!(vrel(&apply_inverse_regularization(&av, &cfg), &v) <= 1e-5);
    }

    #[test]
    fn inverse_of_zero_is_zero() {
        let g = Grid::cubic(16).unwrap();
        let z = VectorField::<f32>::zeros(g);
        assert_eq!(apply_inverse_regularization(&z, &reg(5e-4, 1e-4)).max_abs(), 0.0);
    }

    #[test]
    fn inverse_vector_laplacian_symbol() {
        let g = Grid::cubic(16).unwrap();
        let v = VectorField::<f32>::from_fn(g, |x| [(2.0 * x[0]).sin(), 0.0, 0.0]);
        let got = apply_inverse_regularization(&v, &reg(1.0, 0.0));
        assert!(vrel(&got, &v.scaled(0.25)) < 1e-6);
    }
}
