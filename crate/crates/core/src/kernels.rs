//! Counted dispatch of the differentiation and interpolation kernels.
//!
//! Every derivative, spectral operator and interpolation issued by the
//! transport and optimization code goes through a [`Kernels`] value, which
//! selects the configured backend and records one count per operation.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::counters::{OperatorCounters, Timer};
use crate::diffops::{
    fd8_divergence, fd8_gradient, fd8_partial, DerivativeBackend, RegularizationConfig,
    SpectralOps,
};
use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::grid::{Axis, Grid};
use crate::interp::{self, DeparturePoints, InterpVariant};

const D: u64 = 3;

pub struct Kernels {
    backend: DerivativeBackend,
    variant: InterpVariant,
    counters: Arc<OperatorCounters>,
    plans: RwLock<HashMap<[usize; 3], Arc<SpectralOps<f32>>>>,
}

impl Kernels {
    pub fn new(backend: DerivativeBackend, variant: InterpVariant) -> Self {
        Self::with_counters(backend, variant, Arc::new(OperatorCounters::new()))
    }

    pub fn with_counters(
        backend: DerivativeBackend,
        variant: InterpVariant,
        counters: Arc<OperatorCounters>,
    ) -> Self {
        Self { backend, variant, counters, plans: RwLock::new(HashMap::new()) }
    }

    pub fn backend(&self) -> DerivativeBackend {
        self.backend
    }

    pub fn variant(&self) -> InterpVariant {
        self.variant
    }

    pub fn counters(&self) -> &OperatorCounters {
        &self.counters
    }

    pub fn shared_counters(&self) -> Arc<OperatorCounters> {
        Arc::clone(&self.counters)
    }

    /// Cached spectral operators for `grid`.
    pub fn spectral(&self, grid: &Grid) -> Arc<SpectralOps<f32>> {
        let key = grid.dims();
        if let Some(ops) = self.plans.read().expect("plan cache poisoned").get(&key) {
            return Arc::clone(ops);
        }
        let mut plans = self.plans.write().expect("plan cache poisoned");
        Arc::clone(plans.entry(key).or_insert_with(|| Arc::new(SpectralOps::new(*grid))))
    }

    fn count_first_order(&self, n: u64) {
        match self.backend {
            DerivativeBackend::Fd8 => self.counters.add_fd_first_order(n),
            DerivativeBackend::Spectral => self.counters.add_fft_first_order(n),
        }
    }

    fn derivative_timer(&self) -> Timer {
        match self.backend {
            DerivativeBackend::Fd8 => Timer::Fd,
            DerivativeBackend::Spectral => Timer::Fft,
        }
    }

    pub fn partial(&self, f: &ScalarField, axis: Axis) -> ScalarField {
        self.count_first_order(1);
        self.counters.time(self.derivative_timer(), || match self.backend {
            DerivativeBackend::Fd8 => fd8_partial(f, axis),
            DerivativeBackend::Spectral => self.spectral(f.grid()).partial(f, axis),
        })
    }

    pub fn gradient(&self, f: &ScalarField) -> VectorField {
        self.count_first_order(D);
        self.counters.time(self.derivative_timer(), || match self.backend {
            DerivativeBackend::Fd8 => fd8_gradient(f),
            DerivativeBackend::Spectral => self.spectral(f.grid()).gradient(f),
        })
    }

    pub fn divergence(&self, u: &VectorField) -> ScalarField {
        self.count_first_order(D);
        self.counters.time(self.derivative_timer(), || match self.backend {
            DerivativeBackend::Fd8 => fd8_divergence(u),
            DerivativeBackend::Spectral => self.spectral(u.grid()).divergence(u),
        })
    }

    /// A·v, without β.
    pub fn regularization(&self, v: &VectorField, cfg: &RegularizationConfig) -> VectorField {
        self.counters.add_fft_other(D);
        self.counters.time(Timer::Fft, || self.spectral(v.grid()).regularization(v, cfg))
    }

    /// (βA)⁻¹·r.
    pub fn inverse_regularization(&self, r: &VectorField, cfg: &RegularizationConfig) -> VectorField {
        self.counters.add_fft_other(D);
        self.counters.time(Timer::Fft, || self.spectral(r.grid()).inverse_regularization(r, cfg))
    }

    /// One scalar interpolation sweep with the configured kernel.
    pub fn interpolate(&self, f: &ScalarField, points: &DeparturePoints) -> Result<ScalarField> {
        f.grid().ensure_same(points.grid())?;
        self.counters.add_interp(1);
        if self.variant.needs_prefilter() && points.is_identity() {
            return Ok(f.clone());
        }
        let coeffs;
        let source = if self.variant.needs_prefilter() {
            coeffs = self.counters.time(Timer::Prefilter, || interp::prefilter_bspline(f));
            coeffs.as_field()
        } else {
            f
        };
        Ok(self
            .counters
            .time(Timer::Interp, || interp::eval_unchecked(source, points, self.variant)))
    }

    /// Interpolates each component; counts one sweep per component.
    pub fn interpolate_vector(&self, u: &VectorField, points: &DeparturePoints) -> Result<VectorField> {
        let [a, b, c] = u.components();
        VectorField::from_components([
            self.interpolate(a, points)?,
            self.interpolate(b, points)?,
            self.interpolate(c, points)?,
        ])
    }
}

impl std::fmt::Debug for Kernels {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernels")
            .field("backend", &self.backend)
            .field("variant", &self.variant)
            .field("counters", &self.counters.snapshot())
            .finish()
    }
}
