use rayon::prelude::*;

use crate::diffops::RegularizationConfig;
use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::interp::DeparturePoints;
use crate::kernels::Kernels;
use crate::transport::{solve_adjoint, solve_inc_adjoint, solve_inc_state, solve_state, TimeGrid, TrajectoryStore};

/// One registration objective: transport `m0` so that it matches `m1`.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    kernels: &'a Kernels,
    m0: &'a ScalarField,
    m1: &'a ScalarField,
    reg: RegularizationConfig,
    tg: TimeGrid,
}

/// J(v) split into its two terms, with the state trajectory kept for reuse.
#[derive(Debug, Clone)]
pub struct Objective {
    pub value: f64,
    /// ½‖m(·,1) − m₁‖²
    pub distance: f64,
    /// (β/2)⟨Av, v⟩
    pub regularization: f64,
    pub state: TrajectoryStore,
}

/// Everything a Gauss–Newton matvec needs about the current iterate.
#[derive(Debug, Clone)]
pub struct Linearization {
    v: VectorField,
    state: TrajectoryStore,
    backward: DeparturePoints,
}

impl Linearization {
    pub fn velocity(&self) -> &VectorField {
        &self.v
    }

    pub fn state(&self) -> &TrajectoryStore {
        &self.state
    }
}

impl<'a> Problem<'a> {
    pub fn new(
        kernels: &'a Kernels,
        m0: &'a ScalarField,
        m1: &'a ScalarField,
        reg: RegularizationConfig,
        tg: TimeGrid,
    ) -> Result<Self> {
        m0.grid().ensure_same(m1.grid())?;
        Ok(Self { kernels, m0, m1, reg, tg })
    }

    pub fn kernels(&self) -> &'a Kernels {
        self.kernels
    }

    pub fn reg(&self) -> &RegularizationConfig {
        &self.reg
    }

    pub fn timegrid(&self) -> &TimeGrid {
        &self.tg
    }

    pub fn with_reg(&self, reg: RegularizationConfig) -> Self {
        Self { reg, ..*self }
    }

    pub fn objective(&self, v: &VectorField) -> Result<Objective> {
        let state = solve_state(self.kernels, v, self.m0, &self.tg)?;
        let residual = state.final_slice().sub(self.m1);
        let distance = 0.5 * residual.dot(&residual);
        let av = self.kernels.regularization(v, &self.reg);
        let regularization = 0.5 * self.reg.beta() * av.dot(v);
        Ok(Objective { value: distance + regularization, distance, regularization, state })
    }

    /// g = βAv + Σⱼ wⱼ λⱼ ∇mⱼ with λ(1) = m₁ − m(·,1). Reuses the state
    /// trajectory of `objective`, which must have been evaluated at `v`.
    pub fn gradient(&self, v: &VectorField, objective: &Objective) -> Result<(VectorField, Linearization)> {
        let state = &objective.state;
        let lambda_final = self.m1.sub(state.final_slice());
        let adjoint = solve_adjoint(self.kernels, v, &lambda_final, &self.tg)?;
        let mut g = self.kernels.regularization(v, &self.reg);
        g.scale(self.reg.beta() as f32);
        self.accumulate_body_force(&mut g, adjoint.slices(), state)?;
        let lin = Linearization { v: v.clone(), state: state.clone(), backward: adjoint.departure_points().clone() };
        Ok((g, lin))
    }

    /// Gauss–Newton Hessian applied to ṽ: βAṽ + Σⱼ wⱼ λ̃ⱼ ∇mⱼ, where λ̃
    /// solves the incremental adjoint with λ̃(1) = −m̃(·,1).
    pub fn hessian_matvec(&self, lin: &Linearization, v_tilde: &VectorField) -> Result<VectorField> {
        let inc_state = solve_inc_state(self.kernels, v_tilde, &lin.state, &self.tg)?;
        let lambda_final = inc_state.final_slice().scaled(-1.0);
        let inc_adjoint = solve_inc_adjoint(self.kernels, &lin.v, &lambda_final, &lin.backward, &self.tg)?;
        let mut hv = self.kernels.regularization(v_tilde, &self.reg);
        hv.scale(self.reg.beta() as f32);
        self.accumulate_body_force(&mut hv, inc_adjoint.slices(), &lin.state)?;
        Ok(hv)
    }

    /// out += Σⱼ wⱼ λⱼ ∇mⱼ (trapezoidal in time).
    fn accumulate_body_force(
        &self,
        out: &mut VectorField,
        lambda: &[ScalarField],
        state: &TrajectoryStore,
    ) -> Result<()> {
        let weights = self.tg.weights();
        for (j, w) in weights.iter().enumerate() {
            let grad = self.kernels.gradient(state.slice(j));
            let lam = lambda[j].as_slice();
            let w = *w as f32;
            for (o, gc) in out.components_mut().iter_mut().zip(grad.components()) {
                o.as_mut_slice()
                    .par_iter_mut()
                    .zip(lam.par_iter().zip(gc.as_slice().par_iter()))
                    .for_each(|(o, (&l, &d))| *o += w * l * d);
            }
        }
        Ok(())
    }
}
