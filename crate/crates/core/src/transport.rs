//! Semi-Lagrangian solvers for the state, adjoint, incremental state and
//! incremental adjoint equations of a stationary velocity field.
//!
//! Because v does not depend on time, the departure points of one step are
//! the same for every step; each solve traces them once and reuses them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::interp::DeparturePoints;
use crate::kernels::Kernels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct TimeGrid {
    nt: usize,
}

impl TimeGrid {
    pub fn new(nt: usize) -> Result<Self> {
        if nt == 0 {
            return Err(Error::InvalidConfig("number of time steps must be at least 1".into()));
        }
        if (1.0 / nt as f64) * nt as f64 != 1.0 {
            return Err(Error::InvalidConfig(format!("Nt = {nt} does not give Nt·δt = 1 exactly")));
        }
        Ok(Self { nt })
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.nt as f64
    }

    /// Trapezoidal quadrature weights for the Nt + 1 time slices.
    pub fn weights(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.nt).map(|j| if j == 0 || j == self.nt { dt / 2.0 } else { dt }).collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { nt: 4 }
    }
}

impl TryFrom<usize> for TimeGrid {
    type Error = Error;
    fn try_from(nt: usize) -> Result<Self> {
        Self::new(nt)
    }
}

impl From<TimeGrid> for usize {
    fn from(tg: TimeGrid) -> usize {
        tg.nt
    }
}

/// Sense in which a characteristic is traced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Transport along v (state equations).
    Forward,
    /// Transport along −v (adjoint equations, reversed time).
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// All Nt + 1 time slices of one transport solve, slot j holding t = j·δt,
/// together with the departure points the solve used.
#[derive(Debug, Clone)]
pub struct TrajectoryStore {
    slices: Vec<ScalarField>,
    departure: DeparturePoints,
}

impl TrajectoryStore {
    pub fn nt(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn slice(&self, j: usize) -> &ScalarField {
        &self.slices[j]
    }

    pub fn slices(&self) -> &[ScalarField] {
        &self.slices
    }

    pub fn initial(&self) -> &ScalarField {
        &self.slices[0]
    }

    pub fn final_slice(&self) -> &ScalarField {
        self.slices.last().expect("trajectory has at least two slices")
    }

    pub fn departure_points(&self) -> &DeparturePoints {
        &self.departure
    }

    pub fn into_slices(self) -> Vec<ScalarField> {
        self.slices
    }

    fn ensure_compatible(&self, tg: &TimeGrid, v: &VectorField) -> Result<()> {
        if self.nt() != tg.nt() {
            return Err(Error::TrajectoryMismatch(format!(
                "trajectory has {} steps, time grid has {}",
                self.nt(),
                tg.nt()
            )));
        }
        if self.slices[0].grid() != v.grid() {
            return Err(Error::TrajectoryMismatch(format!(
                "trajectory lives on {}, velocity on {}",
                self.slices[0].grid(),
                v.grid()
            )));
        }
        Ok(())
    }
}

/// Departure points of one step of length `dt` by second-order Runge–Kutta:
/// y* = x − s·δt·v(x), y = x − s·(δt/2)·(v(x) + v(y*)).
pub fn trace_characteristics(
    kernels: &Kernels,
    v: &VectorField,
    dt: f64,
    direction: Direction,
) -> Result<DeparturePoints> {
    if !v.all_finite() {
        return Err(Error::NonFinite("velocity"));
    }
    let grid = *v.grid();
    let h = grid.spacing();
    let s = direction.sign();
    let comps = v.components();
    let at = |idx: usize, a: usize| comps[a].as_slice()[idx] as f64;

    let predictor =
        DeparturePoints::from_index_offsets(grid, |idx| std::array::from_fn(|a| -s * dt * at(idx, a) / h[a]))?;
    let v_star = kernels.interpolate_vector(v, &predictor)?;
    let star = v_star.components();
    DeparturePoints::from_index_offsets(grid, |idx| {
        std::array::from_fn(|a| -s * 0.5 * dt * (at(idx, a) + star[a].as_slice()[idx] as f64) / h[a])
    })
}

/// Pure advection of `m0` over `nt` steps with fixed departure points.
pub fn advect(
    kernels: &Kernels,
    m0: &ScalarField,
    points: &DeparturePoints,
    nt: usize,
) -> Result<Vec<ScalarField>> {
    let mut slices = Vec::with_capacity(nt + 1);
    slices.push(m0.clone());
    for j in 0..nt {
        let next = kernels.interpolate(&slices[j], points)?;
        slices.push(next);
    }
    Ok(slices)
}

/// ∂ₜm + v·∇m = 0 with m(·,0) = m₀.
pub fn solve_state(
    kernels: &Kernels,
    v: &VectorField,
    m0: &ScalarField,
    tg: &TimeGrid,
) -> Result<TrajectoryStore> {
    v.grid().ensure_same(m0.grid())?;
    let departure = trace_characteristics(kernels, v, tg.dt(), Direction::Forward)?;
    let slices = advect(kernels, m0, &departure, tg.nt())?;
    Ok(TrajectoryStore { slices, departure })
}

/// −∂ₜλ − ∇·(λv) = 0 with λ(·,1) = `lambda_final`, solved backward in time.
pub fn solve_adjoint(
    kernels: &Kernels,
    v: &VectorField,
    lambda_final: &ScalarField,
    tg: &TimeGrid,
) -> Result<TrajectoryStore> {
    v.grid().ensure_same(lambda_final.grid())?;
    let departure = trace_characteristics(kernels, v, tg.dt(), Direction::Backward)?;
    continuity_solve(kernels, v, lambda_final, departure, tg)
}

/// The incremental adjoint obeys the same continuity equation as the adjoint;
/// `backward` are the departure points of an earlier adjoint solve with the
/// same v and time grid.
pub fn solve_inc_adjoint(
    kernels: &Kernels,
    v: &VectorField,
    lambda_final: &ScalarField,
    backward: &DeparturePoints,
    tg: &TimeGrid,
) -> Result<TrajectoryStore> {
    v.grid().ensure_same(lambda_final.grid())?;
    v.grid().ensure_same(backward.grid())?;
    continuity_solve(kernels, v, lambda_final, backward.clone(), tg)
}

/// Advects along −v and applies the source factor exp(δt·½(∇·v(x) + ∇·v(y))).
fn continuity_solve(
    kernels: &Kernels,
    v: &VectorField,
    lambda_final: &ScalarField,
    departure: DeparturePoints,
    tg: &TimeGrid,
) -> Result<TrajectoryStore> {
    let dt = tg.dt();
    let div = kernels.divergence(v);
    let div_dep = kernels.interpolate(&div, &departure)?;
    let factor: Vec<f32> = div
        .as_slice()
        .par_iter()
        .zip(div_dep.as_slice().par_iter())
        .map(|(&a, &b)| (dt * 0.5 * (a as f64 + b as f64)).exp() as f32)
        .collect();

    let nt = tg.nt();
    let mut reversed = Vec::with_capacity(nt + 1);
    reversed.push(lambda_final.clone());
    for _ in 0..nt {
        let mut next = kernels.interpolate(reversed.last().expect("nonempty"), &departure)?;
        next.as_mut_slice().par_iter_mut().zip(factor.par_iter()).for_each(|(x, &f)| *x *= f);
        reversed.push(next);
    }
    reversed.reverse();
    Ok(TrajectoryStore { slices: reversed, departure })
}

/// ∂ₜm̃ + v·∇m̃ = −ṽ·∇m with m̃(·,0) = 0, the source integrated by the
/// trapezoidal rule along each characteristic. Reuses the departure points
/// stored in `m_traj`.
pub fn solve_inc_state(
    kernels: &Kernels,
    v_tilde: &VectorField,
    m_traj: &TrajectoryStore,
    tg: &TimeGrid,
) -> Result<TrajectoryStore> {
    m_traj.ensure_compatible(tg, v_tilde)?;
    let points = m_traj.departure_points();
    let half_dt = (0.5 * tg.dt()) as f32;
    let vt_dep = kernels.interpolate_vector(v_tilde, points)?;

    let grid = *v_tilde.grid();
    let mut slices = Vec::with_capacity(tg.nt() + 1);
    slices.push(ScalarField::zeros(grid));
    let mut grad_prev = kernels.gradient(m_traj.slice(0));
    for j in 0..tg.nt() {
        let grad_next = kernels.gradient(m_traj.slice(j + 1));
        let grad_dep = kernels.interpolate_vector(&grad_prev, points)?;
        let mut next = kernels.interpolate(&slices[j], points)?;
        let src_dep = vt_dep.pointwise_dot(&grad_dep);
        let src_arr = v_tilde.pointwise_dot(&grad_next);
        next.as_mut_slice()
            .par_iter_mut()
            .zip(src_dep.as_slice().par_iter().zip(src_arr.as_slice().par_iter()))
            .for_each(|(m, (&a, &b))| *m -= half_dt * (a + b));
        slices.push(next);
        grad_prev = grad_next;
    }
    Ok(TrajectoryStore { slices, departure: points.clone() })
}

/// ∫λ dx over every slice.
pub fn slice_integrals(traj: &TrajectoryStore) -> Vec<f64> {
    traj.slices().iter().map(ScalarField::integral).collect()
}
