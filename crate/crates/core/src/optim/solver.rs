use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::linesearch::{armijo_linesearch, LineSearchOutcome};
use super::pcg::pcg_solve;
use super::problem::{Objective, Problem};
use super::SolverConfig;
use crate::counters::{CounterSnapshot, KernelTimings};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::kernels::Kernels;
use crate::metrics::{compute_deformation_map, det_deformation_gradient, relative_mismatch, DetFStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

/// One accepted Newton step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub stage: usize,
    pub beta: f64,
    /// ‖g‖_rel and J at the start of the step.
    pub grad_rel: f64,
    pub objective: f64,
    pub eta: f64,
    pub pcg_iterations: usize,
    pub alpha: f64,
    pub counters: CounterSnapshot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegistrationReport {
    pub status: SolveStatus,
    pub grid: [usize; 3],
    pub config: SolverConfig,
    /// ‖m(·,1) − m₁‖ / ‖m₁ − m₀‖; `None` when m₀ = m₁.
    pub mismatch: Option<f64>,
    pub grad_rel: f64,
    pub objective: f64,
    pub newton_iterations: usize,
    pub matvecs: usize,
    pub stages_completed: usize,
    pub wall_time_s: f64,
    pub timings: KernelTimings,
    pub counters: CounterSnapshot,
    pub det_f: DetFStats,
    pub log: Vec<IterationLog>,
}

impl RegistrationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Registers `m0` (template) to `m1` (reference) with fresh kernels built
/// from the configuration.
pub fn gauss_newton_solve(
    m0: &ScalarField,
    m1: &ScalarField,
    cfg: &SolverConfig,
) -> Result<(VectorField, RegistrationReport)> {
    let kernels = Kernels::new(cfg.backend, cfg.variant);
    solve_with_kernels(&kernels, m0, m1, cfg)
}

pub fn solve_with_kernels(
    kernels: &Kernels,
    m0: &ScalarField,
    m1: &ScalarField,
    cfg: &SolverConfig,
) -> Result<(VectorField, RegistrationReport)> {
    cfg.validate()?;
    if kernels.backend() != cfg.backend || kernels.variant() != cfg.variant {
        return Err(Error::InvalidConfig("kernels do not match the solver configuration".into()));
    }
    let start = Instant::now();
    let base = Problem::new(kernels, m0, m1, cfg.reg, cfg.timegrid)?;
    let grid = *m0.grid();
    let betas = cfg.beta_schedule();

    let mut v = VectorField::zeros(grid);
    let mut g0: Option<f64> = None;
    let mut grad_rel = f64::INFINITY;
    let mut newton = 0;
    let mut matvecs = 0;
    let mut stages_completed = 0;
    let mut log = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut objective: Option<Objective> = None;

    'stages: for (stage, &beta) in betas.iter().enumerate() {
        let last = stage + 1 == betas.len();
        let problem = base.with_reg(cfg.reg.with_beta(beta)?);
        let tol = cfg.stage_tolerance(last);
        let mut obj = problem.objective(&v)?;
        loop {
            let (g, lin) = problem.gradient(&v, &obj)?;
            let g_norm = g.norm();
            let reference = *g0.get_or_insert(g_norm);
            grad_rel = if reference > 0.0 { g_norm / reference } else { 0.0 };
            if grad_rel <= tol {
                stages_completed += 1;
                objective = Some(obj);
                if last {
                    status = SolveStatus::Converged;
                    break 'stages;
                }
                continue 'stages;
            }
            if newton >= cfg.max_newton {
                status = SolveStatus::MaxIterations;
                objective = Some(obj);
                break 'stages;
            }

            let eta = cfg.forcing.eta(grad_rel);
            let rhs = g.scaled(-1.0);
            let reg = *problem.reg();
            let step = pcg_solve(
                |x| problem.hessian_matvec(&lin, x),
                |r| kernels.inverse_regularization(r, &reg),
                &rhs,
                eta,
                cfg.max_pcg,
            )?;
            matvecs += step.matvecs;
            let dv = step.solution;
            let slope = g.dot(&dv);
            let search = armijo_linesearch(obj.value, slope, cfg.armijo_c, cfg.max_linesearch, |alpha| {
                let mut trial = v.clone();
                trial.axpy(alpha as f32, &dv);
                let o = problem.objective(&trial)?;
                Ok((o.value, (trial, o)))
            });
            match search {
                Ok(LineSearchOutcome::Accepted { alpha, state: (next_v, next_obj), .. }) => {
                    log.push(IterationLog {
                        iteration: newton,
                        stage,
                        beta,
                        grad_rel,
                        objective: obj.value,
                        eta,
                        pcg_iterations: step.iterations,
                        alpha,
                        counters: kernels.counters().snapshot(),
                    });
                    newton += 1;
                    v = next_v;
                    obj = next_obj;
                }
                Ok(LineSearchOutcome::Failed { .. }) | Err(Error::NotDescent(_)) => {
                    status = SolveStatus::LineSearchFailed;
                    objective = Some(obj);
                    break 'stages;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let obj = objective.expect("every exit path records the objective");
    let mismatch = match relative_mismatch(obj.state.final_slice(), m1, m0) {
        Ok(r) => Some(r),
        Err(Error::ZeroDenominator) => None,
        Err(e) => return Err(e),
    };
    let map = compute_deformation_map(kernels, &v, &cfg.timegrid)?;
    let (_, det_f) = det_deformation_gradient(&map, cfg.backend);
    let report = RegistrationReport {
        status,
        grid: grid.dims(),
        config: cfg.clone(),
        mismatch,
        grad_rel,
        objective: obj.value,
        newton_iterations: newton,
        matvecs,
        stages_completed,
        wall_time_s: start.elapsed().as_secs_f64(),
        timings: kernels.counters().timings(),
        counters: kernels.counters().snapshot(),
        det_f,
        log,
    };
    Ok((v, report))
}
