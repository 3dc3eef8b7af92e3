//! Gauss–Newton–Krylov solver for stationary-velocity registration.
//!
//! The objective is J(v) = ½‖m(·,1) − m₁‖² + (β/2)⟨Av, v⟩ where m solves the
//! transport equation with initial condition m₀. All inner products carry the
//! h₁h₂h₃ quadrature weight.

mod linesearch;
mod pcg;
mod problem;
mod solver;

use serde::{Deserialize, Serialize};

use crate::diffops::{DerivativeBackend, RegularizationConfig};
use crate::error::{Error, Result};
use crate::interp::InterpVariant;
use crate::transport::TimeGrid;

pub use linesearch::{armijo_linesearch, LineSearchOutcome};
pub use pcg::{pcg_solve, KrylovVector, PcgOutcome, PcgStop};
pub use problem::{Linearization, Objective, Problem};
pub use solver::{gauss_newton_solve, solve_with_kernels, IterationLog, RegistrationReport, SolveStatus};

/// Inner tolerance schedule for the Newton systems.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Forcing {
    /// η = min(½, √‖g‖_rel)
    #[default]
    Superlinear,
    Fixed(f64),
}

impl Forcing {
    pub fn eta(&self, grad_rel: f64) -> f64 {
        match *self {
            Forcing::Superlinear => 0.5f64.min(grad_rel.sqrt()),
            Forcing::Fixed(eta) => eta,
        }
    }
}

/// Geometric β schedule: β₀, β₀/factor, … clamped at the target β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Continuation {
    pub beta0: f64,
    pub factor: f64,
    pub stage_gtol: f64,
}

impl Default for Continuation {
    fn default() -> Self {
        Self { beta0: 1e-1, factor: 10.0, stage_gtol: 2.5e-1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub reg: RegularizationConfig,
    pub timegrid: TimeGrid,
    pub gtol: f64,
    pub max_newton: usize,
    pub max_pcg: usize,
    pub armijo_c: f64,
    pub max_linesearch: usize,
    pub forcing: Forcing,
    /// `None` solves directly at the target β.
    pub continuation: Option<Continuation>,
    pub variant: InterpVariant,
    pub backend: DerivativeBackend,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            reg: RegularizationConfig::default(),
            timegrid: TimeGrid::default(),
            gtol: 5e-2,
            max_newton: 50,
            max_pcg: 500,
            armijo_c: 1e-4,
            max_linesearch: 10,
            forcing: Forcing::Superlinear,
            continuation: Some(Continuation::default()),
            variant: InterpVariant::Bspline,
            backend: DerivativeBackend::Fd8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.gtol > 0.0 && self.gtol < 1.0) {
            return bad(format!("gtol must lie in (0, 1), got {}", self.gtol));
        }
        if self.max_newton == 0 || self.max_pcg == 0 || self.max_linesearch == 0 {
            return bad("iteration caps must be positive".into());
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c));
        }
        if let Forcing::Fixed(eta) = self.forcing {
            if !(eta > 0.0 && eta < 1.0) {
                return bad(format!("fixed forcing term must lie in (0, 1), got {eta}"));
            }
        }
        if let Some(c) = &self.continuation {
            if !(c.beta0.is_finite() && c.beta0 >= self.reg.beta()) {
                return bad(format!("beta0 = {} is below the target beta {}", c.beta0, self.reg.beta()));
            }
            if !(c.factor > 1.0 && c.factor.is_finite()) {
                return bad(format!("continuation factor must exceed 1, got {}", c.factor));
            }
            if !(c.stage_gtol > 0.0 && c.stage_gtol < 1.0) {
                return bad(format!("stage_gtol must lie in (0, 1), got {}", c.stage_gtol));
            }
        }
        Ok(())
    }

    /// The β of every continuation stage; the last entry is the target.
    pub fn beta_schedule(&self) -> Vec<f64> {
        let target = self.reg.beta();
        let mut betas = Vec::new();
        if let Some(c) = &self.continuation {
            let mut beta = c.beta0;
            while beta > target * (1.0 + 1e-12) {
                betas.push(beta);
                beta /= c.factor;
            }
        }
        betas.push(target);
        betas
    }

    pub(crate) fn stage_tolerance(&self, last: bool) -> f64 {
        match (&self.continuation, last) {
            (Some(c), false) => c.stage_gtol,
            _ => self.gtol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SolverConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.reg.beta(), 5e-4);
        assert_eq!(cfg.reg.gamma(), 1e-4);
        assert_eq!(cfg.timegrid.nt(), 4);
        assert_eq!((cfg.max_newton, cfg.max_pcg), (50, 500));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SolverConfig { gtol: 1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        cfg.gtol = 0.05;
        cfg.max_pcg = 0;
        assert!(cfg.validate().is_err());
        cfg.max_pcg = 10;
        cfg.continuation = Some(Continuation { beta0: 1e-5, ..Default::default() });
        assert!(cfg.validate().is_err());
        cfg.continuation = Some(Continuation { factor: 1.0, ..Default::default() });
        assert!(cfg.validate().is_err());
        cfg.continuation = None;
        cfg.validate().unwrap();
    }

    #[test]
    fn schedule_ends_at_target() {
        let cfg = SolverConfig::default();
        let s = cfg.beta_schedule();
        assert_eq!(s.len(), 4);
        assert!((s[0] - 0.1).abs() < 1e-15 && (s[2] - 1e-3).abs() < 1e-15);
        assert_eq!(*s.last().unwrap(), 5e-4);
        let direct = SolverConfig { continuation: None, ..Default::default() };
        assert_eq!(direct.beta_schedule(), vec![5e-4]);
    }

    #[test]
    fn forcing_terms() {
        assert_eq!(Forcing::Superlinear.eta(1.0), 0.5);
        assert!((Forcing::Superlinear.eta(0.01) - 0.1).abs() < 1e-15);
        assert_eq!(Forcing::Fixed(0.3).eta(1e-6), 0.3);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SolverConfig::default();
        let back: SolverConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
