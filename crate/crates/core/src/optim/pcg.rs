use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::VectorField;

/// Minimal vector-space interface for the Krylov solver.
pub trait KrylovVector: Clone {
    fn inner(&self, other: &Self) -> f64;
    /// self ← self + alpha·x
    fn add_scaled(&mut self, alpha: f64, x: &Self);
    fn scale_by(&mut self, alpha: f64);
    fn zeros_like(&self) -> Self;
}

impl KrylovVector for VectorField {
    fn inner(&self, other: &Self) -> f64 {
        self.dot(other)
    }

    fn add_scaled(&mut self, alpha: f64, x: &Self) {
        self.axpy(alpha as f32, x);
    }

    fn scale_by(&mut self, alpha: f64) {
        self.scale(alpha as f32);
    }

    fn zeros_like(&self) -> Self {
        VectorField::zeros(*self.grid())
    }
}

impl KrylovVector for Vec<f64> {
    fn inner(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    fn add_scaled(&mut self, alpha: f64, x: &Self) {
        self.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
    }

    fn scale_by(&mut self, alpha: f64) {
        self.iter_mut().for_each(|y| *y *= alpha);
    }

    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcgStop {
    Converged,
    MaxIterations,
    NegativeCurvature,
}

#[derive(Debug, Clone)]
pub struct PcgOutcome<V> {
    pub solution: V,
    pub iterations: usize,
    pub matvecs: usize,
    pub stop: PcgStop,
    /// ‖r_k‖/‖b‖ after each iteration, starting with 1 at k = 0.
    pub residual_history: Vec<f64>,
}

/// Preconditioned CG for H x = b, stopping at ‖r‖ ≤ tol·‖b‖.
///
/// On negative curvature the current iterate is returned; if that happens on
/// the first iteration the preconditioned right-hand side M⁻¹b is returned
/// instead, which is still a descent direction for the Newton system.
pub fn pcg_solve<V, H, M>(mut matvec: H, mut precond: M, b: &V, tol: f64, max_iter: usize) -> Result<PcgOutcome<V>>
where
    V: KrylovVector,
    H: FnMut(&V) -> Result<V>,
    M: FnMut(&V) -> V,
{
    let mut x = b.zeros_like();
    let b_norm = b.inner(b).sqrt();
    let mut history = vec![1.0];
    if b_norm == 0.0 {
        return Ok(PcgOutcome { solution: x, iterations: 0, matvecs: 0, stop: PcgStop::Converged, residual_history: history });
    }
    let mut r = b.clone();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = r.inner(&z);
    let mut matvecs = 0;
    let mut stop = PcgStop::MaxIterations;
    let mut iterations = 0;
    while iterations < max_iter {
        let hp = matvec(&p)?;
        matvecs += 1;
        let curvature = p.inner(&hp);
        if curvature <= 0.0 {
            if iterations == 0 {
                x = z;
            }
            stop = PcgStop::NegativeCurvature;
            break;
        }
        let alpha = rz / curvature;
        x.add_scaled(alpha, &p);
        r.add_scaled(-alpha, &hp);
        iterations += 1;
        let rel = r.inner(&r).sqrt() / b_norm;
        history.push(rel);
        if rel <= tol {
            stop = PcgStop::Converged;
            break;
        }
        z = precond(&r);
        let rz_next = r.inner(&z);
        let beta = rz_next / rz;
        rz = rz_next;
        p.scale_by(beta);
        p.add_scaled(1.0, &z);
    }
    Ok(PcgOutcome { solution: x, iterations, matvecs, stop, residual_history: history })
}
