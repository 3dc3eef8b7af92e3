use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum LineSearchOutcome<S> {
    Accepted { alpha: f64, value: f64, state: S, trials: usize },
    Failed { trials: usize },
}

/// Backtracking over α ∈ {1, ½, ¼, …}: accepts the first α with
/// J(v + α·δv) ≤ J(v) + c·α·slope, where slope = ⟨g, δv⟩ must be negative.
///
/// `eval(α)` returns the objective at v + α·δv together with any state the
/// caller wants back for the accepted step.
pub fn armijo_linesearch<S, F>(j0: f64, slope: f64, c: f64, max_trials: usize, mut eval: F) -> Result<LineSearchOutcome<S>>
where
    F: FnMut(f64) -> Result<(f64, S)>,
{
    if slope.is_nan() || slope >= 0.0 {
        return Err(Error::NotDescent(slope));
    }
    let mut alpha = 1.0;
    for trial in 1..=max_trials {
        let (value, state) = eval(alpha)?;
        if value.is_finite() && value <= j0 + c * alpha * slope {
            return Ok(LineSearchOutcome::Accepted { alpha, value, state, trials: trial });
        }
        alpha *= 0.5;
    }
    Ok(LineSearchOutcome::Failed { trials: max_trials })
}
