use super::{abm_solve, FdeError, SolverConfig, VectorField};
use crate::Scalar;

/// Outcome of an empirical convergence-order fit.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvergenceFit<T> {
    /// Least-squares slope of `ln(error)` against `ln(h)`, with the max-norm error per step.
    Slope { slope: T, errors: Vec<T> },
    /// Every run reproduced the reference exactly; no slope is defined.
    Exact,
}

impl<T: Scalar> ConvergenceFit<T> {
    pub fn slope(&self) -> Option<T> {
        match self {
            Self::Slope { slope, .. } => Some(*slope),
            Self::Exact => None,
        }
    }
}

/// Solves at each step size in `steps` and fits the observed order at `t_end`.
///
/// `steps` must hold at least three sizes, each half of the previous one, and `t_end`
/// must be a grid point for all of them.
pub fn estimate_convergence_order<T, F>(
    field: &F,
    x0: &[T],
    alpha: T,
    t_end: T,
    steps: &[T],
    reference: &[T],
) -> Result<ConvergenceFit<T>, FdeError>
where
    T: Scalar,
    F: VectorField<T> + ?Sized,
{
    if steps.len() < 3 {
        return Err(FdeError::Fit(format!(
            "need at least 3 step sizes, got {}",
            steps.len()
        )));
    }
    let half = T::lit(0.5);
    for w in steps.windows(2) {
        if ((w[1] - half * w[0]) / w[1]).abs() > T::lit(1e-12) {
            return Err(FdeError::Fit(format!(
                "step sizes must halve successively ({} then {})",
                w[0], w[1]
            )));
        }
    }
    if reference.len() != field.dimension() {
        return Err(FdeError::DimensionMismatch {
            expected: field.dimension(),
            got: reference.len(),
        });
    }

    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let config = SolverConfig::new(alpha, h, t_end);
        let traj = abm_solve(field, x0, &config)?;
        if ((traj.last_time() - t_end) / t_end).abs() > T::lit(1e-9) {
            return Err(FdeError::Fit(format!(
                "t_end = {t_end} is not a grid point for h = {h}"
            )));
        }
        let err = traj
            .last_state()
            .iter()
            .zip(reference)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        errors.push(err);
    }

    if errors.iter().all(|&e| e == T::zero()) {
        return Ok(ConvergenceFit::Exact);
    }
    if errors.iter().any(|&e| e == T::zero()) {
        return Err(FdeError::Fit(
            "some but not all errors vanish; log fit undefined".into(),
        ));
    }

    let xs: Vec<T> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<T> = errors.iter().map(|e| e.ln()).collect();
    let n = T::from_index(xs.len());
    let mean_x = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mean_y = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy = sxy + (x - mean_x) * (y - mean_y);
        sxx = sxx + (x - mean_x) * (x - mean_x);
    }
    Ok(ConvergenceFit::Slope {
        slope: sxy / sxx,
        errors,
    })
}
