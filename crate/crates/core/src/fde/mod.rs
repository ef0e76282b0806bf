//! One-step-grid solver for Caputo fractional differential equations of order
//! `0 < α ≤ 1`, based on the fractional Adams–Bashforth–Moulton predictor-corrector.

mod convergence;
mod solver;
mod special;
mod weights;

pub use convergence::{estimate_convergence_order, ConvergenceFit};
pub use solver::abm_solve;
pub use special::{gamma, ln_gamma, mittag_leffler, MITTAG_LEFFLER_MAX_ABS_Z};
pub use weights::AbmWeights;

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdeError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("state dimension {got} does not match vector field dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in component {component} at step {step} (t = {time})")]
    NonFinite {
        step: usize,
        component: usize,
        time: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence fit rejected: {0}")]
    Fit(String),
}

/// How much of the history the Caputo memory sums span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryPolicy {
    /// Every prior grid node contributes.
    FullHistory,
    /// Only the trailing `window` nodes contribute (short-memory principle).
    Truncated { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub alpha: T,
    pub step: T,
    pub t_end: T,
    pub memory: MemoryPolicy,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(alpha: T, step: T, t_end: T) -> Self {
        Self {
            alpha,
            step,
            t_end,
            memory: MemoryPolicy::FullHistory,
        }
    }

    pub fn with_memory(mut self, memory: MemoryPolicy) -> Self {
        self.memory = memory;
        self
    }

    /// Number of steps taken; the grid is `{k·h : 0 ≤ k ≤ n}` with `n·h ≤ t_end`.
    pub fn num_steps(&self) -> usize {
        let ratio = self.t_end / self.step;
        // absorb round-off so that t_end = n·h lands on the grid
        let n = (ratio * (T::one() + T::lit(1e-12))).floor();
        n.to_usize().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), FdeError> {
        let bad = |msg: String| Err(FdeError::InvalidConfig(msg));
        if !(self.alpha > T::zero() && self.alpha <= T::one()) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.step > T::zero()) || !self.step.is_finite() {
            return bad(format!(
                "step must be positive and finite, got {}",
                self.step
            ));
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            return bad(format!(
                "t_end must be positive and finite, got {}",
                self.t_end
            ));
        }
        if self.num_steps() < 1 {
            return bad(format!(
                "t_end / step = {} yields fewer than 2 grid points",
                self.t_end / self.step
            ));
        }
        if let MemoryPolicy::Truncated { window } = self.memory {
            if window < 1 {
                return bad("truncated memory window must be at least 1".into());
            }
        }
        Ok(())
    }
}

/// Right-hand side `f(t, x)` of `D^α x = f(t, x)`.
///
/// Implementations must be deterministic and free of side effects for fixed `(t, x)`.
pub trait VectorField<T> {
    fn dimension(&self) -> usize;

    /// Writes `f(t, x)` into `out` (`x.len() == out.len() == self.dimension()`).
    fn eval(&self, t: T, x: &[T], out: &mut [T]);
}

/// Adapts a closure `(t, x, out)` into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F> VectorField<T> for FnField<F>
where
    F: Fn(T, &[T], &mut [T]),
{
    fn dimension(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: T, x: &[T], out: &mut [T]) {
        (self.f)(t, x, out)
    }
}

impl<T, V: VectorField<T> + ?Sized> VectorField<T> for &V {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn eval(&self, t: T, x: &[T], out: &mut [T]) {
        (**self).eval(t, x, out)
    }
}

/// Solution samples on the uniform grid `t_k = k·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    times: Vec<T>,
    // row-major, `dim` values per grid point
    states: Vec<T>,
    dim: usize,
    alpha: T,
}

impl<T: Scalar> Trajectory<T> {
    pub(crate) fn new(times: Vec<T>, states: Vec<T>, dim: usize, alpha: T) -> Self {
        debug_assert_eq!(times.len() * dim, states.len());
        Self {
            times,
            states,
            dim,
            alpha,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn state(&self, k: usize) -> &[T] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[T] {
        self.state(self.len() - 1)
    }

    pub fn last_time(&self) -> T {
        self.times[self.len() - 1]
    }

    /// Iterates over `(t_k, x_k)` pairs.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (T, &[T])> + '_ {
        self.times
            .iter()
            .copied()
            .zip(self.states.chunks_exact(self.dim))
    }

    /// Values of one component along the grid.
    pub fn component(&self, index: usize) -> impl Iterator<Item = T> + '_ {
        self.states.chunks_exact(self.dim).map(move |x| x[index])
    }

    /// Checks the equal-length and uniform-spacing invariants (1e-12 relative on the spacing).
    pub fn check_grid(&self) -> bool {
        if self.states.len() != self.times.len() * self.dim || self.times.len() < 2 {
            return false;
        }
        let h = self.times[1] - self.times[0];
        let tol = T::lit(1e-12) * h.abs().max(self.last_time().abs());
        self.times
            .windows(2)
            .all(|w| w[1] > w[0] && ((w[1] - w[0]) - h).abs() <= tol)
    }
}
