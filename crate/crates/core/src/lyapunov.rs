//! Lyapunov functions for the two equilibria and a sampled-decay audit.
//!
//! `V = c₁I + c₂C + c₃A` certifies Σ₀ when `R₀ < 1`; the Volterra-type
//! `V = Σ wᵢ (uᵢ − uᵢ* − uᵢ* ln(uᵢ/uᵢ*))` with weights `(1, 1, ω/ξ₂, γ/ξ₁)` certifies Σ*
//! when `R₀ > 1`. Along solver output we only check that the sampled values decay.

use thiserror::Error;

use crate::fde::Trajectory;
use crate::model::{ModelParameters, State};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("infected compartment {0} is negative")]
    NegativeCompartment(&'static str),
    #[error("compartment {0} must be strictly positive for the Volterra function")]
    NonPositive(&'static str),
    #[error("audit needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("settle fraction must lie in (0, 1), got {0}")]
    InvalidSettleFraction(f64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovCoefficients<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
}

pub fn lyapunov_coefficients<T: Scalar>(p: &ModelParameters<T>) -> LyapunovCoefficients<T> {
    let (xi1, xi2, xi3) = (p.xi1(), p.xi2(), p.xi3());
    let (phi, rho, gamma, omega) = (p.treat_i, p.default_i, p.treat_a, p.default_c);
    let (ec, ea) = (p.eta_c, p.eta_a);
    LyapunovCoefficients {
        c1: xi1 * xi2 + xi1 * phi * ec + xi2 * rho * ea,
        c2: xi1 * omega + xi1 * xi3 * ec + rho * ea * omega - ec * rho * gamma,
        c3: gamma * xi2 + xi2 * xi3 * ea + phi * ec * gamma - phi * ea * omega,
    }
}

/// The same coefficients written as sums of nonnegative terms.
pub fn lyapunov_coefficients_positive_form<T: Scalar>(
    p: &ModelParameters<T>,
) -> LyapunovCoefficients<T> {
    let (xi1, xi2, xi3) = (p.xi1(), p.xi2(), p.xi3());
    let (mu, d, phi, rho, gamma, omega) = (
        p.natural_death,
        p.aids_death,
        p.treat_i,
        p.default_i,
        p.treat_a,
        p.default_c,
    );
    let (ec, ea) = (p.eta_c, p.eta_a);
    LyapunovCoefficients {
        c1: xi1 * xi2 + xi1 * phi * ec + xi2 * rho * ea,
        c2: xi1 * omega + gamma * (phi + mu) * ec + (mu + d) * xi3 * ec + rho * ea * omega,
        c3: gamma * xi2 + omega * (rho + mu) * ea + mu * xi3 * ea + phi * ec * gamma,
    }
}

/// `c₁I + c₂C + c₃A`.
pub fn dfe_lyapunov<T: Scalar>(p: &ModelParameters<T>, x: &State<T>) -> Result<T, LyapunovError> {
    for (name, v) in [("I", x.i), ("C", x.c), ("A", x.a)] {
        if v < T::zero() {
            return Err(LyapunovError::NegativeCompartment(name));
        }
    }
    let k = lyapunov_coefficients(p);
    Ok(k.c1 * x.i + k.c2 * x.c + k.c3 * x.a)
}

/// `u − u* − u* ln(u/u*)`, evaluated as `u*(r − 1 − ln r)` with `r = u/u*`.
pub fn volterra_term<T: Scalar>(u: T, star: T) -> T {
    let d = u / star - T::one();
    star * (d - d.ln_1p())
}

/// Weights of the four Volterra terms, `(1, 1, ω/ξ₂, γ/ξ₁)`.
pub fn endemic_weights<T: Scalar>(p: &ModelParameters<T>) -> [T; 4] {
    [
        T::one(),
        T::one(),
        p.default_c / p.xi2(),
        p.treat_a / p.xi1(),
    ]
}

pub fn endemic_lyapunov<T: Scalar>(
    p: &ModelParameters<T>,
    eq: &State<T>,
    x: &State<T>,
) -> Result<T, LyapunovError> {
    const NAMES: [&str; 4] = ["S", "I", "C", "A"];
    let xs = x.to_array();
    let stars = eq.to_array();
    for k in 0..4 {
        if !(xs[k] > T::zero()) || !(stars[k] > T::zero()) {
            return Err(LyapunovError::NonPositive(NAMES[k]));
        }
    }
    let w = endemic_weights(p);
    Ok((0..4).fold(T::zero(), |acc, k| {
        acc + w[k] * volterra_term(xs[k], stars[k])
    }))
}

/// `dfe_lyapunov` at every grid point.
pub fn dfe_lyapunov_series<T: Scalar>(
    p: &ModelParameters<T>,
    traj: &Trajectory<T>,
) -> Result<Vec<T>, LyapunovError> {
    traj.iter()
        .map(|(_, x)| dfe_lyapunov(p, &State::from_slice(x)))
        .collect()
}

/// Samples below this are treated as not yet positive when starting a Volterra audit.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// `endemic_lyapunov` from the first grid point whose components all exceed
/// [`POSITIVITY_FLOOR`]; returns that index with the samples.
pub fn endemic_lyapunov_series<T: Scalar>(
    p: &ModelParameters<T>,
    eq: &State<T>,
    traj: &Trajectory<T>,
) -> Result<(usize, Vec<T>), LyapunovError> {
    let floor = T::lit(POSITIVITY_FLOOR);
    let start = traj
        .iter()
        .position(|(_, x)| x.iter().all(|&v| v > floor))
        .unwrap_or(traj.len());
    let values = traj
        .iter()
        .skip(start)
        .map(|(_, x)| endemic_lyapunov(p, eq, &State::from_slice(x)))
        .collect::<Result<_, _>>()?;
    Ok((start, values))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditCriteria<T> {
    pub settle_fraction: T,
    /// Bound on `max (V_{k+1} − V_k) / range(V)` after the settle window.
    pub max_relative_upward_step: T,
    /// Optional bound on `V(t_end) / V(t₀)`.
    pub max_terminal_ratio: Option<T>,
}

impl<T: Scalar> Default for AuditCriteria<T> {
    fn default() -> Self {
        Self {
            settle_fraction: T::lit(0.05),
            max_relative_upward_step: T::lit(1e-3),
            max_terminal_ratio: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport<T> {
    pub samples: usize,
    /// `V(t_end) < V(t₀)`.
    pub decreased: bool,
    pub max_relative_upward_step: T,
    pub terminal_ratio: T,
    /// All samples equal.
    pub stationary: bool,
    pub passed: bool,
}

/// Audits sampled Lyapunov values for eventual decrease.
pub fn monotonicity_audit<T: Scalar>(
    values: &[T],
    criteria: &AuditCriteria<T>,
) -> Result<AuditReport<T>, LyapunovError> {
    const MIN_SAMPLES: usize = 10;
    if values.len() < MIN_SAMPLES {
        return Err(LyapunovError::TooFewSamples {
            min: MIN_SAMPLES,
            got: values.len(),
        });
    }
    let settle = criteria.settle_fraction;
    if !(settle > T::zero() && settle < T::one()) {
        return Err(LyapunovError::InvalidSettleFraction(
            settle.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(LyapunovError::NonFinite(k));
    }

    let first = values[0];
    let last = values[values.len() - 1];
    let (lo, hi) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let stationary = range == T::zero();

    let skip = (settle * T::from_index(values.len()))
        .floor()
        .to_usize()
        .unwrap_or(0);
    let max_up = values[skip.min(values.len() - 1)..]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::zero(), T::max);
    let max_relative_upward_step = if stationary {
        T::zero()
    } else {
        max_up / range
    };
    let terminal_ratio = if first == T::zero() {
        if last == T::zero() {
            T::one()
        } else {
            T::infinity()
        }
    } else {
        last / first
    };
    let decreased = last < first;

    let passed = (decreased || stationary)
        && max_relative_upward_step <= criteria.max_relative_upward_step
        && criteria
            .max_terminal_ratio
            .is_none_or(|bound| terminal_ratio <= bound);

    Ok(AuditReport {
        samples: values.len(),
        decreased,
        max_relative_upward_step,
        terminal_ratio,
        stationary,
        passed,
    })
}
