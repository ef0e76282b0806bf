//! The SICA HIV/AIDS compartmental vector field.
//!
//! Compartments: susceptible `S`, HIV-infected without AIDS symptoms `I`, infected under
//! antiretroviral treatment (chronic) `C`, and AIDS `A`. Rates are per year.

use std::fmt;

use thiserror::Error;

use crate::fde::{abm_solve, FdeError, SolverConfig, Trajectory, VectorField};
use crate::Scalar;

/// Rates and modifiers of the SICA model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParameters<T> {
    /// Λ, recruitment rate (individuals/year).
    pub recruitment: T,
    /// μ, natural death rate.
    pub natural_death: T,
    /// β, effective contact rate.
    pub contact_rate: T,
    /// η_C, relative infectiousness of treated (chronic) individuals.
    pub eta_c: T,
    /// η_A, relative infectiousness of individuals with AIDS symptoms.
    pub eta_a: T,
    /// φ, treatment rate of `I` (moves I → C).
    pub treat_i: T,
    /// ρ, default treatment rate of `I` (progression I → A).
    pub default_i: T,
    /// γ, AIDS treatment rate (A → I).
    pub treat_a: T,
    /// ω, treatment default rate of `C` (C → I).
    pub default_c: T,
    /// d, AIDS-induced death rate.
    pub aids_death: T,
}

impl<T: Scalar> ModelParameters<T> {
    /// Reference parameter set (Λ = 2.1, μ = 1/69.54, …) with the given contact rate.
    pub fn reference(contact_rate: T) -> Self {
        Self {
            recruitment: T::lit(2.1),
            natural_death: T::one() / T::lit(69.54),
            contact_rate,
            eta_c: T::lit(0.015),
            eta_a: T::lit(1.3),
            treat_i: T::one(),
            default_i: T::lit(0.1),
            treat_a: T::lit(0.33),
            default_c: T::lit(0.09),
            aids_death: T::one(),
        }
    }

    /// `(name, value)` pairs in declaration order.
    pub fn fields(&self) -> [(&'static str, T); 10] {
        [
            ("recruitment", self.recruitment),
            ("natural_death", self.natural_death),
            ("contact_rate", self.contact_rate),
            ("eta_c", self.eta_c),
            ("eta_a", self.eta_a),
            ("treat_i", self.treat_i),
            ("default_i", self.default_i),
            ("treat_a", self.treat_a),
            ("default_c", self.default_c),
            ("aids_death", self.aids_death),
        ]
    }

    /// ξ₁ = γ + μ + d
    pub fn xi1(&self) -> T {
        self.treat_a + self.natural_death + self.aids_death
    }

    /// ξ₂ = ω + μ
    pub fn xi2(&self) -> T {
        self.default_c + self.natural_death
    }

    /// ξ₃ = ρ + φ + μ
    pub fn xi3(&self) -> T {
        self.default_i + self.treat_i + self.natural_death
    }
}

/// One point `(S, I, C, A)` of the compartment space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State<T> {
    pub s: T,
    pub i: T,
    pub c: T,
    pub a: T,
}

impl<T: Scalar> State<T> {
    pub fn new(s: T, i: T, c: T, a: T) -> Self {
        Self { s, i, c, a }
    }

    pub fn from_slice(x: &[T]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.s, self.i, self.c, self.a]
    }

    /// N = S + I + C + A
    pub fn total(&self) -> T {
        self.s + self.i + self.c + self.a
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Max-norm distance to `other`.
    pub fn distance(&self, other: &Self) -> T {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(&a, b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}

impl<T: fmt::Display> fmt::Display for State<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.s, self.i, self.c, self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub severity: Severity,
    /// Name of the offending field, as in [`ModelParameters::fields`].
    pub field: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Warning)
    }
}

/// Lists violated parameter invariants: hard errors for values that break the model's
/// arithmetic, warnings for modelling-assumption breaches (`η_A < 1`, `η_C > 1`).
pub fn validate_params<T: Scalar>(p: &ModelParameters<T>) -> ValidationReport {
    let mut issues = Vec::new();
    let mut error = |field, message: String| {
        issues.push(ValidationIssue {
            severity: Severity::Error,
            field,
            message,
        })
    };
    for (name, value) in p.fields() {
        if !value.is_finite() {
            error(name, format!("{name} must be finite, got {value}"));
        } else if value < T::zero() {
            error(name, format!("{name} must be nonnegative, got {value}"));
        }
    }
    if !(p.natural_death > T::zero()) {
        error(
            "natural_death",
            "natural death rate must be positive".into(),
        );
    }
    if !(p.recruitment > T::zero()) {
        error("recruitment", "recruitment rate must be positive".into());
    }
    if p.eta_a < T::one() {
        issues.push(ValidationIssue {
            severity: Severity::Warning,
            field: "eta_a",
            message: format!(
                "eta_a = {} < 1: AIDS stage assumed at least as infectious as I",
                p.eta_a
            ),
        });
    }
    if p.eta_c > T::one() {
        issues.push(ValidationIssue {
            severity: Severity::Warning,
            field: "eta_c",
            message: format!(
                "eta_c = {} > 1: treated individuals assumed no more infectious than I",
                p.eta_c
            ),
        });
    }
    ValidationReport { issues }
}

/// λ = β(I + η_C C + η_A A)
pub fn force_of_infection<T: Scalar>(p: &ModelParameters<T>, x: &State<T>) -> T {
    p.contact_rate * (x.i + p.eta_c * x.c + p.eta_a * x.a)
}

/// Right-hand side of the SICA system in `(S, I, C, A)` order.
pub fn rhs<T: Scalar>(p: &ModelParameters<T>, x: &State<T>) -> [T; 4] {
    let lambda = force_of_infection(p, x);
    let infection = lambda * x.s;
    [
        p.recruitment - infection - p.natural_death * x.s,
        infection - p.xi3() * x.i + p.default_c * x.c + p.treat_a * x.a,
        p.treat_i * x.i - p.xi2() * x.c,
        p.default_i * x.i - p.xi1() * x.a,
    ]
}

/// The SICA system as a [`VectorField`] of dimension 4.
#[derive(Debug, Clone, Copy)]
pub struct SicaField<T> {
    pub params: ModelParameters<T>,
}

impl<T: Scalar> SicaField<T> {
    pub fn new(params: ModelParameters<T>) -> Self {
        Self { params }
    }
}

impl<T: Scalar> VectorField<T> for SicaField<T> {
    fn dimension(&self) -> usize {
        4
    }

    fn eval(&self, _t: T, x: &[T], out: &mut [T]) {
        out.copy_from_slice(&rhs(&self.params, &State::from_slice(x)));
    }
}

/// Components below `-NONNEGATIVITY_TOL` abort a simulation.
pub const NONNEGATIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Solver(#[from] FdeError),
    #[error("compartment {compartment} went negative ({value}) at step {step}")]
    Negative {
        step: usize,
        compartment: &'static str,
        value: f64,
    },
}

/// Integrates the SICA system from `x0` and rejects trajectories that leave the
/// nonnegative orthant beyond [`NONNEGATIVITY_TOL`].
pub fn simulate<T: Scalar>(
    p: &ModelParameters<T>,
    x0: &State<T>,
    config: &SolverConfig<T>,
) -> Result<Trajectory<T>, SimulationError> {
    let report = validate_params(p);
    if let Some(first) = report.errors().next() {
        return Err(SimulationError::InvalidParameters(first.message.clone()));
    }
    let traj = abm_solve(&SicaField::new(*p), &x0.to_array(), config)?;
    let floor = -T::lit(NONNEGATIVITY_TOL);
    for (step, (_, x)) in traj.iter().enumerate() {
        if let Some(k) = x.iter().position(|&v| v < floor) {
            return Err(SimulationError::Negative {
                step,
                compartment: ["S", "I", "C", "A"][k],
                value: x[k].to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_parameters_are_clean() {
        assert!(validate_params(&ModelParameters::<f64>::reference(0.001)).is_clean());
    }

    #[test]
    fn zero_natural_death_is_hard_error() {
        let mut p = ModelParameters::<f64>::reference(0.001);
        p.natural_death = 0.0;
        let report = validate_params(&p);
        assert!(!report.is_valid());
        assert!(report
            .errors()
            .any(|i| i.message == "natural death rate must be positive"
                && i.field == "natural_death"));
    }

    #[test]
    fn eta_c_above_one_warns_only() {
        let mut p = ModelParameters::<f64>::reference(0.001);
        p.eta_c = 1.5;
        let report = validate_params(&p);
        assert!(report.is_valid());
        assert_eq!(report.warnings().count(), 1);
    }

    #[test]
    fn negative_rate_is_error() {
        let mut p = ModelParameters::<f64>::reference(0.001);
        p.default_c = -0.1;
        assert!(!validate_params(&p).is_valid());
    }

    #[test]
    fn force_of_infection_examples() {
        let p = ModelParameters::<f64>::reference(0.001);
        assert_eq!(
            force_of_infection(&p, &State::new(10.0, 0.0, 0.0, 0.0)),
            0.0
        );
        let v = force_of_infection(&p, &State::new(5.0, 1.0, 1.0, 1.0));
        assert_relative_eq!(v, 0.002315, max_relative = 1e-14);
    }

    #[test]
    fn rhs_vanishes_at_disease_free_state() {
        let p = ModelParameters::<f64>::reference(0.001);
        let dfe = State::new(p.recruitment / p.natural_death, 0.0, 0.0, 0.0);
        for v in rhs(&p, &dfe) {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn rhs_at_reference_initial_state() {
        let p = ModelParameters::<f64>::reference(0.001);
        let x = State::new(0.8, 0.1, 0.0, 0.0);
        let mu = 1.0 / 69.54;
        let d = rhs(&p, &x);
        // term by term
        let infection = 0.001 * 0.1 * 0.8;
        assert_relative_eq!(d[0], 2.1 - infection - 0.8 * mu, max_relative = 1e-14);
        assert_relative_eq!(d[0], 2.088_415_829_738_28, max_relative = 1e-12);
        assert_relative_eq!(
            d[1],
            infection - (0.1 + 1.0 + mu) * 0.1,
            max_relative = 1e-14
        );
        assert_relative_eq!(d[2], 0.1, max_relative = 1e-14);
        assert_relative_eq!(d[3], 0.01, max_relative = 1e-14);
    }

    #[test]
    fn simulate_rejects_invalid_parameters() {
        let mut p = ModelParameters::<f64>::reference(0.001);
        p.natural_death = 0.0;
        let err = simulate(
            &p,
            &State::new(0.8, 0.1, 0.0, 0.0),
            &SolverConfig::new(0.9, 0.1, 1.0),
        );
        assert!(matches!(err, Err(SimulationError::InvalidParameters(_))));
    }

    #[test]
    fn simulate_aborts_on_negative_state() {
        let p = ModelParameters::<f64>::reference(0.001);
        let err = simulate(
            &p,
            &State::new(0.8, -1.0, 0.0, 0.0),
            &SolverConfig::new(0.9, 0.1, 1.0),
        );
        assert!(matches!(
            err,
            Err(SimulationError::Negative {
                step: 0,
                compartment: "I",
                ..
            })
        ));
    }

    fn params() -> impl Strategy<Value = ModelParameters<f64>> {
        (
            0.5..5.0f64,
            0.005..0.1f64,
            0.0..0.05f64,
            0.0..1.0f64,
            1.0..2.0f64,
            0.0..2.0f64,
            0.0..1.0f64,
            0.0..1.0f64,
            0.0..0.5f64,
            0.0..2.0f64,
        )
            .prop_map(|(l, mu, b, ec, ea, phi, rho, g, om, d)| ModelParameters {
                recruitment: l,
                natural_death: mu,
                contact_rate: b,
                eta_c: ec,
                eta_a: ea,
                treat_i: phi,
                default_i: rho,
                treat_a: g,
                default_c: om,
                aids_death: d,
            })
    }

    proptest! {
        #[test]
        fn population_balance(p in params(), s in 0.0..200.0f64, i in 0.0..50.0f64, c in 0.0..50.0f64, a in 0.0..50.0f64) {
            let x = State::new(s, i, c, a);
            let sum: f64 = rhs(&p, &x).iter().sum();
            let expected = p.recruitment - p.natural_death * x.total() - p.aids_death * a;
            let scale = p.recruitment + p.natural_death * x.total() + p.aids_death * a
                + force_of_infection(&p, &x) * s + p.xi3() * i + p.xi2() * c + p.xi1() * a;
            prop_assert!((sum - expected).abs() <= 1e-12 * scale.max(1.0));
        }
    }
}
