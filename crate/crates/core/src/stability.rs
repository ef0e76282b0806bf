//! Local stability of the disease-free equilibrium for the fractional system.
//!
//! The Jacobian at Σ₀ factors its characteristic polynomial as `(λ + μ)·p(λ)` with
//! `p = λ³ + b₁λ² + b₂λ + b₃`. Stability of order α holds when every eigenvalue satisfies
//! `|arg λ| > απ/2`; the sign of the discriminant of `p` selects which coefficient test
//! applies.

use std::fmt;

use log::warn;
use num_complex::Complex;
use thiserror::Error;

use crate::equilibria::derived_constants;
use crate::model::ModelParameters;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("fractional order must lie in (0, 1], got {0}")]
    InvalidOrder(f64),
    #[error("eigenvalue list is empty")]
    NoEigenvalues,
}

/// Tolerance on `b₁b₂ − b₃ = 0` in rule (iv).
pub const RULE_IV_TOL: f64 = 1e-10;
/// Margins within this many radians of zero are marginal.
pub const MARGIN_TOL: f64 = 1e-10;

/// Monic cubic `λ³ + b₁λ² + b₂λ + b₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharPoly<T> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
}

impl<T: Scalar> CharPoly<T> {
    pub fn new(b1: T, b2: T, b3: T) -> Self {
        Self { b1, b2, b3 }
    }

    /// Monic cubic with the given roots.
    pub fn from_roots(roots: [Complex<T>; 3]) -> Self {
        let [r1, r2, r3] = roots;
        let b1 = -(r1 + r2 + r3);
        let b2 = r1 * r2 + r1 * r3 + r2 * r3;
        let b3 = -(r1 * r2 * r3);
        Self::new(b1.re, b2.re, b3.re)
    }

    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        ((x + self.b1) * x + self.b2) * x + self.b3
    }

    /// Routh–Hurwitz conditions for the cubic: `b₁ > 0`, `b₃ > 0`, `b₁b₂ − b₃ > 0`.
    pub fn routh_hurwitz(&self) -> bool {
        self.b1 > T::zero() && self.b3 > T::zero() && self.b1 * self.b2 - self.b3 > T::zero()
    }
}

/// Jacobian of the SICA field at Σ₀, row-major in `(S, I, C, A)` order.
pub fn jacobian_at_dfe<T: Scalar>(p: &ModelParameters<T>) -> [[T; 4]; 4] {
    let mu = p.natural_death;
    let z = T::zero();
    // Λβ/μ = β S⁰
    let lb = p.recruitment * p.contact_rate / mu;
    [
        [-mu, -lb, -lb * p.eta_c, -lb * p.eta_a],
        [
            z,
            lb - mu - p.treat_i - p.default_i,
            lb * p.eta_c + p.default_c,
            lb * p.eta_a + p.treat_a,
        ],
        [z, p.treat_i, -p.default_c - mu, z],
        [z, p.default_i, z, -p.treat_a - mu - p.aids_death],
    ]
}

/// Characteristic polynomial `det(λI − M)` of a 3×3 matrix from its invariants.
pub fn block_char_poly<T: Scalar>(m: &[[T; 3]; 3]) -> CharPoly<T> {
    let trace = m[0][0] + m[1][1] + m[2][2];
    let minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    CharPoly::new(-trace, minors, -det)
}

/// Lower-right 3×3 block (infected compartments) of [`jacobian_at_dfe`].
pub fn infected_block<T: Scalar>(p: &ModelParameters<T>) -> [[T; 3]; 3] {
    let j = jacobian_at_dfe(p);
    let mut m = [[T::zero(); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = j[r + 1][c + 1];
        }
    }
    m
}

/// Closed-form `b₁, b₂, b₃` of the cubic factor at Σ₀.
pub fn dfe_char_poly<T: Scalar>(p: &ModelParameters<T>) -> CharPoly<T> {
    let k = derived_constants(p);
    let (mu, lb) = (p.natural_death, p.recruitment * p.contact_rate);
    let (d, gamma, omega, rho, phi) =
        (p.aids_death, p.treat_a, p.default_c, p.default_i, p.treat_i);
    let two = T::lit(2.0);
    let b1 = -(lb - mu * (k.xi1 + k.xi2 + k.xi3)) / mu;
    let b2 = -(lb * (p.eta_a * rho + p.eta_c * phi + k.xi1 + k.xi2)
        - mu * (d * (k.xi2 + k.xi3)
            + gamma * (mu + k.xi2 + phi)
            + mu * (k.xi2 + omega + two * k.xi3)
            + omega * rho))
        / mu;
    let b3 = -(p.recruitment * k.script_n - mu * k.script_d) / mu;
    CharPoly::new(b1, b2, b3)
}

/// Largest coefficient mismatch between the closed form and the numeric block invariants,
/// each relative to `max(|closed|, |numeric|, 1)`.
pub fn char_poly_discrepancy<T: Scalar>(p: &ModelParameters<T>) -> T {
    let closed = dfe_char_poly(p);
    let numeric = block_char_poly(&infected_block(p));
    [
        (closed.b1, numeric.b1),
        (closed.b2, numeric.b2),
        (closed.b3, numeric.b3),
    ]
    .iter()
    .map(|&(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(T::one()))
    .fold(T::zero(), T::max)
}

/// Discriminant `18b₁b₂b₃ + (b₁b₂)² − 4b₃b₁³ − 4b₂³ − 27b₃²`; positive iff three distinct
/// real roots.
pub fn cubic_discriminant<T: Scalar>(c: &CharPoly<T>) -> T {
    let CharPoly { b1, b2, b3 } = *c;
    T::lit(18.0) * b1 * b2 * b3 + (b1 * b2).powi(2)
        - T::lit(4.0) * b3 * b1.powi(3)
        - T::lit(4.0) * b2.powi(3)
        - T::lit(27.0) * b3 * b3
}

/// Roots of the cubic: trigonometric form when the discriminant is positive, Cardano
/// otherwise (real root first, then the conjugate pair with positive imaginary part first).
pub fn cubic_roots<T: Scalar>(c: &CharPoly<T>) -> [Complex<T>; 3] {
    let CharPoly { b1, b2, b3 } = *c;
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    let shift = b1 / three;
    // depressed cubic y³ + py + q, λ = y − b₁/3
    let p = b2 - b1 * b1 / three;
    let q = two * b1.powi(3) / T::lit(27.0) - b1 * b2 / three + b3;

    if cubic_discriminant(c) > T::zero() && p < T::zero() {
        let m = two * (-p / three).sqrt();
        let arg = (three * q / (two * p) * (-three / p).sqrt())
            .max(-T::one())
            .min(T::one());
        let theta = arg.acos() / three;
        let third = two * T::PI() / three;
        let mut roots = [0usize, 1, 2].map(|k| {
            let y = m * (theta - third * T::from_index(k)).cos();
            polish(c, y - shift)
        });
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        return roots.map(|r| Complex::new(r, T::zero()));
    }

    let inner = q * q / T::lit(4.0) + p.powi(3) / T::lit(27.0);
    let root = inner.max(T::zero()).sqrt();
    let big_a = -q.signum() * (q.abs() / two + root).cbrt();
    let big_b = if big_a == T::zero() {
        T::zero()
    } else {
        -p / (three * big_a)
    };
    let real = polish(c, big_a + big_b - shift);
    // deflate: p(λ) = (λ − r)(λ² + eλ + f)
    let e = b1 + real;
    let f = b2 + real * e;
    let disc = e * e - T::lit(4.0) * f;
    let half = T::lit(0.5);
    if disc >= T::zero() {
        let s = disc.sqrt();
        let r2 = -half * (e + e.signum() * s);
        let r3 = if r2 == T::zero() { T::zero() } else { f / r2 };
        [real, r2, r3].map(|r| Complex::new(r, T::zero()))
    } else {
        let im = half * (-disc).sqrt();
        [
            Complex::new(real, T::zero()),
            Complex::new(-half * e, im),
            Complex::new(-half * e, -im),
        ]
    }
}

fn polish<T: Scalar>(c: &CharPoly<T>, mut x: T) -> T {
    for _ in 0..2 {
        let value = ((x + c.b1) * x + c.b2) * x + c.b3;
        let slope = (T::lit(3.0) * x + T::lit(2.0) * c.b1) * x + c.b2;
        if slope == T::zero() {
            break;
        }
        let next = x - value / slope;
        let next_value = ((next + c.b1) * next + c.b2) * next + c.b3;
        if !(next_value.abs() < value.abs()) {
            break;
        }
        x = next;
    }
    x
}

/// `min |arg λ| − απ/2` over the eigenvalues; `arg 0` is taken as 0.
pub fn matignon_margin<T: Scalar>(
    eigenvalues: &[Complex<T>],
    alpha: T,
) -> Result<T, StabilityError> {
    check_order(alpha)?;
    if eigenvalues.is_empty() {
        return Err(StabilityError::NoEigenvalues);
    }
    let sector = alpha * T::FRAC_PI_2();
    let min_arg = eigenvalues
        .iter()
        .map(|z| {
            if z.re == T::zero() && z.im == T::zero() {
                T::zero()
            } else {
                z.im.atan2(z.re).abs()
            }
        })
        .fold(T::infinity(), T::min);
    Ok(min_arg - sector)
}

fn check_order<T: Scalar>(alpha: T) -> Result<(), StabilityError> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(StabilityError::InvalidOrder(
            alpha.to_f64().unwrap_or(f64::NAN),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityRule {
    /// D(p) > 0 (or α = 1): Routh–Hurwitz decides.
    RouthHurwitzI,
    /// D(p) < 0, b₁ ≥ 0, b₂ ≥ 0, b₃ > 0, α < 2/3: stable.
    RuleII,
    /// D(p) < 0, b₁ < 0, b₂ < 0, α > 2/3: unstable.
    RuleIII,
    /// D(p) < 0, b₁ > 0, b₂ > 0, b₁b₂ = b₃: stable for α < 1.
    RuleIV,
    /// b₃ ≤ 0.
    NecessaryB3Violated,
    /// No coefficient rule applies; the eigenvalue test decides.
    Inconclusive,
}

impl StabilityRule {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RouthHurwitzI => "routh_hurwitz_i",
            Self::RuleII => "rule_ii",
            Self::RuleIII => "rule_iii",
            Self::RuleIV => "rule_iv",
            Self::NecessaryB3Violated => "necessary_b3_violated",
            Self::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for StabilityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LocallyAsymptoticallyStable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LocallyAsymptoticallyStable => "locally_asymptotically_stable",
            Self::Unstable => "unstable",
            Self::Inconclusive => "inconclusive",
        }
    }

    pub fn is_stable(self) -> bool {
        self == Self::LocallyAsymptoticallyStable
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<T> {
    pub alpha: T,
    pub coefficients: CharPoly<T>,
    pub discriminant: T,
    /// `−μ` followed by the three roots of the cubic.
    pub eigenvalues: [Complex<T>; 4],
    pub min_arg_margin: T,
    pub applied_rule: StabilityRule,
    /// What the coefficient rule alone concluded.
    pub rule_verdict: Verdict,
    /// Final verdict; the eigenvalue test overrides the rule on disagreement.
    pub verdict: Verdict,
    pub rule_agrees: bool,
    /// See [`char_poly_discrepancy`].
    pub coefficient_discrepancy: T,
}

/// Classifies Σ₀ for order `alpha ∈ (0, 1]`.
///
/// Rules are tried in order: `b₃ ≤ 0`, then `D > 0` (Routh–Hurwitz, also used for every
/// `D` at α = 1), then the `D < 0` rules (ii)–(iv). The eigenvalue margin is always
/// computed and wins when the rule disagrees.
pub fn classify_dfe<T: Scalar>(
    p: &ModelParameters<T>,
    alpha: T,
) -> Result<StabilityReport<T>, StabilityError> {
    check_order(alpha)?;
    let coefficients = dfe_char_poly(p);
    let CharPoly { b1, b2, b3 } = coefficients;
    let discriminant = cubic_discriminant(&coefficients);
    let [r1, r2, r3] = cubic_roots(&coefficients);
    let eigenvalues = [Complex::new(-p.natural_death, T::zero()), r1, r2, r3];
    let min_arg_margin = matignon_margin(&eigenvalues, alpha)?;

    let zero = T::zero();
    let two_thirds = T::lit(2.0 / 3.0);
    let stable_if = |cond: bool| {
        if cond {
            Verdict::LocallyAsymptoticallyStable
        } else {
            Verdict::Unstable
        }
    };
    let (applied_rule, rule_verdict) = if b3 <= zero {
        (StabilityRule::NecessaryB3Violated, Verdict::Unstable)
    } else if discriminant > zero || alpha == T::one() {
        (
            StabilityRule::RouthHurwitzI,
            stable_if(coefficients.routh_hurwitz()),
        )
    } else if discriminant < zero && b1 >= zero && b2 >= zero && alpha < two_thirds {
        (StabilityRule::RuleII, Verdict::LocallyAsymptoticallyStable)
    } else if discriminant < zero && b1 < zero && b2 < zero && alpha > two_thirds {
        (StabilityRule::RuleIII, Verdict::Unstable)
    } else if discriminant < zero
        && b1 > zero
        && b2 > zero
        && (b1 * b2 - b3).abs() <= T::lit(RULE_IV_TOL)
    {
        (StabilityRule::RuleIV, Verdict::LocallyAsymptoticallyStable)
    } else {
        (StabilityRule::Inconclusive, Verdict::Inconclusive)
    };

    let margin_tol = T::lit(MARGIN_TOL);
    let eigen_verdict = if min_arg_margin > margin_tol {
        Verdict::LocallyAsymptoticallyStable
    } else if min_arg_margin < -margin_tol {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    };
    let rule_agrees = rule_verdict == Verdict::Inconclusive || rule_verdict == eigen_verdict;
    if !rule_agrees {
        warn!(
            "rule {applied_rule} concluded {rule_verdict} but eigenvalue margin {min_arg_margin} gives {eigen_verdict} (alpha = {alpha})"
        );
    }

    Ok(StabilityReport {
        alpha,
        coefficients,
        discriminant,
        eigenvalues,
        min_arg_margin,
        applied_rule,
        rule_verdict,
        verdict: eigen_verdict,
        rule_agrees,
        coefficient_discrepancy: char_poly_discrepancy(p),
    })
}
