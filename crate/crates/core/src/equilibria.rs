//! Basic reproduction number and the closed-form equilibria.

use crate::model::{rhs, ModelParameters, State};
use crate::Scalar;

/// ξ₁, ξ₂, ξ₃ and the numerator/denominator 𝒩, 𝒟 with `R₀ = S⁰𝒩/𝒟`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants<T> {
    pub xi1: T,
    pub xi2: T,
    pub xi3: T,
    /// 𝒩 = β(ξ₂(ξ₁ + ρη_A) + η_C φ ξ₁)
    pub script_n: T,
    /// 𝒟 = μ(ξ₂(ρ + ξ₁) + φξ₁ + ρd) + ρωd
    pub script_d: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSet<T> {
    pub r0: T,
    pub sigma0: State<T>,
    /// Present iff `r0 > 1`.
    pub sigma_star: Option<State<T>>,
    pub constants: DerivedConstants<T>,
}

pub fn derived_constants<T: Scalar>(p: &ModelParameters<T>) -> DerivedConstants<T> {
    let (xi1, xi2, xi3) = (p.xi1(), p.xi2(), p.xi3());
    let (mu, rho, phi, d, omega) = (
        p.natural_death,
        p.default_i,
        p.treat_i,
        p.aids_death,
        p.default_c,
    );
    let script_n = p.contact_rate * (xi2 * (xi1 + rho * p.eta_a) + p.eta_c * phi * xi1);
    let script_d = mu * (xi2 * (rho + xi1) + phi * xi1 + rho * d) + rho * omega * d;
    DerivedConstants {
        xi1,
        xi2,
        xi3,
        script_n,
        script_d,
    }
}

/// R₀ = (Λ/μ)·𝒩/𝒟
pub fn compute_r0<T: Scalar>(p: &ModelParameters<T>) -> T {
    let k = derived_constants(p);
    p.recruitment / p.natural_death * k.script_n / k.script_d
}

/// Σ₀ = (Λ/μ, 0, 0, 0)
pub fn disease_free_equilibrium<T: Scalar>(p: &ModelParameters<T>) -> State<T> {
    State::new(
        p.recruitment / p.natural_death,
        T::zero(),
        T::zero(),
        T::zero(),
    )
}

/// Endemic equilibrium Σ*, or `None` when `R₀ ≤ 1`.
///
/// `S*` and `I*` are strictly positive; `C*` and `A*` vanish only when φ or ρ does.
pub fn endemic_equilibrium<T: Scalar>(p: &ModelParameters<T>) -> Option<State<T>> {
    if !(compute_r0(p) > T::one()) {
        return None;
    }
    let k = derived_constants(p);
    // Λ𝒩 − μ𝒟 > 0 ⇔ R₀ > 1
    let excess = p.recruitment * k.script_n - p.natural_death * k.script_d;
    let scale = excess / (k.script_d * k.script_n);
    let star = State::new(
        k.script_d / k.script_n,
        k.xi1 * k.xi2 * scale,
        p.treat_i * k.xi1 * scale,
        p.default_i * k.xi2 * scale,
    );
    // R₀ marginally above 1 can still round ρ- or φ-scaled components to zero
    (star.i > T::zero() && star.s > T::zero()).then_some(star)
}

pub fn equilibrium_set<T: Scalar>(p: &ModelParameters<T>) -> EquilibriumSet<T> {
    EquilibriumSet {
        r0: compute_r0(p),
        sigma0: disease_free_equilibrium(p),
        sigma_star: endemic_equilibrium(p),
        constants: derived_constants(p),
    }
}

/// ‖rhs(p, x)‖∞
pub fn equilibrium_residual<T: Scalar>(p: &ModelParameters<T>, x: &State<T>) -> T {
    rhs(p, x).iter().map(|v| v.abs()).fold(T::zero(), T::max)
}
