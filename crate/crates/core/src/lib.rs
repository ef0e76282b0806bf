//! Caputo fractional-order SICA HIV/AIDS model.
//!
//! - [`fde`]: fractional Adams–Bashforth–Moulton solver and its oracles.
//! - [`model`]: the SICA vector field and its parameters.
//! - [`equilibria`]: R₀, Σ₀, Σ*.
//! - [`stability`]: Jacobian at Σ₀, characteristic cubic, fractional stability rules.
//! - [`lyapunov`]: Lyapunov functions and trajectory audits.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix `f64`.

pub mod equilibria;
pub mod fde;
pub mod lyapunov;
pub mod model;
mod scalar;
pub mod stability;

pub use num_complex::Complex;
pub use scalar::Scalar;

pub type SolverConfig = fde::SolverConfig<f64>;
pub type Trajectory = fde::Trajectory<f64>;
pub type ModelParameters = model::ModelParameters<f64>;
pub type State = model::State<f64>;
pub type SicaField = model::SicaField<f64>;
pub type EquilibriumSet = equilibria::EquilibriumSet<f64>;
pub type DerivedConstants = equilibria::DerivedConstants<f64>;
pub type CharPoly = stability::CharPoly<f64>;
pub type StabilityReport = stability::StabilityReport<f64>;
pub type LyapunovCoefficients = lyapunov::LyapunovCoefficients<f64>;
pub type AuditCriteria = lyapunov::AuditCriteria<f64>;
pub type AuditReport = lyapunov::AuditReport<f64>;
