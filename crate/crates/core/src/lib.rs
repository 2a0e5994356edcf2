//! Zeta functions of hyperelliptic curves `Y^2 = Q(X, Γ)` in a one-parameter
//! family over a finite field of odd characteristic.
//!
//! The expensive work happens once per family ([`deformation::precompute`]):
//! the Frobenius matrix is computed as a power series in `Γ`, scaled into a
//! polynomial `r(Γ)^M F(Γ)`. Each parameter `γ̄ ∈ F_{q^n}` then costs one
//! polynomial reduction, a norm product and a characteristic polynomial
//! ([`zeta::zeta_for_parameter`]).

pub mod arith;
pub mod cohomology;
pub mod deformation;
pub mod error;
pub mod oracle;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
