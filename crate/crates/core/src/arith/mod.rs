//! Exact arithmetic: p-adic integers with scaled mantissas, the unramified
//! extensions `Q_q` and `Q_{q^n}` with their Frobenius, finite fields, and
//! Teichmüller moduli.

pub mod ff;
pub mod int;
pub mod kronecker;
pub mod padic;
pub mod qq;
pub mod qqn;
pub mod rawpoly;
pub mod teichmuller;

pub use ff::{Ext, FiniteField, Fp, Fq, Fqn};
pub use padic::{PadicScaled, PrimeModulus};
pub use qq::{Qq, QqElem};
pub use qqn::{Qqn, QqnElem};
pub use teichmuller::{hensel_split, teichmuller_modulus};
