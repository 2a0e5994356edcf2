//! Monsky–Washnitzer side of the computation: the family, its resultant
//! certificate, reduction of differentials to the basis `X^i dX/√Q`
//! (`0 <= i < 2g`), the connection matrix and Frobenius at `Γ = 0`.

pub mod connection;
pub mod family;
pub mod forms;
pub mod kedlaya;
pub mod resultant;

pub use connection::{connection_matrix, ConnectionMatrix};
pub use family::CurveFamily;
pub use forms::{DifferentialForm, Reducer, XPoly};
pub use kedlaya::{kedlaya_frobenius_zero, FrobeniusExpansion};
pub use resultant::{validate_family, ResultantCertificate};
