use super::forms::{DifferentialForm, Reducer, XPoly};
use super::resultant::ResultantCertificate;
use crate::arith::qq::Qq;
use crate::error::{self, Error, Result};
use crate::series::{SeriesMatrix, TruncSeries};
use rayon::prelude::*;

/// `H = r G`, where `G` is the matrix of the Gauss–Manin connection `∇_Γ`
/// on the basis `X^i dX/√Q`: `r ∇ b_i = Σ_l H[i][l] b_l`.
#[derive(Clone, Debug)]
pub struct ConnectionMatrix {
    h: SeriesMatrix,
    degree: usize,
}

impl ConnectionMatrix {
    /// Entries as series truncated at `8gκ + 1`.
    pub fn matrix(&self) -> &SeriesMatrix {
        &self.h
    }
    /// Largest `Γ`-degree of an entry.
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn shift(&self) -> u32 {
        self.h.shift()
    }
}

/// `p^(-bound)` is the worst denominator allowed in `H`.
pub fn h_shift_bound(p: u64, g: usize) -> u32 {
    (10 * g as u64).div_ceil(p - 1) as u32
}

/// `∂_Γ Q` as a polynomial in `X`.
pub fn q_dot(qq: &Qq, cert: &ResultantCertificate, trunc: usize) -> XPoly {
    cert.q()
        .iter()
        .map(|c| c.to_context(qq).derivative(qq).with_trunc(qq, trunc))
        .collect()
}

/// Row `i` is the reduction of `−½ r X^i Q̇ dX/√Q³`; the entries are
/// polynomials of degree below the working truncation, so `1/r` as a
/// power series introduces no error.
pub fn connection_matrix(qq: &Qq, cert: &ResultantCertificate) -> Result<ConnectionMatrix> {
    let g = cert.genus();
    let kappa = cert.kappa();
    let deg_bound = 8 * g * kappa;
    let work = deg_bound + 2 * kappa + 2;
    let reducer = Reducer::new(qq, cert, work)?;
    let rows: Vec<Vec<TruncSeries>> = (0..2 * g)
        .into_par_iter()
        .map(|i| reducer.reduce(r_times_derivative_form(qq, cert, i, work)?))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(4 * g * g);
    let mut degree = 0;
    for row in rows {
        for e in row {
            if let Some(d) = e.degree() {
                degree = degree.max(d);
            }
            entries.push(e.with_trunc(qq, deg_bound + 1));
        }
    }
    if degree > deg_bound {
        return Err(Error::Invariant(format!(
            "connection matrix has Γ-degree {degree} > 8gκ = {deg_bound}"
        )));
    }
    let h = SeriesMatrix::from_entries(qq, 2 * g, &entries)?;
    error::budget("connection matrix", h.shift(), h_shift_bound(qq.p(), g))?;
    Ok(ConnectionMatrix { h, degree })
}

/// `r ∂_Γ b_i = −½ r X^i Q̇ dX/√Q³`.
pub fn r_times_derivative_form(qq: &Qq, cert: &ResultantCertificate, i: usize, trunc: usize) -> Result<DifferentialForm> {
    let r = cert.r().to_context(qq).with_trunc(qq, trunc);
    let qdot = q_dot(qq, cert, trunc);
    let mut b: XPoly = vec![TruncSeries::zero(qq, trunc); i];
    for c in &qdot {
        b.push(c.mul(qq, &r)?.div_int(qq, -2)?);
    }
    Ok(DifferentialForm::single(3, b))
}
