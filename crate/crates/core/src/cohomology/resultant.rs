use super::family::CurveFamily;
use super::forms::{xp_add, xp_derivative, xp_mul, xp_sub, XPoly};
use crate::arith::ff::{poly_eval, poly_trim, FiniteField, Fqn};
use crate::arith::qq::Qq;
use crate::error::{Error, Result};
use crate::series::TruncSeries;

/// `r(Γ) = α(X,Γ) Q + β(X,Γ) Q'` with `deg_X α <= 2g − 1`, `deg_X β <= 2g`.
///
/// Every polynomial in `Γ` is held as a series whose truncation exceeds
/// its degree, so all arithmetic here is exact up to the `p`-adic precision.
#[derive(Clone, Debug)]
pub struct ResultantCertificate {
    genus: usize,
    kappa: usize,
    prec: u32,
    q: XPoly,
    r: TruncSeries,
    alpha: XPoly,
    beta: XPoly,
    rho: usize,
    b_deg: usize,
    rbar: Vec<Vec<u64>>,
}

impl ResultantCertificate {
    pub fn genus(&self) -> usize {
        self.genus
    }
    pub fn kappa(&self) -> usize {
        self.kappa
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn q(&self) -> &[TruncSeries] {
        &self.q
    }
    pub fn r(&self) -> &TruncSeries {
        &self.r
    }
    pub fn alpha(&self) -> &[TruncSeries] {
        &self.alpha
    }
    pub fn beta(&self) -> &[TruncSeries] {
        &self.beta
    }
    /// `deg_Γ r`.
    pub fn rho(&self) -> usize {
        self.rho
    }
    /// Largest `Γ`-degree among the coefficients of `α` and `β`.
    pub fn b_deg(&self) -> usize {
        self.b_deg
    }
    /// Largest `X`-degree of `α` and `β`.
    pub fn d_deg(&self) -> usize {
        self.alpha.len().max(self.beta.len()).saturating_sub(1)
    }
    /// `r̄` over `F_q`, constant term first.
    pub fn rbar(&self) -> &[Vec<u64>] {
        &self.rbar
    }

    /// `r̄(γ̄)` for `γ̄ ∈ F_{q^n}`.
    pub fn rbar_at(&self, fqn: &Fqn, gamma: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let lifted: Vec<Vec<Vec<u64>>> = self.rbar.iter().map(|c| fqn.from_base(c)).collect();
        poly_eval(fqn, &lifted, &gamma.to_vec())
    }
}

fn series_degree(s: &[TruncSeries]) -> usize {
    s.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
}

/// Characteristic polynomial `det(tI − A) = Σ c_i t^(n−i)` by Berkowitz's
/// division-free recursion; returns `c_0 = 1, …, c_n`.
fn berkowitz(qq: &Qq, a: &[Vec<TruncSeries>], t: usize) -> Result<Vec<TruncSeries>> {
    let n = a.len();
    let one = TruncSeries::constant(qq, &qq.one(), t);
    let mut vect = vec![one.clone()];
    for r in 0..n {
        let mut col = vec![one.clone(), a[r][r].neg(qq)];
        let mut w: Vec<TruncSeries> = (0..r).map(|i| a[i][r].clone()).collect();
        for k in 0..r {
            let mut dot = TruncSeries::zero(qq, t);
            for j in 0..r {
                dot = dot.add(qq, &a[r][j].mul(qq, &w[j])?)?;
            }
            col.push(dot.neg(qq));
            if k + 1 < r {
                let mut nw = Vec::with_capacity(r);
                for i in 0..r {
                    let mut s = TruncSeries::zero(qq, t);
                    for j in 0..r {
                        s = s.add(qq, &a[i][j].mul(qq, &w[j])?)?;
                    }
                    nw.push(s);
                }
                w = nw;
            }
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut s = TruncSeries::zero(qq, t);
            for j in 0..=i.min(r) {
                s = s.add(qq, &col[i - j].mul(qq, &vect[j])?)?;
            }
            next.push(s);
        }
        vect = next;
    }
    Ok(vect)
}

/// Builds and checks the certificate over `qq`.
///
/// The unknown vector is `(α_0, …, α_{2g−1}, β_0, …, β_{2g})`, and row `i`
/// of the system is the coefficient of `X^i` in `αQ + βQ'`. The solution
/// for the right-hand side `r e_0` with `r = det` is the first column of
/// the adjugate, obtained from the characteristic polynomial through
/// Cayley–Hamilton.
pub fn validate_family(family: &CurveFamily, qq: &Qq) -> Result<ResultantCertificate> {
    if qq.p() != family.p() || qq.chibar() != family.chibar() {
        return Err(Error::InvalidInput("Q_q context does not match the family".into()));
    }
    if !family.base_is_squarefree() {
        return Err(Error::BadBaseCurve);
    }
    let g = family.genus();
    let kappa = family.kappa();
    let n = 4 * g + 1;
    let t = n * kappa + 1;
    let lift = family.lift(qq);
    let q: XPoly = lift.iter().map(|row| TruncSeries::from_coeffs(qq, row, t)).collect();
    let dq = xp_derivative(qq, &q);
    let zero = TruncSeries::zero(qq, t);
    let mut m = vec![vec![zero.clone(); n]; n];
    for (row, mrow) in m.iter_mut().enumerate() {
        for i in 0..2 * g {
            if let Some(c) = row.checked_sub(i).and_then(|d| q.get(d)) {
                mrow[i] = c.clone();
            }
        }
        for i in 0..=2 * g {
            if let Some(c) = row.checked_sub(i).and_then(|d| dq.get(d)) {
                mrow[2 * g + i] = c.clone();
            }
        }
    }
    let cp = berkowitz(qq, &m, t)?;
    let det = if n % 2 == 0 { cp[n].clone() } else { cp[n].neg(qq) };
    let mut v = vec![zero.clone(); n];
    let mut w: Vec<TruncSeries> = (0..n).map(|i| if i == 0 { cp[0].clone() } else { zero.clone() }).collect();
    for k in 0..n {
        let c = &cp[n - 1 - k];
        for i in 0..n {
            v[i] = v[i].add(qq, &w[i].mul(qq, c)?)?;
        }
        if k + 1 < n {
            let mut nw = vec![zero.clone(); n];
            for (i, nwi) in nw.iter_mut().enumerate() {
                for j in 0..n {
                    if !m[i][j].is_zero() && !w[j].is_zero() {
                        *nwi = nwi.add(qq, &m[i][j].mul(qq, &w[j])?)?;
                    }
                }
            }
            w = nw;
        }
    }
    if n % 2 == 0 {
        v = v.iter().map(|x| x.neg(qq)).collect();
    }
    let alpha: XPoly = super::forms::xp_trim(v[..2 * g].to_vec());
    let beta: XPoly = super::forms::xp_trim(v[2 * g..].to_vec());

    let lhs = xp_add(qq, &xp_mul(qq, &alpha, &q)?, &xp_mul(qq, &beta, &dq)?)?;
    if !xp_sub(qq, &lhs, std::slice::from_ref(&det))?.is_empty() {
        return Err(Error::Invariant("αQ + βQ' ≠ r".into()));
    }

    let fq = family.fq();
    let rbar = poly_trim(
        &fq,
        det.coeffs(qq)
            .iter()
            .map(|c| qq.reduce_fq(c))
            .collect::<Result<Vec<_>>>()?,
    );
    if rbar.is_empty() {
        return Err(Error::GenericallySingular);
    }
    if fq.is_zero(&rbar[0]) {
        return Err(Error::BadBaseCurve);
    }
    let rho = det.degree().unwrap_or(0);
    let b_deg = series_degree(&alpha).max(series_degree(&beta));
    if rho > 4 * g * kappa {
        return Err(Error::Invariant(format!("deg r = {rho} exceeds 4gκ")));
    }
    if b_deg > (4 * g).saturating_sub(1) * kappa {
        return Err(Error::Invariant(format!("deg_Γ of α, β = {b_deg} exceeds (4g−1)κ")));
    }
    Ok(ResultantCertificate {
        genus: g,
        kappa,
        prec: qq.prec(),
        q,
        r: det,
        alpha,
        beta,
        rho,
        b_deg,
        rbar,
    })
}
