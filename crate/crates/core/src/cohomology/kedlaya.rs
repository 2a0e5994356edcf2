use super::family::CurveFamily;
use super::forms::{DifferentialForm, Reducer, XPoly};
use super::resultant::validate_family;
use crate::arith::int::{ilog_ceil, ilog_floor};
use crate::arith::qq::{Qq, QqElem};
use crate::arith::rawpoly::{self, RawPoly};
use crate::error::{self, Error, Result};
use crate::series::{QqMatrix, TruncSeries};
use rayon::prelude::*;
use rug::Integer;

/// Upper bound on the shift created by reducing the `j`-th binomial term.
pub fn kedlaya_loss(p: u64, g: usize, j: usize) -> u32 {
    let a = (2 * g as u64 + 1) * (j as u64 + 1) - 2;
    let b = 2 * (p * j as u64 + (p - 1) / 2) + 1;
    ilog_floor(p, a.max(1)) + ilog_floor(p, b)
}

/// Smallest `J` such that every term past `J` vanishes modulo `p^n` after
/// reduction, capped at `2n + 4`.
pub fn kedlaya_terms(p: u64, g: usize, n: u32) -> usize {
    let mut j = 0usize;
    loop {
        let ok = (j + 1..j + 64).all(|i| i as i64 + 1 - kedlaya_loss(p, g, i) as i64 >= n as i64);
        if ok || j >= 2 * n as usize + 4 {
            return j.min(2 * n as usize + 4);
        }
        j += 1;
    }
}

/// `ord F(0) >= -(⌈log_p g⌉ + 2)`.
pub fn frobenius_shift_bound(p: u64, g: usize) -> u32 {
    ilog_ceil(p, g as u64) + 2
}

/// `(Q^σ(X^p))^(-1/2) = Q^(-p/2) · Σ_j c_j p^j (E₁/Q^p)^j` with
/// `E₁ = (Q^σ(X^p) − Q^p)/p`, expanded as `Σ_l T_l Q^(-l)` where each
/// `T_l` has degree `<= 2g`.
#[derive(Clone, Debug)]
pub struct FrobeniusExpansion {
    qq: Qq,
    q: RawPoly,
    g: usize,
    terms: usize,
    levels: Vec<RawPoly>,
}

fn binom_half(qq: &Qq, j: usize, w: u32) -> Vec<Integer> {
    let m = qq.pow_p(w);
    let b = Integer::from(Integer::binomial_u(2 * j as u32, j as u32));
    let inv4 = Integer::from(4).invert(&m).expect("p odd");
    let mut c = b * inv4.pow_mod(&Integer::from(j), &m).expect("unit");
    if j % 2 == 1 {
        c = -c;
    }
    let mut v = rawpoly::zero_coeff(qq);
    v[0] = c;
    qq.rmod(&mut v, w);
    v
}

impl FrobeniusExpansion {
    /// `family` must be constant in `Γ`; keeps the terms `j <= terms`.
    pub fn new(qq: &Qq, family: &CurveFamily, terms: usize) -> Result<Self> {
        if family.kappa() != 0 {
            return Err(Error::InvalidInput("Frobenius expansion needs a constant fibre".into()));
        }
        let p = qq.p();
        let pu = p as usize;
        let w = qq.prec();
        let g = family.genus();
        let lift = family.lift(qq);
        let q: RawPoly = lift.iter().map(|row| row[0].coeffs().to_vec()).collect();
        let wide = w + 1;
        let mut qsig: RawPoly = vec![rawpoly::zero_coeff(qq); pu * (q.len() - 1) + 1];
        for (i, c) in q.iter().enumerate() {
            qsig[i * pu] = qq.frobenius_raw(c, 1, wide);
        }
        let mut qp = rawpoly::one(qq);
        for _ in 0..p {
            qp = rawpoly::mul(qq, &qp, &q, wide);
        }
        let e = rawpoly::add(qq, &qsig, &qp, wide, -1);
        let pint = Integer::from(p);
        let e1: RawPoly = e
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|x| {
                        if !x.is_divisible(&pint) {
                            return Err(Error::Invariant("Q^σ(X^p) ≢ Q^p mod p".into()));
                        }
                        Ok(x / &pint)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut digits = Vec::with_capacity(pu);
        let mut rest = e1;
        for _ in 0..pu {
            let (quo, rem) = rawpoly::divrem_monic(qq, &rest, &q, w);
            digits.push(rem);
            rest = quo;
        }
        if !rest.is_empty() {
            return Err(Error::Invariant("E₁ has too many Q-adic digits".into()));
        }

        // Horner in the variable E₁/Q^p = Σ_{s=1}^{p} e_{p−s} Q^(-s).
        let mut d: Vec<RawPoly> = vec![vec![binom_half(qq, terms, w.saturating_sub(terms as u32).max(1))]];
        for j in (0..terms).rev() {
            let wj = w.saturating_sub(j as u32).max(1);
            let len = d.len() + pu;
            let mut acc: Vec<RawPoly> = vec![Vec::new(); len];
            for (l, dl) in d.iter().enumerate() {
                if dl.is_empty() {
                    continue;
                }
                for s in 1..=pu {
                    let e = &digits[pu - s];
                    if e.is_empty() {
                        continue;
                    }
                    let prod = rawpoly::mul(qq, dl, e, wj);
                    acc[l + s] = rawpoly::add(qq, &acc[l + s], &prod, wj, 1);
                }
            }
            let mut next: Vec<RawPoly> = vec![Vec::new(); len];
            for l in (0..len).rev() {
                let a = std::mem::take(&mut acc[l]);
                if a.is_empty() {
                    continue;
                }
                let (quo, rem) = rawpoly::divrem_monic(qq, &a, &q, wj);
                next[l] = rawpoly::add(qq, &next[l], &rem, wj, 1);
                if !quo.is_empty() {
                    next[l - 1] = rawpoly::add(qq, &next[l - 1], &quo, wj, 1);
                }
            }
            let pw = Integer::from(p);
            for lvl in next.iter_mut() {
                for c in lvl.iter_mut() {
                    for x in c.iter_mut() {
                        *x *= &pw;
                    }
                    qq.rmod(c, wj);
                }
                *lvl = rawpoly::trim(std::mem::take(lvl));
            }
            let cj = vec![binom_half(qq, j, wj)];
            next[0] = rawpoly::add(qq, &next[0], &cj, wj, 1);
            while next.last().is_some_and(|l| l.is_empty()) {
                next.pop();
            }
            d = next;
        }
        Ok(FrobeniusExpansion {
            qq: qq.clone(),
            q,
            g,
            terms,
            levels: d,
        })
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// `T_l`, constant term first.
    pub fn levels(&self) -> &[RawPoly] {
        &self.levels
    }

    /// `p^(-1) F_p(X^i dX/√Q) = Σ_l X^(pi+p−1) T_l dX / √Q^(2l+p)` as a
    /// form with constant series coefficients.
    pub fn basis_image(&self, i: usize) -> Result<DifferentialForm> {
        let qq = &self.qq;
        let p = qq.p() as i64;
        let w = qq.prec();
        let off = (p as usize) * i + p as usize - 1;
        let mut form = DifferentialForm::new();
        let to_series = |poly: &RawPoly| -> XPoly {
            poly.iter()
                .map(|c| TruncSeries::constant(qq, &qq.make(c.clone(), 0), 1))
                .collect()
        };
        for (l, t) in self.levels.iter().enumerate() {
            if t.is_empty() {
                continue;
            }
            let mut u: RawPoly = vec![rawpoly::zero_coeff(qq); off];
            u.extend(t.iter().cloned());
            let mut tdx = 0i64;
            while !u.is_empty() {
                let (quo, rem) = rawpoly::divrem_monic(qq, &u, &self.q, w);
                if !rem.is_empty() {
                    form.add_term(qq, 2 * l as i64 + p - 2 * tdx, &to_series(&rem))?;
                }
                u = quo;
                tdx += 1;
            }
        }
        Ok(form)
    }

    pub fn genus(&self) -> usize {
        self.g
    }
}

/// Working precision and number of expansion terms for a target `p^n`.
pub fn kedlaya_parameters(p: u64, g: usize, n: u32) -> (u32, usize, u32) {
    let terms = kedlaya_terms(p, g, n);
    let loss = kedlaya_loss(p, g, terms.max(1));
    let w = n + loss + 2;
    let budget = 2 * loss + frobenius_shift_bound(p, g) + 4;
    (w, terms, budget)
}

/// `F(0)`: row `i` holds the coordinates of `F_p(X^i dX/√Q)` at `Γ = 0`,
/// returned in the context `target`.
pub fn kedlaya_frobenius_zero(family: &CurveFamily, target: &Qq) -> Result<QqMatrix> {
    let (w, terms, budget) = kedlaya_parameters(target.p(), family.genus(), target.prec());
    kedlaya_frobenius_zero_with(family, target, w, terms, budget)
}

/// As [`kedlaya_frobenius_zero`] with explicit working precision, number
/// of terms and shift budget.
pub fn kedlaya_frobenius_zero_with(
    family: &CurveFamily,
    target: &Qq,
    w: u32,
    terms: usize,
    budget: u32,
) -> Result<QqMatrix> {
    let base = family.at_zero();
    let qq = target.with_prec_budget(w, budget)?;
    let cert = validate_family(&base, &qq)?;
    let reducer = Reducer::new(&qq, &cert, 1)?;
    let exp = FrobeniusExpansion::new(&qq, &base, terms)?;
    let g = family.genus();
    let rows: Vec<Vec<QqElem>> = (0..2 * g)
        .into_par_iter()
        .map(|i| -> Result<Vec<QqElem>> {
            let coords = reducer.reduce(exp.basis_image(i)?)?;
            Ok(coords
                .iter()
                .map(|c| {
                    let x = qq.mul_p_pow(&c.coeff(&qq, 0), 1);
                    qq.to_context(&x, target)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let shift = rows.iter().flatten().map(|x| x.shift()).max().unwrap_or(0);
    error::budget("Frobenius matrix at Γ = 0", shift, frobenius_shift_bound(target.p(), g))?;
    Ok(rows)
}
