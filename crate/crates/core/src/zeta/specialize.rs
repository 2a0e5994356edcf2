//! Teichmüller points and the specialised Frobenius matrix `F(γ)`.

use crate::arith::ff::{min_poly_over_base, min_poly_over_prime, poly_eval, FiniteField, Fqn};
use crate::arith::qq::QqElem;
use crate::arith::qqn::{Qqn, QqnElem};
use crate::arith::teichmuller::{cofactor, hensel_split, teichmuller_modulus};
use crate::cohomology::kedlaya::frobenius_shift_bound;
use crate::deformation::{r_precision, DeformationCache};
use crate::error::{Error, Result};
use rayon::prelude::*;

/// A matrix over `Q_{q^n}`, row-major.
pub type QqnMatrix = Vec<Vec<QqnElem>>;

/// Everything needed to evaluate the cached family at one parameter.
#[derive(Clone, Debug)]
pub struct SpecializationContext {
    /// `γ̄` in the caller's representation of `F_{q^n}`.
    pub gamma_bar: Vec<Vec<u64>>,
    /// Degree of `F_q(γ̄)` over `F_q`.
    pub n: usize,
    /// Minimal polynomial of `γ̄` over `F_q`.
    pub phi_bar: Vec<Vec<u64>>,
    /// Teichmüller modulus over `Z_p` of the minimal polynomial over `F_p`.
    pub f: Vec<rug::Integer>,
    /// `Q_{q^n} = Q_q[y]/φ`, where `y` is the Teichmüller lift of `γ̄`.
    pub qqn: Qqn,
    /// The same field to [`r_precision`]. Entries of `F` may have negative
    /// valuation, so `r(γ)^(-M)` and the reduction modulo `φ` need the extra
    /// digits to give `F(γ)` modulo `p^(N_b)`.
    pub wide: Qqn,
}

impl SpecializationContext {
    /// The Teichmüller point `γ = y`.
    pub fn gamma(&self) -> QqnElem {
        self.qqn.gen()
    }

    pub fn phi(&self) -> Vec<QqElem> {
        self.qqn.modulus()
    }
}

/// Shift budget for specialisation: the norm product multiplies `a n`
/// matrices whose entries may each carry the Frobenius shift bound, and the
/// characteristic polynomial raises the result to powers up to `2g`.
pub fn specialization_budget(cache: &DeformationCache) -> u32 {
    let pr = &cache.profile;
    let s = frobenius_shift_bound(pr.p, pr.g);
    let an = (pr.a * pr.n) as u32;
    2 * pr.g as u32 * an * s + 4 * pr.g as u32 + 16
}

/// Builds `Q_{q^n}` around the Teichmüller lift of `γ̄ ∈ field`.
///
/// A `γ̄` generating a proper subfield is specialised over that subfield:
/// `n` becomes the degree of its minimal polynomial.
pub fn build_specialization(
    cache: &DeformationCache,
    field: &Fqn,
    gamma_bar: &[Vec<u64>],
) -> Result<SpecializationContext> {
    let family = &cache.family;
    let fq = family.fq();
    if field.base().modulus() != fq.modulus() {
        return Err(Error::InvalidInput(
            "parameter field is not an extension of the family's F_q".into(),
        ));
    }
    if gamma_bar.len() != field.degree() {
        return Err(Error::InvalidInput(format!(
            "parameter has {} coordinates, field degree is {}",
            gamma_bar.len(),
            field.degree()
        )));
    }
    let gamma_bar = gamma_bar.to_vec();

    let qq = &cache.qq;
    let rbar: Vec<Vec<Vec<u64>>> = cache
        .r
        .coeffs(qq)
        .iter()
        .map(|c| qq.reduce_fq(c).map(|c| field.from_base(&c)))
        .collect::<Result<_>>()?;
    if field.is_zero(&poly_eval(field, &rbar, &gamma_bar)) {
        return Err(Error::BadParameter);
    }

    let phi_bar = min_poly_over_base(field, &gamma_bar);
    let n = phi_bar.len() - 1;
    if n > cache.profile.n {
        return Err(Error::CacheTooSmall {
            needed: n,
            available: cache.profile.n,
        });
    }
    let fbar = min_poly_over_prime(field, &gamma_bar);
    let budget = specialization_budget(cache);
    let qs = qq.with_budget(budget)?;
    let qw = qq.with_prec_budget(r_precision(&cache.profile), budget)?;
    let f = teichmuller_modulus(family.p(), &fbar, qw.prec())?;
    let f_qq: Vec<QqElem> = f.iter().map(|c| qw.from_int(c.clone())).collect();
    let phi = if fbar.len() == phi_bar.len() {
        f_qq
    } else {
        let fbar_q: Vec<Vec<u64>> = fbar.iter().map(|&c| fq.from_prime(c)).collect();
        let hbar = cofactor(&fq, &fbar_q, &phi_bar)?;
        hensel_split(&qw, &f_qq, &phi_bar, &hbar)?.0
    };
    let phi_s: Vec<QqElem> = phi.iter().map(|c| qw.to_context(c, &qs)).collect();
    let qqn = Qqn::new(qs, &phi_s)?;
    let wide = Qqn::new(qw, &phi)?;
    let ctx = SpecializationContext {
        gamma_bar,
        n,
        phi_bar,
        f,
        qqn,
        wide,
    };
    if !teichmuller_certificate(&ctx)? {
        return Err(Error::Invariant("y^(q^n) != y for the specialisation modulus".into()));
    }
    Ok(ctx)
}

/// `y^(p^(an)) = y` modulo `p^(N_b)`.
pub fn teichmuller_certificate(ctx: &SpecializationContext) -> Result<bool> {
    let qqn = &ctx.qqn;
    let y = qqn.gen();
    let mut u = y.clone();
    for _ in 0..qqn.qq().a() * ctx.n {
        u = qqn.pow(&u, qqn.qq().p())?;
    }
    Ok(qqn.eq_mod(&u, &y, qqn.prec()))
}

/// `F(γ) = r(γ)^(-M) (r^M F)(γ)`, optionally moved to the basis
/// `X^i dX/√Q³`.
pub fn specialize_frobenius(cache: &DeformationCache, ctx: &SpecializationContext, variant: bool) -> Result<QqnMatrix> {
    let qqn = &ctx.qqn;
    let wide = &ctx.wide;
    let qq = &cache.qq;
    let dim = cache.rmf.dim();
    let ry = cache.r.to_context(wide.qq()).reduce_mod_phi(wide)?;
    let scale = wide.inv(&wide.pow(&ry, cache.profile.m)?)?;
    let entries: Vec<QqnElem> = (0..dim * dim)
        .into_par_iter()
        .map(|k| {
            let e = cache.rmf.entry(qq, k / dim, k % dim).to_context(wide.qq());
            let x = wide.mul(&e.reduce_mod_phi(wide)?, &scale)?;
            Ok(qqn.make(x.coeffs().to_vec(), x.shift()))
        })
        .collect::<Result<_>>()?;
    let mut f: QqnMatrix = entries.chunks(dim).map(|r| r.to_vec()).collect();

    let bound = frobenius_shift_bound(cache.profile.p, cache.profile.g) as i64;
    for x in f.iter().flatten() {
        if let Some(v) = qqn.valuation(x) {
            if v < -bound {
                return Err(Error::BudgetExceeded {
                    what: "F(γ) entry",
                    shift: (-v) as u32,
                    budget: bound as u32,
                });
            }
        }
    }

    if variant {
        let rt = cache
            .rt
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("cache was built without the variant basis".into()))?;
        let t: QqnMatrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| rt.entry(qq, i, j).to_context(qqn.qq()).reduce_mod_phi(qqn))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let ts = mat_frobenius(qqn, &t, 1)?;
        f = mat_mul(qqn, &mat_mul(qqn, &ts, &f)?, &mat_inverse(qqn, &t)?)?;
    }
    Ok(f)
}

pub fn mat_mul(qqn: &Qqn, a: &QqnMatrix, b: &QqnMatrix) -> Result<QqnMatrix> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = qqn.zero();
                    for (k, bk) in b.iter().enumerate() {
                        acc = qqn.add(&acc, &qqn.mul(&a[i][k], &bk[j])?);
                    }
                    Ok(acc)
                })
                .collect()
        })
        .collect()
}

/// `σ^k` applied entrywise.
pub fn mat_frobenius(qqn: &Qqn, a: &QqnMatrix, k: u64) -> Result<QqnMatrix> {
    let img = qqn.frobenius_image_y(k)?;
    Ok(a.par_iter()
        .map(|row| {
            row.iter()
                .map(|x| qqn.frobenius_with(x, k, &img, crate::arith::qqn::ComposeMethod::Horner))
                .collect()
        })
        .collect())
}

/// Gauss–Jordan elimination with pivots of least valuation.
pub fn mat_inverse(qqn: &Qqn, a: &QqnMatrix) -> Result<QqnMatrix> {
    let n = a.len();
    let mut m: Vec<Vec<QqnElem>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { qqn.one() } else { qqn.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter_map(|r| qqn.valuation(&m[r][col]).map(|v| (v, r)))
            .min()
            .ok_or_else(|| Error::NotInvertible("singular matrix over Q_{q^n}".into()))?
            .1;
        m.swap(col, piv);
        let inv = qqn.inv(&m[col][col])?;
        for x in m[col].iter_mut() {
            *x = qqn.mul(x, &inv)?;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in 0..2 * n {
                let t = qqn.mul(&factor, &m[col][c])?;
                m[r][c] = qqn.sub(&m[r][c], &t);
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}
