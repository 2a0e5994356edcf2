use super::precision::PrecisionProfile;
use crate::arith::int::val_u64;
use crate::arith::qq::Qq;
use crate::error::{Error, Result};
use crate::series::{SeriesMatrix, TruncSeries};
use rug::Integer;

/// Solves `r Ċ = −C H`, `C(0) = I`, modulo `Γ^n_gamma`.
///
/// Every coefficient `C_k` is kept with the common shift `scale`; the
/// recurrence divides by `k r_0` and fails when the result would need a
/// larger shift.
pub fn solve_connection_ode(
    qq: &Qq,
    h: &SeriesMatrix,
    r: &TruncSeries,
    n_gamma: usize,
    scale: u32,
) -> Result<SeriesMatrix> {
    let d = h.dim();
    let a = qq.a();
    let p = qq.p();
    if r.shift() != 0 {
        return Err(Error::Invariant("r must be integral".into()));
    }
    let sh = h.shift();
    let hdeg = (0..h.trunc())
        .rev()
        .find(|&k| (0..d * d).any(|e| h.raw_entry(e / d, e % d)[k * a..(k + 1) * a].iter().any(|x| !x.is_zero())));
    let rdeg = r.degree().unwrap_or(0);
    let hc: Vec<Vec<&[Integer]>> = match hdeg {
        Some(hd) => (0..=hd)
            .map(|i| (0..d * d).map(|e| &h.raw_entry(e / d, e % d)[i * a..(i + 1) * a]).collect())
            .collect(),
        None => Vec::new(),
    };
    let rc: Vec<&[Integer]> = (0..=rdeg).map(|i| &r.raw()[i * a..(i + 1) * a]).collect();
    let w_acc = qq.prec() + scale + sh;
    let m_acc = qq.pow_p(w_acc);
    let r0inv = qq.rinv_unit(rc[0], w_acc)?;
    let psh = qq.pow_p(sh);

    let mut c: Vec<Vec<Vec<Integer>>> = Vec::with_capacity(n_gamma);
    let mut c0 = vec![vec![Integer::new(); a]; d * d];
    for i in 0..d {
        c0[i * d + i][0] = qq.pow_p(scale);
    }
    c.push(c0);
    for k in 1..n_gamma {
        let v = val_u64(p, k as u64);
        let u = Integer::from(k as u64 / p.pow(v));
        let uinv = u.invert(&m_acc).map_err(|_| Error::NotInvertible("k / p^v".into()))?;
        let mut inv = r0inv.iter().map(|x| Integer::from(x * &uinv)).collect::<Vec<_>>();
        qq.rmod(&mut inv, w_acc);
        let div = qq.pow_p(sh + v);
        let mut ck = Vec::with_capacity(d * d);
        for x in 0..d {
            for y in 0..d {
                let mut acc = vec![Integer::new(); 2 * a - 1];
                for (i, hi) in hc.iter().enumerate().take(k) {
                    let prev = &c[k - 1 - i];
                    for z in 0..d {
                        qq.mul_acc(&mut acc, &prev[x * d + z], hi[z * d + y]);
                    }
                }
                for (i, ri) in rc.iter().enumerate().take(k).skip(1) {
                    let scaled: Vec<Integer> = ri.iter().map(|t| Integer::from(t * &psh) * (k - i) as u64).collect();
                    qq.mul_acc(&mut acc, &c[k - i][x * d + y], &scaled);
                }
                qq.reduce_chi(&mut acc);
                qq.rmod(&mut acc, w_acc);
                let mut val = qq.rmul(&acc, &inv, w_acc);
                for t in val.iter_mut() {
                    if !t.is_divisible(&div) {
                        return Err(Error::BudgetExceeded {
                            what: "local solution C",
                            shift: scale + 1,
                            budget: scale,
                        });
                    }
                    t.div_exact_mut(&div);
                    *t = Integer::from(-&*t);
                }
                qq.rmod(&mut val, qq.prec() + scale);
                ck.push(val);
            }
        }
        c.push(ck);
    }
    let e: Vec<Vec<Integer>> = (0..d * d)
        .map(|idx| c.iter().flat_map(|ck| ck[idx].iter().cloned()).collect())
        .collect();
    Ok(SeriesMatrix::make(qq, d, n_gamma, e, scale))
}

/// Largest excess of a coefficient shift over `bound(k)`; `None` when the
/// bound holds everywhere.
pub fn worst_violation(qq: &Qq, m: &SeriesMatrix, bound: impl Fn(usize) -> u32) -> Option<(usize, i64)> {
    (0..m.trunc())
        .filter_map(|k| m.coeff_valuation(qq, k).map(|v| (k, -v - bound(k) as i64)))
        .filter(|&(_, ex)| ex > 0)
        .max_by_key(|&(_, ex)| ex)
}

/// `ord C_k >= −η ⌈log_p(k+1)⌉` for every `k`.
pub fn check_c_valuation(qq: &Qq, profile: &PrecisionProfile, c: &SeriesMatrix) -> Result<()> {
    match worst_violation(qq, c, |k| profile.c_bound(k)) {
        None => Ok(()),
        Some((k, ex)) => Err(Error::Invariant(format!(
            "C_{k} exceeds its valuation bound by {ex}"
        ))),
    }
}

/// `ord D_k >= −η ⌈log_p(k/p + 1)⌉` for `D = (C^σ(Γ^p))^(-1)`.
pub fn check_d_valuation(qq: &Qq, profile: &PrecisionProfile, dm: &SeriesMatrix) -> Result<()> {
    match worst_violation(qq, dm, |k| profile.d_bound(k)) {
        None => Ok(()),
        Some((k, ex)) => Err(Error::Invariant(format!(
            "D_{k} exceeds its valuation bound by {ex}"
        ))),
    }
}

/// Smallest valuation among the coefficients `k < upto` of `m`.
pub fn min_valuation_below(qq: &Qq, m: &SeriesMatrix, upto: usize) -> Option<i64> {
    (0..upto.min(m.trunc())).filter_map(|k| m.coeff_valuation(qq, k)).min()
}

/// `r Ċ + C H`, whose coefficients below `N_Γ − 1` should vanish.
pub fn c_residual(qq: &Qq, c: &SeriesMatrix, h: &SeriesMatrix, r: &TruncSeries) -> Result<SeriesMatrix> {
    let t = c.trunc();
    let rc = c.derivative(qq).mul_series(qq, &r.with_trunc(qq, t))?;
    let ch = c.mul(qq, &h.with_trunc(qq, t))?;
    rc.add(qq, &ch)
}

/// `r r^σ(Γ^p) Ḟ + r^σ(Γ^p) F H − p Γ^(p−1) r H^σ(Γ^p) F`, i.e. the
/// Frobenius equation `Ḟ + F G = p Γ^(p−1) G^σ(Γ^p) F` with denominators
/// cleared.
pub fn f_residual(qq: &Qq, f: &SeriesMatrix, h: &SeriesMatrix, r: &TruncSeries) -> Result<SeriesMatrix> {
    let t = f.trunc();
    let p = qq.p() as usize;
    let r_t = r.with_trunc(qq, t);
    let rs = r_t.substitute_sigma_gamma_p(qq);
    let h_t = h.with_trunc(qq, t);
    let hs = h_t.substitute_sigma_gamma_p(qq);
    let lhs1 = f.derivative(qq).mul_series(qq, &r_t.mul(qq, &rs)?)?;
    let lhs2 = f.mul(qq, &h_t)?.mul_series(qq, &rs)?;
    let mut pg = vec![qq.zero(); p];
    pg[p - 1] = qq.from_int(qq.p());
    let pgamma = TruncSeries::from_coeffs(qq, &pg, t);
    let rhs = hs.mul(qq, f)?.mul_series(qq, &r_t.mul(qq, &pgamma)?)?;
    lhs1.add(qq, &lhs2)?.sub(qq, &rhs)
}
