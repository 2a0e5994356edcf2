//! From the norm matrix to the integer L-polynomial and point counts.

use super::specialize::{mat_mul, QqnMatrix};
use crate::arith::int::{centered, min_val_capped, reduce};
use crate::arith::padic::{PadicScaled, PrimeModulus};
use crate::arith::qqn::Qqn;
use crate::deformation::weil_bound;
use crate::error::{Error, Result};
use rug::ops::Pow;
use rug::Integer;

/// `Tr(𝓕^k)` for `k = 1..=kmax`, as elements of `Z_p`.
///
/// The traces lie in `Z_p`; the coordinates off the constant term are
/// checked to vanish modulo `p^need`.
pub fn power_traces(qqn: &Qqn, norm: &QqnMatrix, kmax: usize, need: u32) -> Result<Vec<PadicScaled>> {
    let pm = qqn.qq().pm();
    let p = qqn.qq().p();
    let mut pw = norm.clone();
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        if k > 1 {
            pw = mat_mul(qqn, &pw, norm)?;
        }
        let mut t = qqn.zero();
        for (i, row) in pw.iter().enumerate() {
            t = qqn.add(&t, &row[i]);
        }
        let s = t.shift();
        let rest = min_val_capped(p, &t.coeffs()[1..], s + need);
        if rest < s + need {
            return Err(Error::Invariant(format!(
                "Tr(F^{k}) is not in Z_p modulo p^{need}"
            )));
        }
        out.push(PadicScaled::from_parts(pm, t.coeffs()[0].clone(), s));
    }
    Ok(out)
}

/// Coefficients `a_0..a_{2g}` of `det(I − 𝓕 t)` from the power sums of the
/// eigenvalues.
///
/// `a_0..a_g` are lifted from `Z/p^(n0)` to the symmetric range, where
/// `|a_i| ≤ 2^(2g) p^(eg/2)` (field size `p^e`) makes the lift unique; that
/// bound is enforced. The upper half follows from `a_{2g−i} = p^(e(g−i)) a_i`
/// and must agree with the computed residues modulo `p^(n0)`.
pub fn lpolynomial(pm: &PrimeModulus, traces: &[PadicScaled], g: usize, n0: u32, field_exp: usize) -> Result<Vec<Integer>> {
    let d = 2 * g;
    if traces.len() < d {
        return Err(Error::Dimension(format!("need {d} traces, got {}", traces.len())));
    }
    let p = pm.p();
    // e_k = (1/k) Σ_{i=1}^k (−1)^(i−1) e_{k−i} P_i
    let mut e = vec![PadicScaled::from_int(pm, 1)];
    for k in 1..=d {
        let mut acc = PadicScaled::zero();
        for i in 1..=k {
            let t = e[k - i].mul(&traces[i - 1], pm)?;
            acc = if i % 2 == 1 { acc.add(&t, pm) } else { acc.sub(&t, pm) };
        }
        e.push(acc.div_int(k as i64, pm)?);
    }
    let modulus = Integer::from(p).pow(n0);
    let residues: Vec<Integer> = e
        .iter()
        .enumerate()
        .map(|(k, ek)| {
            let ak = if k % 2 == 1 { ek.neg(pm) } else { ek.clone() };
            let scale = Integer::from(p).pow(ak.shift());
            let mut m = ak.mantissa().clone();
            reduce(&mut m, &Integer::from(&modulus * &scale));
            if !m.is_divisible(&scale) {
                return Err(Error::Invariant(format!("a_{k} is not integral modulo p^{n0}")));
            }
            Ok(m / scale)
        })
        .collect::<Result<_>>()?;

    let bound = weil_bound(p, field_exp, g);
    let field_size = Integer::from(p).pow(field_exp as u32);
    let mut out: Vec<Integer> = Vec::with_capacity(d + 1);
    for (k, r) in residues.iter().enumerate().take(g + 1) {
        let v = centered(r, &modulus);
        if v.clone().abs() > bound {
            return Err(Error::Invariant(format!(
                "a_{k} = {v} exceeds the Weil bound {bound}: precision or logic error"
            )));
        }
        out.push(v);
    }
    for k in g + 1..=d {
        let v = Integer::from((&field_size).pow((k - g) as u32)) * &out[d - k];
        let mut diff = Integer::from(&v - &residues[k]);
        reduce(&mut diff, &modulus);
        if !diff.is_zero() {
            return Err(Error::Invariant(format!(
                "a_{k} disagrees with the functional equation modulo p^{n0}"
            )));
        }
        out.push(v);
    }
    if out[0] != 1 {
        return Err(Error::Invariant(format!("a_0 = {} != 1", out[0])));
    }
    Ok(out)
}

/// `|a_i| ≤ binom(2g, i) Q^(i/2)` for every `i`, checked on squares.
pub fn sharp_weil_holds(coeffs: &[Integer], field_size: &Integer) -> bool {
    let d = coeffs.len() - 1;
    coeffs.iter().enumerate().all(|(i, a)| {
        let b = Integer::from(Integer::binomial_u(d as u32, i as u32));
        Integer::from(a.square_ref()) <= b.square() * Integer::from(field_size.pow(i as u32))
    })
}

/// `a_{2g−i} = (p^e)^(g−i) a_i` for `i = 0..g`.
pub fn functional_equation_holds(coeffs: &[Integer], field_size: &Integer) -> bool {
    let d = coeffs.len() - 1;
    let g = d / 2;
    (0..=g).all(|i| coeffs[d - i] == Integer::from(field_size.pow((g - i) as u32)) * &coeffs[i])
}

/// Power sums `s_1..s_kmax` of the reciprocal roots of `P(t) = Σ a_i t^i`.
pub fn reciprocal_root_power_sums(coeffs: &[Integer], kmax: usize) -> Vec<Integer> {
    let d = coeffs.len() - 1;
    // e_i = (−1)^i a_i; s_k = Σ_{i=1}^{k−1} (−1)^(i−1) e_i s_{k−i} + (−1)^(k−1) k e_k
    let e = |i: usize| -> Integer {
        if i > d {
            Integer::new()
        } else if i % 2 == 1 {
            Integer::from(-&coeffs[i])
        } else {
            coeffs[i].clone()
        }
    };
    let mut s: Vec<Integer> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut acc = Integer::new();
        for i in 1..k {
            let t = e(i) * &s[k - i - 1];
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        let t = e(k) * k as u64;
        if k % 2 == 1 {
            acc += t;
        } else {
            acc -= t;
        }
        s.push(acc);
    }
    s
}

/// `#X(F_{Q^k}) = Q^k + 1 − s_k` for `k = 1..=kmax`, where `Q` is the
/// field size.
pub fn counts_from_lpolynomial(coeffs: &[Integer], field_size: &Integer, kmax: usize) -> Vec<Integer> {
    reciprocal_root_power_sums(coeffs, kmax)
        .into_iter()
        .enumerate()
        .map(|(i, s)| Integer::from(field_size.pow(i as u32 + 1)) + 1u32 - s)
        .collect()
}

/// `|#X(F_{Q^k}) − (Q^k + 1)| ≤ 2g Q^(k/2)`, checked on squares.
pub fn hasse_weil_holds(counts: &[Integer], field_size: &Integer, g: usize) -> bool {
    counts.iter().enumerate().all(|(i, c)| {
        let qk = Integer::from(field_size.pow(i as u32 + 1));
        let dev = Integer::from(c - &qk) - 1u32;
        let lhs = dev.square();
        let rhs = Integer::from(4 * g * g) * qk;
        lhs <= rhs
    })
}
