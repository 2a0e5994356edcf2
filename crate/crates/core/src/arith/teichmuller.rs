//! Teichmüller moduli over `Z_p` and Hensel factorisation over `Z_q`.

use super::ff::{is_irreducible, poly_divrem, poly_mul, poly_trim, poly_xgcd, FiniteField, Fp};
use super::int;
use super::padic::{PadicScaled, PrimeModulus};
use super::qq::{Qq, QqElem};
use crate::error::{Error, Result};
use rug::Integer;

/// The monic lift `f ∈ Z_p[Z]` of an irreducible `f̄` whose roots are
/// Teichmüller: `Z^(p^m) ≡ Z mod (f, p^prec)` with `m = deg f̄`.
///
/// Coefficients are returned in `[0, p^prec)`, constant term first.
pub fn teichmuller_modulus(p: u64, fbar: &[u64], prec: u32) -> Result<Vec<Integer>> {
    let fp = Fp::new(p)?;
    let fbar = poly_trim(&fp, fbar.iter().map(|c| c % p).collect());
    if fbar.last() != Some(&1) {
        return Err(Error::InvalidInput("Teichmüller modulus needs a monic polynomial".into()));
    }
    if !is_irreducible(&fp, &fbar) {
        return Err(Error::Reducible(format!("{fbar:?}")));
    }
    let m = fbar.len() - 1;
    // Newton's identities divide by 1..m; carry the extra digits they eat.
    let extra: u32 = (1..=m as u64).map(|k| int::val_u64(p, k)).sum();
    let w = prec + extra + 1;
    let ring = Qq::new(p, &fbar, w, 0)?;

    // The Teichmüller lift of the class of z: fixed point of t ↦ t^(p^m),
    // which gains m digits per round.
    let mut t = if m == 1 {
        ring.from_fq(&[(p - fbar[0]) % p])
    } else {
        let mut g = vec![0u64; m];
        g[1] = 1;
        ring.from_fq(&g)
    };
    let rounds = (w as usize).div_ceil(m) + 2;
    let mut conj = Vec::with_capacity(m);
    for _ in 0..rounds {
        let mut u = t.clone();
        conj.clear();
        for _ in 0..m {
            conj.push(u.clone());
            u = ring.pow(&u, p)?;
        }
        if u == t {
            break;
        }
        t = u;
    }
    if conj.len() != m {
        return Err(Error::Invariant("Teichmüller iteration".into()));
    }

    // Power sums of the conjugates t^(p^i) are traces of t^k.
    let traces = basis_traces(&ring, m)?;
    let pm = PrimeModulus::new(p, w, extra + 1)?;
    let mut s = Vec::with_capacity(m + 1);
    s.push(PadicScaled::from_int(&pm, m as u64));
    let mut tk = ring.one();
    for _ in 1..=m {
        tk = ring.mul(&tk, &t)?;
        let mut acc = Integer::new();
        for (c, tr) in tk.coeffs().iter().zip(&traces) {
            acc += c * tr;
        }
        s.push(PadicScaled::from_int(&pm, acc));
    }
    // k e_k = Σ_{i=1}^k (-1)^(i-1) e_{k-i} s_i
    let mut e = vec![PadicScaled::from_int(&pm, 1)];
    for k in 1..=m {
        let mut acc = PadicScaled::zero();
        for i in 1..=k {
            let term = e[k - i].mul(&s[i], &pm)?;
            acc = if i % 2 == 1 {
                acc.add(&term, &pm)
            } else {
                acc.sub(&term, &pm)
            };
        }
        e.push(acc.div_int(k as i64, &pm)?);
    }
    let modulus = Integer::from(p).pow(prec);
    let mut f = vec![Integer::new(); m + 1];
    for (k, ek) in e.iter().enumerate() {
        let v = ek
            .to_integer()
            .ok_or_else(|| Error::PrecisionExhausted("Teichmüller modulus coefficient".into()))?;
        let v = if k % 2 == 1 { -v } else { v };
        f[m - k] = v.modulo(&modulus);
    }
    Ok(f)
}

use rug::ops::Pow;

/// `Tr(z^j)` for `j < m` in `Z_p[z]/(χ)`, from Newton's identities on `χ`.
fn basis_traces(ring: &Qq, m: usize) -> Result<Vec<Integer>> {
    let chi = ring.chi();
    let mut s: Vec<Integer> = vec![Integer::from(m)];
    for k in 1..m {
        let mut acc = Integer::from(-(k as i64)) * &chi[m - k];
        for i in 1..k {
            acc -= Integer::from(&chi[m - i] * &s[k - i]);
        }
        s.push(acc);
    }
    Ok(s)
}

/// Checks `Z^(p^m) ≡ Z mod (f, p^prec)` and that `f̄` is irreducible.
pub fn verify_teichmuller(p: u64, f: &[Integer], prec: u32) -> Result<bool> {
    let m = f.len() - 1;
    let ring = match Qq::new_lifted(p, f, prec, 0) {
        Ok(r) => r,
        Err(Error::Reducible(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let z = if m == 1 {
        ring.make(vec![Integer::from(-&f[0])], 0)
    } else {
        let mut c = vec![Integer::new(); m];
        c[1] = Integer::from(1);
        ring.make(c, 0)
    };
    let mut u = z.clone();
    for _ in 0..m {
        u = ring.pow(&u, p)?;
    }
    Ok(u == z)
}

use super::rawpoly::{self as rp, RawPoly};

fn lift_fq_poly(q: &Qq, a: &[Vec<u64>]) -> RawPoly {
    a.iter().map(|c| q.from_fq(c).coeffs().to_vec()).collect()
}

/// Lifts `f̄ = ḡ h̄` (coprime, monic) to `f ≡ g h mod p^prec` over `Z_q`.
pub fn hensel_split(
    q: &Qq,
    f: &[QqElem],
    gbar: &[Vec<u64>],
    hbar: &[Vec<u64>],
) -> Result<(Vec<QqElem>, Vec<QqElem>)> {
    let fq = q.fq();
    let w = q.prec();
    if f.iter().any(|c| c.shift() > 0) {
        return Err(Error::InvalidInput("Hensel lifting needs an integral polynomial".into()));
    }
    let fbar: Vec<Vec<u64>> = f.iter().map(|c| q.reduce_fq(c)).collect::<Result<_>>()?;
    let prod = poly_mul(fq, gbar, hbar);
    if poly_trim(fq, fbar.clone()) != prod {
        return Err(Error::InvalidInput("factors do not multiply to f mod p".into()));
    }
    if gbar.last() != Some(&fq.one()) || hbar.last() != Some(&fq.one()) {
        return Err(Error::InvalidInput("Hensel factors must be monic".into()));
    }
    let (d, s, t) = poly_xgcd(fq, gbar, hbar);
    if d.len() != 1 {
        return Err(Error::InvalidInput("Hensel factors are not coprime mod p".into()));
    }
    let dinv = fq.inv(&d[0]).unwrap();
    let s: Vec<Vec<u64>> = s.iter().map(|c| fq.mul(c, &dinv)).collect();
    let t: Vec<Vec<u64>> = t.iter().map(|c| fq.mul(c, &dinv)).collect();

    let fr: RawPoly = f.iter().map(|c| c.coeffs().to_vec()).collect();
    let (mut g, mut h) = (lift_fq_poly(q, gbar), lift_fq_poly(q, hbar));
    let (mut s, mut t) = (lift_fq_poly(q, &s), lift_fq_poly(q, &t));
    let one = rp::one(q);
    let mut k = 1u32;
    while k < w {
        k = (2 * k).min(w);
        let e = rp::add(q, &fr, &rp::mul(q, &g, &h, k), k, -1);
        let (qq_, r) = rp::divrem_monic(q, &rp::mul(q, &s, &e, k), &h, k);
        let g2 = rp::add(
            q,
            &rp::add(q, &g, &rp::mul(q, &t, &e, k), k, 1),
            &rp::mul(q, &qq_, &g, k),
            k,
            1,
        );
        let h2 = rp::add(q, &h, &r, k, 1);
        let b = rp::add(
            q,
            &rp::add(q, &rp::mul(q, &s, &g2, k), &rp::mul(q, &t, &h2, k), k, 1),
            &one,
            k,
            -1,
        );
        let (c, dd) = rp::divrem_monic(q, &rp::mul(q, &s, &b, k), &h2, k);
        s = rp::add(q, &s, &dd, k, -1);
        t = rp::add(
            q,
            &rp::add(q, &t, &rp::mul(q, &t, &b, k), k, -1),
            &rp::mul(q, &c, &g2, k),
            k,
            -1,
        );
        g = g2;
        h = h2;
    }
    let check = rp::add(q, &fr, &rp::mul(q, &g, &h, w), w, -1);
    if !check.is_empty() {
        return Err(Error::Invariant("Hensel factors do not multiply back".into()));
    }
    let to_el = |v: RawPoly, deg: usize| -> Vec<QqElem> {
        let mut out: Vec<QqElem> = v.into_iter().map(|c| q.make(c, 0)).collect();
        out.resize(deg + 1, q.zero());
        out
    };
    Ok((to_el(g, gbar.len() - 1), to_el(h, hbar.len() - 1)))
}

/// Division with remainder of `fbar` by a monic divisor over `F_q`.
pub fn cofactor(fq: &super::ff::Fq, f: &[Vec<u64>], g: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let (quo, rem) = poly_divrem(fq, f, g);
    if !rem.is_empty() {
        return Err(Error::Invariant("factor does not divide".into()));
    }
    Ok(quo)
}
