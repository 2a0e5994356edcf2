//! The unramified extension `Q_q = Q_p[x]/(χ)` of degree `a`, where `χ` is
//! the centred lift of the monic irreducible `χ̄ ∈ F_p[x]`.

use super::ff::{FiniteField, Fp, Fq};
use super::int::{self, reduce};
use super::padic::{PadicScaled, PrimeModulus};
use crate::error::{Error, Result};
use rug::ops::Pow;
use rug::Integer;
use std::sync::{Arc, OnceLock};

/// Context for `Q_q` at a fixed absolute precision and shift budget.
#[derive(Clone, Debug)]
pub struct Qq {
    pm: PrimeModulus,
    a: usize,
    chi: Vec<Integer>,
    chibar: Vec<u64>,
    fq: Fq,
    /// `σ^k(x)` for `k < a`, mantissas modulo `p^(N + budget)`; built on
    /// first use.
    frob_x: Arc<OnceLock<Vec<Vec<Integer>>>>,
}

/// An element `p^(-shift) · Σ c_i x^i` with every `c_i ∈ [0, p^(N+shift))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QqElem {
    pub(crate) c: Vec<Integer>,
    pub(crate) shift: u32,
}

impl QqElem {
    pub fn coeffs(&self) -> &[Integer] {
        &self.c
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    pub fn from_raw(c: Vec<Integer>, shift: u32) -> Self {
        QqElem { c, shift }
    }
}

impl Qq {
    /// `chibar` lists the coefficients of `χ̄` from the constant term up.
    pub fn new(p: u64, chibar: &[u64], prec: u32, shift_budget: u32) -> Result<Self> {
        let chi: Vec<Integer> = chibar
            .iter()
            .map(|&c| Integer::from(int::centered_u64(c, p)))
            .collect();
        Self::new_lifted(p, &chi, prec, shift_budget)
    }

    /// Uses the given monic integer lift `χ` of an irreducible `χ̄`.
    pub fn new_lifted(p: u64, chi: &[Integer], prec: u32, shift_budget: u32) -> Result<Self> {
        let fp = Fp::new(p)?;
        let chibar: Vec<u64> = chi.iter().map(|c| int::mod_u64(c, p)).collect();
        if chi.last() != Some(&Integer::from(1)) {
            return Err(Error::InvalidInput("defining polynomial must be monic".into()));
        }
        let fq = Fq::new(fp, chibar.clone())?;
        let a = fq.degree();
        let pm = PrimeModulus::new(p, prec, shift_budget)?;
        Ok(Qq {
            pm,
            a,
            chi: chi.to_vec(),
            chibar,
            fq,
            frob_x: Arc::new(OnceLock::new()),
        })
    }

    /// The same field at another precision.
    pub fn with_prec(&self, prec: u32) -> Result<Self> {
        Qq::new_lifted(self.p(), &self.chi, prec, self.pm.budget())
    }

    /// The same field with another shift budget.
    pub fn with_budget(&self, shift_budget: u32) -> Result<Self> {
        Qq::new_lifted(self.p(), &self.chi, self.prec(), shift_budget)
    }

    /// Same field, precision and budget both replaced.
    pub fn with_prec_budget(&self, prec: u32, shift_budget: u32) -> Result<Self> {
        Qq::new_lifted(self.p(), &self.chi, prec, shift_budget)
    }

    fn frob_table(&self) -> &[Vec<Integer>] {
        self.frob_x.get_or_init(|| {
            (0..self.a)
                .map(|k| self.compute_frob_x(k).expect("Frobenius of x lifts"))
                .collect()
        })
    }

    pub fn p(&self) -> u64 {
        self.pm.p()
    }
    pub fn a(&self) -> usize {
        self.a
    }
    pub fn prec(&self) -> u32 {
        self.pm.prec()
    }
    pub fn budget(&self) -> u32 {
        self.pm.budget()
    }
    pub fn pm(&self) -> &PrimeModulus {
        &self.pm
    }
    pub fn fq(&self) -> &Fq {
        &self.fq
    }
    pub fn chibar(&self) -> &[u64] {
        &self.chibar
    }
    pub fn chi(&self) -> &[Integer] {
        &self.chi
    }
    pub fn pow_p(&self, k: u32) -> Integer {
        self.pm.pow(k)
    }

    // ----- raw integral arithmetic on coefficient vectors -----

    /// Reduces a product of length up to `2a - 1` modulo `χ`; no `p`-reduction.
    pub fn reduce_chi(&self, v: &mut Vec<Integer>) {
        let a = self.a;
        for t in (a..v.len()).rev() {
            if v[t].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[t]);
            for j in 0..a {
                if !self.chi[j].is_zero() {
                    v[t - a + j] -= &c * &self.chi[j];
                }
            }
        }
        v.truncate(a);
        v.resize(a, Integer::new());
    }

    /// Unreduced product of coefficient vectors (length `2a - 1`).
    pub fn mul_wide(&self, x: &[Integer], y: &[Integer]) -> Vec<Integer> {
        let a = self.a;
        let mut out = vec![Integer::new(); 2 * a - 1];
        for (i, u) in x.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (j, v) in y.iter().enumerate() {
                out[i + j] += u * v;
            }
        }
        out
    }

    /// Adds `x·y` into a wide accumulator of length `2a - 1`.
    pub fn mul_acc(&self, acc: &mut [Integer], x: &[Integer], y: &[Integer]) {
        for (i, u) in x.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (j, v) in y.iter().enumerate() {
                acc[i + j] += u * v;
            }
        }
    }

    /// Product modulo `(χ, p^w)`.
    pub fn rmul(&self, x: &[Integer], y: &[Integer], w: u32) -> Vec<Integer> {
        let mut v = self.mul_wide(x, y);
        self.reduce_chi(&mut v);
        self.rmod(&mut v, w);
        v
    }

    /// Reduces every coefficient into `[0, p^w)`.
    pub fn rmod(&self, v: &mut [Integer], w: u32) {
        let m = self.pm.pow_ref(w);
        for x in v.iter_mut() {
            reduce(x, &m);
        }
    }

    /// Inverse of a unit modulo `p^w`, by Newton iteration from the residue.
    pub fn rinv_unit(&self, x: &[Integer], w: u32) -> Result<Vec<Integer>> {
        let p = self.p();
        let xbar: Vec<u64> = x.iter().map(|c| int::mod_u64(c, p)).collect();
        let ibar = self
            .fq
            .inv(&xbar)
            .ok_or_else(|| Error::NotInvertible("element of Q_q is not a unit".into()))?;
        let mut y: Vec<Integer> = ibar.iter().map(|&c| Integer::from(c)).collect();
        let mut prec = 1u32;
        while prec < w {
            prec = (2 * prec).min(w);
            // y <- y (2 - x y)
            let xy = self.rmul(x, &y, prec);
            let mut t: Vec<Integer> = xy.into_iter().map(|c| -c).collect();
            t[0] += 2;
            y = self.rmul(&y, &t, prec);
        }
        self.rmod(&mut y, w);
        Ok(y)
    }

    /// `u(z)` for integral `u` and a raw element `z`, modulo `p^w`.
    pub fn rcompose(&self, u: &[Integer], z: &[Integer], w: u32) -> Vec<Integer> {
        let mut acc = vec![Integer::new(); self.a];
        for c in u.iter().rev() {
            acc = self.rmul(&acc, z, w);
            acc[0] += c;
        }
        self.rmod(&mut acc, w);
        acc
    }

    fn compute_frob_x(&self, k: usize) -> Result<Vec<Integer>> {
        let w = self.prec() + self.budget();
        let p = self.p();
        let mut gen = vec![0u64; self.a];
        if self.a > 1 {
            gen[1] = 1;
        } else {
            gen[0] = (p - self.chibar[0] % p) % p;
        }
        let img = self
            .fq
            .pow(&gen, &Integer::from(p).pow(k as u32));
        let mut z: Vec<Integer> = img.iter().map(|&c| Integer::from(c)).collect();
        // Newton on χ: z <- z - χ(z)/χ'(z).
        let chi = self.chi.clone();
        let dchi: Vec<Integer> = chi
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Integer::from(c * i as u64))
            .collect();
        let mut prec = 1u32;
        while prec < w {
            prec = (2 * prec).min(w);
            let val = self.rcompose(&chi, &z, prec);
            let der = self.rcompose(&dchi, &z, prec);
            let dinv = self.rinv_unit(&der, prec)?;
            let corr = self.rmul(&val, &dinv, prec);
            for (zi, ci) in z.iter_mut().zip(corr) {
                *zi -= ci;
            }
            self.rmod(&mut z, prec);
        }
        Ok(z)
    }

    // ----- elements -----

    pub fn zero(&self) -> QqElem {
        QqElem {
            c: vec![Integer::new(); self.a],
            shift: 0,
        }
    }

    pub fn one(&self) -> QqElem {
        self.from_int(1)
    }

    pub fn from_int(&self, k: impl Into<Integer>) -> QqElem {
        let mut c = vec![Integer::new(); self.a];
        c[0] = k.into();
        self.make(c, 0)
    }

    /// Builds a normalised element from raw mantissas and a shift.
    pub fn make(&self, mut c: Vec<Integer>, shift: u32) -> QqElem {
        debug_assert_eq!(c.len(), self.a);
        self.rmod(&mut c, self.prec() + shift);
        let mut e = QqElem { c, shift };
        self.normalize(&mut e);
        e
    }

    pub fn normalize(&self, e: &mut QqElem) {
        if e.shift == 0 {
            return;
        }
        let v = int::min_val_capped(self.p(), &e.c, e.shift);
        if v > 0 {
            let d = self.pm.pow(v);
            for x in e.c.iter_mut() {
                x.div_exact_mut(&d);
            }
            e.shift -= v;
        }
    }

    /// Centred lift of an `F_q` element.
    pub fn from_fq(&self, x: &[u64]) -> QqElem {
        let p = self.p();
        let c = x
            .iter()
            .map(|&v| Integer::from(int::centered_u64(v, p)))
            .collect();
        self.make(c, 0)
    }

    /// Residue of an integral element.
    pub fn reduce_fq(&self, x: &QqElem) -> Result<Vec<u64>> {
        if x.shift > 0 {
            return Err(Error::Invariant("residue of a non-integral element".into()));
        }
        Ok(x.c.iter().map(|c| int::mod_u64(c, self.p())).collect())
    }

    pub fn from_padic(&self, x: &PadicScaled) -> QqElem {
        let mut c = vec![Integer::new(); self.a];
        c[0] = x.mantissa().clone();
        self.make(c, x.shift())
    }

    /// `None` for zero at this precision.
    pub fn valuation(&self, x: &QqElem) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        let v = int::min_val_capped(self.p(), &x.c, u32::MAX);
        Some(v as i64 - x.shift as i64)
    }

    fn aligned(&self, x: &QqElem, s: u32) -> Vec<Integer> {
        if x.shift == s {
            return x.c.clone();
        }
        let f = self.pm.pow(s - x.shift);
        x.c.iter().map(|c| Integer::from(c * &f)).collect()
    }

    pub fn add(&self, x: &QqElem, y: &QqElem) -> QqElem {
        let s = x.shift.max(y.shift);
        let mut c = self.aligned(x, s);
        for (u, v) in c.iter_mut().zip(self.aligned(y, s)) {
            *u += v;
        }
        self.make(c, s)
    }

    pub fn sub(&self, x: &QqElem, y: &QqElem) -> QqElem {
        let s = x.shift.max(y.shift);
        let mut c = self.aligned(x, s);
        for (u, v) in c.iter_mut().zip(self.aligned(y, s)) {
            *u -= v;
        }
        self.make(c, s)
    }

    pub fn neg(&self, x: &QqElem) -> QqElem {
        self.make(x.c.iter().map(|c| Integer::from(-c)).collect(), x.shift)
    }

    pub fn mul(&self, x: &QqElem, y: &QqElem) -> Result<QqElem> {
        let s = x.shift + y.shift;
        self.pm.check_shift("Q_q product", s)?;
        let mut v = self.mul_wide(&x.c, &y.c);
        self.reduce_chi(&mut v);
        Ok(self.make(v, s))
    }

    pub fn mul_int(&self, x: &QqElem, k: impl Into<Integer>) -> QqElem {
        let k: Integer = k.into();
        self.make(x.c.iter().map(|c| Integer::from(c * &k)).collect(), x.shift)
    }

    /// Multiplication by `p^k` for `k >= 0`; shrinks the shift first.
    pub fn mul_p_pow(&self, x: &QqElem, k: u32) -> QqElem {
        if k <= x.shift {
            let mut e = QqElem {
                c: x.c.clone(),
                shift: x.shift - k,
            };
            self.rmod(&mut e.c, self.prec() + e.shift);
            self.normalize(&mut e);
            e
        } else {
            let f = self.pm.pow(k - x.shift);
            self.make(x.c.iter().map(|c| Integer::from(c * &f)).collect(), 0)
        }
    }

    /// Division by a nonzero integer; its `p`-part becomes shift.
    pub fn div_int(&self, x: &QqElem, k: i64) -> Result<QqElem> {
        if k == 0 {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        let v = int::val_u64(self.p(), k.unsigned_abs());
        let u = k / (self.p() as i64).pow(v);
        let s = x.shift + v;
        self.pm.check_shift("Q_q division", s)?;
        let inv = Integer::from(u)
            .invert(&self.pm.mant_mod(s))
            .map_err(|_| Error::NotInvertible("unit".into()))?;
        Ok(self.make(x.c.iter().map(|c| Integer::from(c * &inv)).collect(), s))
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, x: &QqElem) -> Result<QqElem> {
        let v = self
            .valuation(x)
            .ok_or_else(|| Error::NotInvertible("zero in Q_q".into()))?;
        let vm = (v + x.shift as i64) as u32;
        let d = self.pm.pow(vm);
        let unit: Vec<Integer> = x.c.iter().map(|c| Integer::from(c / &d)).collect();
        if v > 0 {
            let s = v as u32;
            self.pm.check_shift("Q_q inverse", s)?;
            let inv = self.rinv_unit(&unit, self.prec() + s)?;
            Ok(self.make(inv, s))
        } else {
            let inv = self.rinv_unit(&unit, self.prec())?;
            let f = self.pm.pow((-v) as u32);
            Ok(self.make(inv.into_iter().map(|c| c * &f).collect(), 0))
        }
    }

    pub fn pow(&self, x: &QqElem, e: u64) -> Result<QqElem> {
        let mut r = self.one();
        for i in (0..64 - e.leading_zeros()).rev() {
            r = self.mul(&r, &r)?;
            if (e >> i) & 1 == 1 {
                r = self.mul(&r, x)?;
            }
        }
        Ok(r)
    }

    /// `σ^k(x)`; `σ` fixes `Q_p` and lifts `z ↦ z^p` on the residue field.
    pub fn frobenius(&self, x: &QqElem, k: i64) -> QqElem {
        let k = k.rem_euclid(self.a as i64) as usize;
        if k == 0 || self.a == 1 {
            return x.clone();
        }
        let w = self.prec() + x.shift;
        let img = &self.frob_table()[k];
        let v = self.rcompose(&x.c, img, w);
        self.make(v, x.shift)
    }

    /// Raw Frobenius on an integral mantissa vector modulo `p^w`.
    pub fn frobenius_raw(&self, c: &[Integer], k: i64, w: u32) -> Vec<Integer> {
        let k = k.rem_euclid(self.a as i64) as usize;
        if k == 0 || self.a == 1 {
            let mut v = c.to_vec();
            self.rmod(&mut v, w);
            return v;
        }
        self.rcompose(c, &self.frob_table()[k], w)
    }

    /// Equality at absolute precision `p^k`.
    pub fn eq_mod(&self, x: &QqElem, y: &QqElem, k: u32) -> bool {
        match self.valuation(&self.sub(x, y)) {
            None => true,
            Some(v) => v >= k as i64,
        }
    }

    /// Reduction to another (smaller or equal) precision.
    pub fn to_context(&self, x: &QqElem, target: &Qq) -> QqElem {
        target.make(x.c.clone(), x.shift)
    }

    /// The element as a `Q_p` scalar when it lies there.
    pub fn to_zp(&self, x: &QqElem) -> Option<PadicScaled> {
        if x.c[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(PadicScaled::from_parts(&self.pm, x.c[0].clone(), x.shift))
    }
}
