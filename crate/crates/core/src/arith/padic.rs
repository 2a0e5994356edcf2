//! Fixed-precision p-adic numbers stored as `mantissa · p^(-shift)`.

use super::int::{self, reduce};
use crate::error::{budget, Error, Result};
use rug::ops::Pow;
use rug::Integer;
use std::sync::Arc;

/// A prime, an absolute precision `N` and a shift budget.
///
/// Values are known modulo `p^N`; a value with shift `s` keeps its mantissa
/// in `[0, p^(N+s))`. Shifts above the budget are a hard error.
#[derive(Clone, Debug)]
pub struct PrimeModulus {
    p: u64,
    prec: u32,
    budget: u32,
    pows: Arc<Vec<Integer>>,
}

impl PrimeModulus {
    pub fn new(p: u64, prec: u32, shift_budget: u32) -> Result<Self> {
        if p == 2 || !int::is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotOddPrime(p));
        }
        if prec == 0 {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        let top = (prec + shift_budget) as usize + 2 * shift_budget as usize + 8;
        let mut pows = Vec::with_capacity(top + 1);
        let mut acc = Integer::from(1);
        for _ in 0..=top {
            pows.push(acc.clone());
            acc *= p;
        }
        Ok(PrimeModulus {
            p,
            prec,
            budget: shift_budget,
            pows: Arc::new(pows),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// `p^k`, cached for the exponents the context can produce.
    pub fn pow(&self, k: u32) -> Integer {
        match self.pows.get(k as usize) {
            Some(x) => x.clone(),
            None => Integer::from(self.p).pow(k),
        }
    }

    /// Borrowed `p^k` when cached.
    pub fn pow_ref(&self, k: u32) -> std::borrow::Cow<'_, Integer> {
        match self.pows.get(k as usize) {
            Some(x) => std::borrow::Cow::Borrowed(x),
            None => std::borrow::Cow::Owned(Integer::from(self.p).pow(k)),
        }
    }

    /// Modulus for mantissas carrying shift `s`.
    pub fn mant_mod(&self, s: u32) -> std::borrow::Cow<'_, Integer> {
        self.pow_ref(self.prec + s)
    }

    /// Same prime and budget at another precision.
    pub fn with_prec(&self, prec: u32) -> Result<Self> {
        PrimeModulus::new(self.p, prec, self.budget)
    }

    pub fn check_shift(&self, what: &'static str, s: u32) -> Result<()> {
        budget(what, s, self.budget)
    }
}

/// An element of `Q_p` known to absolute precision `p^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicScaled {
    mant: Integer,
    shift: u32,
}

impl PadicScaled {
    pub fn zero() -> Self {
        PadicScaled {
            mant: Integer::new(),
            shift: 0,
        }
    }

    pub fn from_int(pm: &PrimeModulus, x: impl Into<Integer>) -> Self {
        let mut m: Integer = x.into();
        reduce(&mut m, &pm.mant_mod(0));
        PadicScaled { mant: m, shift: 0 }
    }

    /// `mant · p^(-shift)`, normalised.
    pub fn from_parts(pm: &PrimeModulus, mant: Integer, shift: u32) -> Self {
        let mut m = mant;
        reduce(&mut m, &pm.mant_mod(shift));
        let mut x = PadicScaled { mant: m, shift };
        x.normalize(pm);
        x
    }

    pub fn mantissa(&self) -> &Integer {
        &self.mant
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Strips common factors of `p` so that either the shift is zero or the
    /// mantissa is a unit.
    pub fn normalize(&mut self, pm: &PrimeModulus) {
        if self.shift == 0 {
            return;
        }
        if self.mant.is_zero() {
            self.shift = 0;
            return;
        }
        let v = int::val_capped(pm.p(), &self.mant, self.shift);
        if v > 0 {
            self.mant.div_exact_mut(&pm.pow(v));
            self.shift -= v;
        }
    }

    /// Valuation, or `None` for zero at this precision.
    pub fn valuation(&self, pm: &PrimeModulus) -> Option<i64> {
        if self.mant.is_zero() {
            return None;
        }
        let v = int::val_capped(pm.p(), &self.mant, u32::MAX);
        Some(v as i64 - self.shift as i64)
    }

    fn aligned(&self, pm: &PrimeModulus, s: u32) -> Integer {
        Integer::from(&self.mant * &*pm.pow_ref(s - self.shift))
    }

    pub fn add(&self, other: &Self, pm: &PrimeModulus) -> Self {
        let s = self.shift.max(other.shift);
        let m = self.aligned(pm, s) + other.aligned(pm, s);
        Self::from_parts(pm, m, s)
    }

    pub fn sub(&self, other: &Self, pm: &PrimeModulus) -> Self {
        let s = self.shift.max(other.shift);
        let m = self.aligned(pm, s) - other.aligned(pm, s);
        Self::from_parts(pm, m, s)
    }

    pub fn neg(&self, pm: &PrimeModulus) -> Self {
        Self::from_parts(pm, Integer::from(-&self.mant), self.shift)
    }

    /// Product; the absolute error is at worst `p^(N - s1 - s2)`.
    pub fn mul(&self, other: &Self, pm: &PrimeModulus) -> Result<Self> {
        let s = self.shift + other.shift;
        pm.check_shift("p-adic product", s)?;
        Ok(Self::from_parts(
            pm,
            Integer::from(&self.mant * &other.mant),
            s,
        ))
    }

    /// Division by a nonzero machine integer; its p-part becomes shift.
    pub fn div_int(&self, k: i64, pm: &PrimeModulus) -> Result<Self> {
        if k == 0 {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        let v = int::val_u64(pm.p(), k.unsigned_abs());
        let u = k / (pm.p() as i64).pow(v);
        let s = self.shift + v;
        pm.check_shift("p-adic division", s)?;
        let modulus = pm.mant_mod(s);
        let inv = Integer::from(u)
            .invert(&modulus)
            .map_err(|_| Error::NotInvertible("unit part".into()))?;
        Ok(Self::from_parts(pm, Integer::from(&self.mant * &inv), s))
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, pm: &PrimeModulus) -> Result<Self> {
        let v = self
            .valuation(pm)
            .ok_or_else(|| Error::NotInvertible("zero".into()))?;
        let vm = v + self.shift as i64;
        let unit = Integer::from(&self.mant / &pm.pow(vm as u32));
        // x = unit p^v, so 1/x = unit^(-1) p^(-v).
        if v > 0 {
            let s = v as u32;
            pm.check_shift("p-adic inverse", s)?;
            let inv = unit
                .invert(&pm.mant_mod(s))
                .map_err(|_| Error::NotInvertible("unit".into()))?;
            Ok(Self::from_parts(pm, inv, s))
        } else {
            let inv = unit
                .invert(&pm.mant_mod(0))
                .map_err(|_| Error::NotInvertible("unit".into()))?;
            let up = (-v) as u32;
            Ok(Self::from_parts(pm, inv * pm.pow(up), 0))
        }
    }

    /// Integer representative when the value is integral.
    pub fn to_integer(&self) -> Option<Integer> {
        if self.shift == 0 || self.mant.is_zero() {
            Some(self.mant.clone())
        } else {
            None
        }
    }

    /// Equality modulo `p^k` (absolute).
    pub fn eq_mod(&self, other: &Self, k: u32, pm: &PrimeModulus) -> bool {
        let d = self.sub(other, pm);
        match d.valuation(pm) {
            None => true,
            Some(v) => v >= k as i64,
        }
    }
}
