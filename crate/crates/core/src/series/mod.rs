//! Truncated power series in `Γ` over `Q_q`, and square matrices of them.
//!
//! Storage is flat: coefficient `k` occupies `c[k a .. (k + 1) a]`, and a
//! single shift applies to the whole series (or the whole matrix). Products
//! go through Kronecker substitution.

use crate::arith::int::{self, reduce};
use crate::arith::kronecker;
use crate::arith::qq::{Qq, QqElem};
use crate::arith::qqn::{Qqn, QqnElem};
use crate::error::{Error, Result};
use rug::Integer;

/// Lays out `trunc` coefficients of a bivariate series with gaps so that
/// products in `x` (degree `<= 2a - 2`) never collide.
fn flatten(c: &[Integer], a: usize, trunc: usize) -> Vec<Integer> {
    if a == 1 {
        return c[..trunc].to_vec();
    }
    let wide = 2 * a - 1;
    let mut f = vec![Integer::new(); (trunc - 1) * wide + a];
    for k in 0..trunc {
        for i in 0..a {
            f[k * wide + i] = c[k * a + i].clone();
        }
    }
    f
}

/// Folds a flattened product back, reducing modulo `χ` and `p^w`.
fn unflatten(qq: &Qq, prod: Vec<Integer>, trunc: usize, w: u32) -> Vec<Integer> {
    let a = qq.a();
    let m = qq.pow_p(w);
    if a == 1 {
        let mut v = prod;
        v.resize(trunc, Integer::new());
        for x in v.iter_mut() {
            reduce(x, &m);
        }
        return v;
    }
    let wide = 2 * a - 1;
    let mut out = Vec::with_capacity(trunc * a);
    let mut it = prod.into_iter();
    for _ in 0..trunc {
        let mut c: Vec<Integer> = (&mut it).take(wide).collect();
        c.resize(wide, Integer::new());
        qq.reduce_chi(&mut c);
        for x in c.iter_mut() {
            reduce(x, &m);
        }
        out.extend(c);
    }
    out
}

/// `Σ_{k < trunc} c_k Γ^k` scaled by `p^(-shift)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    pub(crate) trunc: usize,
    pub(crate) a: usize,
    pub(crate) shift: u32,
    pub(crate) c: Vec<Integer>,
}

impl TruncSeries {
    pub fn zero(qq: &Qq, trunc: usize) -> Self {
        TruncSeries {
            trunc,
            a: qq.a(),
            shift: 0,
            c: vec![Integer::new(); trunc * qq.a()],
        }
    }

    pub fn constant(qq: &Qq, x: &QqElem, trunc: usize) -> Self {
        Self::from_coeffs(qq, std::slice::from_ref(x), trunc)
    }

    /// Builds a series from `Q_q` coefficients, dropping those past `trunc`.
    pub fn from_coeffs(qq: &Qq, xs: &[QqElem], trunc: usize) -> Self {
        let a = qq.a();
        let shift = xs.iter().take(trunc).map(|x| x.shift()).max().unwrap_or(0);
        let mut c = vec![Integer::new(); trunc * a];
        for (k, x) in xs.iter().take(trunc).enumerate() {
            let f = qq.pow_p(shift - x.shift());
            for i in 0..a {
                c[k * a + i] = Integer::from(&x.coeffs()[i] * &f);
            }
        }
        Self::make(qq, c, shift, trunc)
    }

    /// Normalised series from raw mantissas.
    pub fn make(qq: &Qq, mut c: Vec<Integer>, shift: u32, trunc: usize) -> Self {
        c.resize(trunc * qq.a(), Integer::new());
        let m = qq.pow_p(qq.prec() + shift);
        for x in c.iter_mut() {
            reduce(x, &m);
        }
        let mut s = TruncSeries {
            trunc,
            a: qq.a(),
            shift,
            c,
        };
        s.normalize(qq);
        s
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    pub fn raw(&self) -> &[Integer] {
        &self.c
    }

    pub fn normalize(&mut self, qq: &Qq) {
        if self.shift == 0 {
            return;
        }
        let v = int::min_val_capped(qq.p(), &self.c, self.shift);
        if v > 0 {
            let d = qq.pow_p(v);
            for x in self.c.iter_mut() {
                x.div_exact_mut(&d);
            }
            self.shift -= v;
        }
    }

    pub fn coeff(&self, qq: &Qq, k: usize) -> QqElem {
        if k >= self.trunc {
            return qq.zero();
        }
        qq.make(self.c[k * self.a..(k + 1) * self.a].to_vec(), self.shift)
    }

    pub fn coeffs(&self, qq: &Qq) -> Vec<QqElem> {
        (0..self.trunc).map(|k| self.coeff(qq, k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        (0..self.trunc)
            .rev()
            .find(|&k| self.c[k * self.a..(k + 1) * self.a].iter().any(|x| !x.is_zero()))
    }

    /// Minimal valuation over all coefficients, `None` when zero.
    pub fn valuation(&self, qq: &Qq) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(int::min_val_capped(qq.p(), &self.c, u32::MAX) as i64 - self.shift as i64)
    }

    fn aligned(&self, qq: &Qq, s: u32) -> Vec<Integer> {
        if s == self.shift {
            return self.c.clone();
        }
        let f = qq.pow_p(s - self.shift);
        self.c.iter().map(|x| Integer::from(x * &f)).collect()
    }

    fn check_trunc(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::Dimension(format!(
                "series truncations {} and {}",
                self.trunc, other.trunc
            )));
        }
        Ok(())
    }

    pub fn add(&self, qq: &Qq, other: &Self) -> Result<Self> {
        self.check_trunc(other)?;
        let s = self.shift.max(other.shift);
        let mut c = self.aligned(qq, s);
        for (u, v) in c.iter_mut().zip(other.aligned(qq, s)) {
            *u += v;
        }
        Ok(Self::make(qq, c, s, self.trunc))
    }

    pub fn sub(&self, qq: &Qq, other: &Self) -> Result<Self> {
        self.check_trunc(other)?;
        let s = self.shift.max(other.shift);
        let mut c = self.aligned(qq, s);
        for (u, v) in c.iter_mut().zip(other.aligned(qq, s)) {
            *u -= v;
        }
        Ok(Self::make(qq, c, s, self.trunc))
    }

    pub fn neg(&self, qq: &Qq) -> Self {
        Self::make(qq, self.c.iter().map(|x| Integer::from(-x)).collect(), self.shift, self.trunc)
    }

    /// Truncated product.
    pub fn mul(&self, qq: &Qq, other: &Self) -> Result<Self> {
        self.check_trunc(other)?;
        let s = self.shift + other.shift;
        qq.pm().check_shift("series product", s)?;
        let t = self.trunc;
        let a = qq.a();
        let prod = kronecker::mul_trunc(&flatten(&self.c, a, t), &flatten(&other.c, a, t), t * (2 * a - 1));
        let c = unflatten(qq, prod, t, qq.prec() + s);
        Ok(Self::make(qq, c, s, t))
    }

    pub fn mul_qq(&self, qq: &Qq, x: &QqElem) -> Result<Self> {
        let s = self.shift + x.shift();
        qq.pm().check_shift("series scalar product", s)?;
        let a = qq.a();
        let mut c = Vec::with_capacity(self.c.len());
        for k in 0..self.trunc {
            let mut w = qq.mul_wide(&self.c[k * a..(k + 1) * a], x.coeffs());
            qq.reduce_chi(&mut w);
            c.extend(w);
        }
        Ok(Self::make(qq, c, s, self.trunc))
    }

    pub fn mul_int(&self, qq: &Qq, k: impl Into<Integer>) -> Self {
        let k: Integer = k.into();
        Self::make(qq, self.c.iter().map(|x| Integer::from(x * &k)).collect(), self.shift, self.trunc)
    }

    pub fn div_int(&self, qq: &Qq, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        let v = int::val_u64(qq.p(), k.unsigned_abs());
        let u = k / (qq.p() as i64).pow(v);
        let s = self.shift + v;
        qq.pm().check_shift("series division", s)?;
        let inv = Integer::from(u)
            .invert(&qq.pow_p(qq.prec() + s))
            .map_err(|_| Error::NotInvertible("unit".into()))?;
        Ok(Self::make(qq, self.c.iter().map(|x| Integer::from(x * &inv)).collect(), s, self.trunc))
    }

    /// `d/dΓ`; the top coefficient becomes zero.
    pub fn derivative(&self, qq: &Qq) -> Self {
        let a = self.a;
        let mut c = vec![Integer::new(); self.c.len()];
        for k in 1..self.trunc {
            for i in 0..a {
                c[(k - 1) * a + i] = Integer::from(&self.c[k * a + i] * k as u64);
            }
        }
        Self::make(qq, c, self.shift, self.trunc)
    }

    /// Changes the truncation, padding with zeros.
    pub fn with_trunc(&self, qq: &Qq, trunc: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(trunc * self.a, Integer::new());
        Self::make(qq, c, self.shift, trunc)
    }

    /// Moves the series into another precision context.
    pub fn to_context(&self, target: &Qq) -> Self {
        Self::make(target, self.c.clone(), self.shift, self.trunc)
    }

    /// `s^σ(Γ^p)`: Frobenius on the coefficients and `Γ ↦ Γ^p`.
    pub fn substitute_sigma_gamma_p(&self, qq: &Qq) -> Self {
        let a = self.a;
        let p = qq.p() as usize;
        let w = qq.prec() + self.shift;
        let mut c = vec![Integer::new(); self.c.len()];
        let mut k = 0;
        while k * p < self.trunc {
            let img = qq.frobenius_raw(&self.c[k * a..(k + 1) * a], 1, w);
            c[k * p * a..(k * p + 1) * a].clone_from_slice(&img);
            k += 1;
        }
        Self::make(qq, c, self.shift, self.trunc)
    }

    pub fn pow(&self, qq: &Qq, e: u64) -> Result<Self> {
        let mut one = Self::zero(qq, self.trunc);
        one.c[0] = Integer::from(1);
        let mut r = one;
        for i in (0..64 - e.leading_zeros()).rev() {
            r = r.mul(qq, &r)?;
            if (e >> i) & 1 == 1 {
                r = r.mul(qq, self)?;
            }
        }
        Ok(r)
    }

    /// Multiplicative inverse when the constant term is a unit.
    pub fn inverse(&self, qq: &Qq) -> Result<Self> {
        let c0 = self.coeff(qq, 0);
        let i0 = qq.inv(&c0)?;
        let mut d = Self::constant(qq, &i0, 1);
        let mut t = 1;
        while t < self.trunc {
            t = (2 * t).min(self.trunc);
            let s = self.truncated(qq, t);
            let d2 = d.with_trunc(qq, t);
            let sd = s.mul(qq, &d2)?;
            let mut two = Self::zero(qq, t);
            two.c[0] = Integer::from(2);
            let e = two.sub(qq, &sd)?;
            d = d2.mul(qq, &e)?;
        }
        Ok(d)
    }

    /// The first `t` coefficients.
    pub fn truncated(&self, qq: &Qq, t: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(t * self.a, Integer::new());
        Self::make(qq, c, self.shift, t)
    }

    /// `s(y) mod φ` in `Q_{q^n}`.
    pub fn reduce_mod_phi(&self, qqn: &Qqn) -> Result<QqnElem> {
        qqn.qq().pm().check_shift("series evaluation", self.shift)?;
        let a = self.a;
        let raw: Vec<Vec<Integer>> = (0..self.trunc)
            .map(|k| self.c[k * a..(k + 1) * a].to_vec())
            .collect();
        Ok(qqn.from_raw_poly(raw, self.shift))
    }

    /// `s(point)` by Horner's rule in `Q_{q^n}`.
    pub fn evaluate(&self, qq: &Qq, qqn: &Qqn, point: &QqnElem) -> Result<QqnElem> {
        let mut acc = qqn.zero();
        for k in (0..self.trunc).rev() {
            acc = qqn.mul(&acc, point)?;
            acc = qqn.add(&acc, &qqn.from_qq(&self.coeff(qq, k)));
        }
        Ok(acc)
    }
}

/// Square matrix of truncated series sharing one shift; entries row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub(crate) dim: usize,
    pub(crate) trunc: usize,
    pub(crate) a: usize,
    pub(crate) shift: u32,
    pub(crate) e: Vec<Vec<Integer>>,
}

/// A constant matrix over `Q_q`.
pub type QqMatrix = Vec<Vec<QqElem>>;

impl SeriesMatrix {
    pub fn zero(qq: &Qq, dim: usize, trunc: usize) -> Self {
        SeriesMatrix {
            dim,
            trunc,
            a: qq.a(),
            shift: 0,
            e: vec![vec![Integer::new(); trunc * qq.a()]; dim * dim],
        }
    }

    pub fn identity(qq: &Qq, dim: usize, trunc: usize) -> Self {
        let mut m = Self::zero(qq, dim, trunc);
        for i in 0..dim {
            m.e[i * dim + i][0] = Integer::from(1);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    pub fn raw_entry(&self, i: usize, j: usize) -> &[Integer] {
        &self.e[i * self.dim + j]
    }

    /// Normalised matrix from raw mantissas.
    pub fn make(qq: &Qq, dim: usize, trunc: usize, mut e: Vec<Vec<Integer>>, shift: u32) -> Self {
        let m = qq.pow_p(qq.prec() + shift);
        for x in e.iter_mut() {
            x.resize(trunc * qq.a(), Integer::new());
            for c in x.iter_mut() {
                reduce(c, &m);
            }
        }
        let mut s = SeriesMatrix {
            dim,
            trunc,
            a: qq.a(),
            shift,
            e,
        };
        s.normalize(qq);
        s
    }

    pub fn from_entries(qq: &Qq, dim: usize, entries: &[TruncSeries]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension("series matrix entries".into()));
        }
        let trunc = entries[0].trunc;
        if entries.iter().any(|x| x.trunc != trunc) {
            return Err(Error::Dimension("mixed truncations".into()));
        }
        let s = entries.iter().map(|x| x.shift).max().unwrap_or(0);
        let e = entries.iter().map(|x| x.aligned(qq, s)).collect();
        Ok(Self::make(qq, dim, trunc, e, s))
    }

    pub fn entry(&self, qq: &Qq, i: usize, j: usize) -> TruncSeries {
        TruncSeries::make(qq, self.e[i * self.dim + j].clone(), self.shift, self.trunc)
    }

    /// The constant matrix `M(0)`.
    pub fn constant_term(&self, qq: &Qq) -> QqMatrix {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| qq.make(self.e[i * self.dim + j][..self.a].to_vec(), self.shift))
                    .collect()
            })
            .collect()
    }

    /// Coefficient matrix of `Γ^k`.
    pub fn coeff_matrix(&self, qq: &Qq, k: usize) -> QqMatrix {
        let a = self.a;
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| qq.make(self.e[i * self.dim + j][k * a..(k + 1) * a].to_vec(), self.shift))
                    .collect()
            })
            .collect()
    }

    pub fn normalize(&mut self, qq: &Qq) {
        if self.shift == 0 {
            return;
        }
        let mut v = self.shift;
        for x in &self.e {
            v = v.min(int::min_val_capped(qq.p(), x, v));
            if v == 0 {
                return;
            }
        }
        let d = qq.pow_p(v);
        for x in self.e.iter_mut() {
            for c in x.iter_mut() {
                c.div_exact_mut(&d);
            }
        }
        self.shift -= v;
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.iter().all(|c| c.is_zero()))
    }

    /// Minimal valuation over the coefficients of `Γ^k`, `None` when zero.
    pub fn coeff_valuation(&self, qq: &Qq, k: usize) -> Option<i64> {
        let a = self.a;
        let mut best: Option<u32> = None;
        for x in &self.e {
            let sl = &x[k * a..(k + 1) * a];
            if sl.iter().all(|c| c.is_zero()) {
                continue;
            }
            let v = int::min_val_capped(qq.p(), sl, u32::MAX);
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best.map(|v| v as i64 - self.shift as i64)
    }

    fn aligned(&self, qq: &Qq, s: u32) -> Vec<Vec<Integer>> {
        if s == self.shift {
            return self.e.clone();
        }
        let f = qq.pow_p(s - self.shift);
        self.e
            .iter()
            .map(|x| x.iter().map(|c| Integer::from(c * &f)).collect())
            .collect()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.trunc != other.trunc {
            return Err(Error::Dimension(format!(
                "series matrices {}x{} mod Γ^{} and {}x{} mod Γ^{}",
                self.dim, self.dim, self.trunc, other.dim, other.dim, other.trunc
            )));
        }
        Ok(())
    }

    pub fn add(&self, qq: &Qq, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let s = self.shift.max(other.shift);
        let mut e = self.aligned(qq, s);
        for (x, y) in e.iter_mut().zip(other.aligned(qq, s)) {
            for (u, v) in x.iter_mut().zip(y) {
                *u += v;
            }
        }
        Ok(Self::make(qq, self.dim, self.trunc, e, s))
    }

    pub fn sub(&self, qq: &Qq, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let s = self.shift.max(other.shift);
        let mut e = self.aligned(qq, s);
        for (x, y) in e.iter_mut().zip(other.aligned(qq, s)) {
            for (u, v) in x.iter_mut().zip(y) {
                *u -= v;
            }
        }
        Ok(Self::make(qq, self.dim, self.trunc, e, s))
    }

    /// Truncated matrix product.
    pub fn mul(&self, qq: &Qq, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let s = self.shift + other.shift;
        qq.pm().check_shift("series matrix product", s)?;
        let (t, a, d) = (self.trunc, qq.a(), self.dim);
        let fa: Vec<Vec<Integer>> = self.e.iter().map(|x| flatten(x, a, t)).collect();
        let fb: Vec<Vec<Integer>> = other.e.iter().map(|x| flatten(x, a, t)).collect();
        let prod = kronecker::matmul_trunc(&fa, &fb, d, t * (2 * a - 1));
        let w = qq.prec() + s;
        let e = prod.into_iter().map(|x| unflatten(qq, x, t, w)).collect();
        Ok(Self::make(qq, d, t, e, s))
    }

    /// `self · m` for a constant matrix `m`.
    pub fn mul_const_right(&self, qq: &Qq, m: &QqMatrix) -> Result<Self> {
        let d = self.dim;
        let a = qq.a();
        let sm = m.iter().flatten().map(|x| x.shift()).max().unwrap_or(0);
        let s = self.shift + sm;
        qq.pm().check_shift("series matrix scalar product", s)?;
        let raw: Vec<Vec<Vec<Integer>>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let f = qq.pow_p(sm - x.shift());
                        x.coeffs().iter().map(|c| Integer::from(c * &f)).collect()
                    })
                    .collect()
            })
            .collect();
        let mut e = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut out = Vec::with_capacity(self.trunc * a);
                for k in 0..self.trunc {
                    let mut acc = vec![Integer::new(); 2 * a - 1];
                    for l in 0..d {
                        qq.mul_acc(&mut acc, &self.e[i * d + l][k * a..(k + 1) * a], &raw[l][j]);
                    }
                    qq.reduce_chi(&mut acc);
                    out.extend(acc);
                }
                e.push(out);
            }
        }
        Ok(Self::make(qq, d, self.trunc, e, s))
    }

    /// Every entry multiplied by the scalar series `f`.
    pub fn mul_series(&self, qq: &Qq, f: &TruncSeries) -> Result<Self> {
        let s = self.shift + f.shift;
        qq.pm().check_shift("series matrix times series", s)?;
        let (t, a) = (self.trunc, qq.a());
        let ff = flatten(&f.c, a, t);
        let w = qq.prec() + s;
        use rayon::prelude::*;
        let e = self
            .e
            .par_iter()
            .map(|x| {
                let prod = kronecker::mul_trunc(&flatten(x, a, t), &ff, t * (2 * a - 1));
                unflatten(qq, prod, t, w)
            })
            .collect();
        Ok(Self::make(qq, self.dim, t, e, s))
    }

    /// `M^σ(Γ^p)`.
    pub fn substitute_sigma_gamma_p(&self, qq: &Qq) -> Self {
        let d = self.dim;
        let entries: Vec<Vec<Integer>> = (0..d * d)
            .map(|idx| {
                let s = TruncSeries {
                    trunc: self.trunc,
                    a: self.a,
                    shift: self.shift,
                    c: self.e[idx].clone(),
                };
                let mut img = s.substitute_sigma_gamma_p(qq);
                img.c = img.aligned(qq, self.shift);
                img.c
            })
            .collect();
        Self::make(qq, d, self.trunc, entries, self.shift)
    }

    /// `M^σ`, coefficientwise.
    pub fn frobenius(&self, qq: &Qq) -> Self {
        let a = self.a;
        let w = qq.prec() + self.shift;
        let e = self
            .e
            .iter()
            .map(|x| x.chunks(a).flat_map(|c| qq.frobenius_raw(c, 1, w)).collect())
            .collect();
        Self::make(qq, self.dim, self.trunc, e, self.shift)
    }

    /// `M(Γ^p)` modulo `Γ^t`.
    pub fn spread_gamma_p(&self, qq: &Qq, t: usize) -> Self {
        let a = self.a;
        let p = qq.p() as usize;
        let e = self
            .e
            .iter()
            .map(|x| {
                let mut v = vec![Integer::new(); t * a];
                for k in (0..self.trunc).take_while(|k| k * p < t) {
                    v[k * p * a..(k * p + 1) * a].clone_from_slice(&x[k * a..(k + 1) * a]);
                }
                v
            })
            .collect();
        Self::make(qq, self.dim, t, e, self.shift)
    }

    /// `(M^σ(Γ^p))^(-1)` modulo `Γ^trunc`: the inverse is itself a series
    /// in `Γ^p`, so the Newton iteration runs on `⌈trunc/p⌉` coefficients.
    pub fn inverse_sigma_gamma_p(&self, qq: &Qq) -> Result<Self> {
        let short = self.trunc.div_ceil(qq.p() as usize);
        let inv = self.with_trunc(qq, short).frobenius(qq).newton_invert(qq)?;
        Ok(inv.spread_gamma_p(qq, self.trunc))
    }

    /// The first `t` coefficients (or zero-padded to `t`).
    pub fn with_trunc(&self, qq: &Qq, t: usize) -> Self {
        let e = self
            .e
            .iter()
            .map(|x| {
                let mut v = x.clone();
                v.resize(t * self.a, Integer::new());
                v
            })
            .collect();
        Self::make(qq, self.dim, t, e, self.shift)
    }

    pub fn to_context(&self, target: &Qq) -> Self {
        Self::make(target, self.dim, self.trunc, self.e.clone(), self.shift)
    }

    /// `Ṁ`.
    pub fn derivative(&self, qq: &Qq) -> Self {
        let d = self.dim;
        let e = (0..d * d)
            .map(|idx| {
                let s = self.entry(qq, idx / d, idx % d);
                s.derivative(qq).aligned(qq, self.shift)
            })
            .collect();
        Self::make(qq, d, self.trunc, e, self.shift)
    }

    /// Inverse modulo `Γ^trunc` by Newton iteration with doubling truncation.
    pub fn newton_invert(&self, qq: &Qq) -> Result<Self> {
        let d = self.dim;
        let c0 = self.constant_term(qq);
        let i0 = invert_constant(qq, &c0)?;
        let entries: Vec<TruncSeries> = i0
            .iter()
            .flatten()
            .map(|x| TruncSeries::constant(qq, x, 1))
            .collect();
        let mut inv = SeriesMatrix::from_entries(qq, d, &entries)?;
        let mut t = 1;
        while t < self.trunc {
            t = (2 * t).min(self.trunc);
            let a_t = self.with_trunc(qq, t);
            let d_t = inv.with_trunc(qq, t);
            let ad = a_t.mul(qq, &d_t)?;
            let err = SeriesMatrix::identity(qq, d, t).sub(qq, &ad)?;
            let corr = d_t.mul(qq, &err)?;
            inv = d_t.add(qq, &corr)?;
        }
        Ok(inv)
    }
}

/// Gauss-Jordan inverse of a constant matrix over `Q_q`, pivoting on the
/// smallest valuation.
pub fn invert_constant(qq: &Qq, m: &QqMatrix) -> Result<QqMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<QqElem>> = m.to_vec();
    let mut inv: Vec<Vec<QqElem>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { qq.one() } else { qq.zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter_map(|r| qq.valuation(&a[r][col]).map(|v| (v, r)))
            .min()
            .ok_or_else(|| Error::NotInvertible("singular constant matrix".into()))?
            .1;
        a.swap(col, piv);
        inv.swap(col, piv);
        let pinv = qq.inv(&a[col][col])?;
        for j in 0..n {
            a[col][j] = qq.mul(&a[col][j], &pinv)?;
            inv[col][j] = qq.mul(&inv[col][j], &pinv)?;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = qq.mul(&f, &a[col][j])?;
                a[r][j] = qq.sub(&a[r][j], &t);
                let t = qq.mul(&f, &inv[col][j])?;
                inv[r][j] = qq.sub(&inv[r][j], &t);
            }
        }
    }
    Ok(inv)
}

/// Product of constant matrices.
pub fn const_matmul(qq: &Qq, a: &QqMatrix, b: &QqMatrix) -> Result<QqMatrix> {
    let n = a.len();
    let mut out = vec![vec![qq.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = qq.zero();
            for l in 0..n {
                acc = qq.add(&acc, &qq.mul(&a[i][l], &b[l][j])?);
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}
