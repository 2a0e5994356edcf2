//! `Q_{q^n} = Q_q[y]/(φ)` for a monic `φ` whose reduction is irreducible
//! over `F_q`, together with its Frobenius.

use super::ff::{poly_trim, Ext, FiniteField, Fqn};
use super::int::{self, reduce};
use super::kronecker;
use super::qq::{Qq, QqElem};
use crate::error::{Error, Result};
use rug::Integer;

#[derive(Clone, Debug)]
pub struct Qqn {
    qq: Qq,
    n: usize,
    /// `φ_0 .. φ_{n-1}` as raw `Q_q` vectors modulo `p^(N + budget)`.
    phi: Vec<Vec<Integer>>,
    fqn: Fqn,
}

/// `p^(-shift) · Σ_j (Σ_i c[j a + i] x^i) y^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QqnElem {
    pub(crate) c: Vec<Integer>,
    pub(crate) shift: u32,
}

impl QqnElem {
    pub fn coeffs(&self) -> &[Integer] {
        &self.c
    }
    pub fn shift(&self) -> u32 {
        self.shift
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

/// How [`Qqn::compose`] evaluates `g(η) mod φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComposeMethod {
    Horner,
    /// Baby-step giant-step with blocks of about `√n` powers.
    Blocked,
}

impl Qqn {
    /// `phi` lists `φ_0, …, φ_n` with `φ_n = 1`; every coefficient must be
    /// integral.
    pub fn new(qq: Qq, phi: &[QqElem]) -> Result<Self> {
        let n = phi.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidInput("modulus of Q_{q^n} must have degree >= 1".into())
        })?;
        if phi.iter().any(|c| c.shift > 0) || phi[n] != qq.one() {
            return Err(Error::InvalidInput("modulus of Q_{q^n} must be integral and monic".into()));
        }
        let phibar: Vec<Vec<u64>> = phi.iter().map(|c| qq.reduce_fq(c)).collect::<Result<_>>()?;
        let fqn = Ext::new(qq.fq().clone(), poly_trim(qq.fq(), phibar))?;
        let w = qq.prec() + qq.budget();
        let phi = phi[..n]
            .iter()
            .map(|c| {
                let mut v = c.c.clone();
                qq.rmod(&mut v, w);
                v
            })
            .collect();
        Ok(Qqn { qq, n, phi, fqn })
    }

    pub fn qq(&self) -> &Qq {
        &self.qq
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn prec(&self) -> u32 {
        self.qq.prec()
    }
    pub fn residue_field(&self) -> &Fqn {
        &self.fqn
    }
    /// `φ` with the implicit leading one.
    pub fn modulus(&self) -> Vec<QqElem> {
        let mut out: Vec<QqElem> = self.phi.iter().map(|c| self.qq.make(c.clone(), 0)).collect();
        out.push(self.qq.one());
        out
    }

    fn a(&self) -> usize {
        self.qq.a()
    }

    // ----- raw ring arithmetic modulo (χ, φ, p^w) -----

    /// Reduces a vector of `Q_q` coefficients of any length modulo `φ`.
    fn reduce_phi(&self, mut v: Vec<Vec<Integer>>, w: u32) -> Vec<Integer> {
        let (a, n) = (self.a(), self.n);
        let m = self.qq.pow_p(w);
        for t in (n..v.len()).rev() {
            let mut lead = std::mem::take(&mut v[t]);
            if lead.iter().all(|x| x.is_zero()) {
                continue;
            }
            for x in lead.iter_mut() {
                reduce(x, &m);
            }
            for j in 0..n {
                let prod = self.qq.rmul(&lead, &self.phi[j], w);
                for (u, x) in v[t - n + j].iter_mut().zip(prod) {
                    *u -= x;
                }
            }
        }
        let mut out = Vec::with_capacity(n * a);
        for j in 0..n {
            let mut c = v.get(j).cloned().unwrap_or_default();
            c.resize(a, Integer::new());
            for x in c.iter_mut() {
                reduce(x, &m);
            }
            out.extend(c);
        }
        out
    }

    /// Product modulo `(χ, φ, p^w)` of raw integral vectors.
    pub fn rmul(&self, x: &[Integer], y: &[Integer], w: u32) -> Vec<Integer> {
        let (a, n) = (self.a(), self.n);
        let wide = 2 * a - 1;
        let mut ycoef: Vec<Vec<Integer>> = vec![vec![Integer::new(); wide]; 2 * n - 1];
        if n * a <= 8 {
            for j1 in 0..n {
                for j2 in 0..n {
                    self.qq.mul_acc(
                        &mut ycoef[j1 + j2],
                        &x[j1 * a..(j1 + 1) * a],
                        &y[j2 * a..(j2 + 1) * a],
                    );
                }
            }
        } else {
            let flat = |v: &[Integer]| {
                let mut f = vec![Integer::new(); (n - 1) * wide + a];
                for j in 0..n {
                    for i in 0..a {
                        f[j * wide + i] = v[j * a + i].clone();
                    }
                }
                f
            };
            let (fx, fy) = (flat(x), flat(y));
            let len = 2 * fx.len() - 1;
            let prod = kronecker::mul_trunc(&fx, &fy, len);
            for (t, c) in prod.into_iter().enumerate() {
                if !c.is_zero() {
                    ycoef[t / wide][t % wide] = c;
                }
            }
        }
        let v: Vec<Vec<Integer>> = ycoef
            .into_iter()
            .map(|mut c| {
                self.qq.reduce_chi(&mut c);
                c
            })
            .collect();
        self.reduce_phi(v, w)
    }

    fn rmod(&self, v: &mut [Integer], w: u32) {
        self.qq.rmod(v, w)
    }

    fn rone(&self) -> Vec<Integer> {
        let mut v = vec![Integer::new(); self.n * self.a()];
        v[0] = Integer::from(1);
        v
    }

    /// Residue in `F_{q^n}` of a raw integral vector.
    pub fn residue_raw(&self, x: &[Integer]) -> Vec<Vec<u64>> {
        let p = self.qq.p();
        let a = self.a();
        (0..self.n)
            .map(|j| x[j * a..(j + 1) * a].iter().map(|c| int::mod_u64(c, p)).collect())
            .collect()
    }

    pub fn lift_residue_raw(&self, r: &[Vec<u64>]) -> Vec<Integer> {
        let p = self.qq.p();
        r.iter()
            .flat_map(|c| c.iter().map(move |&v| Integer::from(int::centered_u64(v, p))))
            .collect()
    }

    /// Inverse of a unit modulo `p^w`.
    pub fn rinv_unit(&self, x: &[Integer], w: u32) -> Result<Vec<Integer>> {
        let xbar = self.residue_raw(x);
        let ibar = self
            .fqn
            .inv(&xbar)
            .ok_or_else(|| Error::NotInvertible("element of Q_{q^n} is not a unit".into()))?;
        let mut y = self.lift_residue_raw(&ibar);
        let mut prec = 1u32;
        while prec < w {
            prec = (2 * prec).min(w);
            let xy = self.rmul(x, &y, prec);
            let mut t: Vec<Integer> = xy.into_iter().map(|c| -c).collect();
            t[0] += 2;
            y = self.rmul(&y, &t, prec);
        }
        self.rmod(&mut y, w);
        Ok(y)
    }

    /// `g(η)` where `g` is given by its `Q_q` coefficient vectors.
    fn rcompose(&self, g: &[Vec<Integer>], eta: &[Integer], w: u32, method: ComposeMethod) -> Vec<Integer> {
        match method {
            ComposeMethod::Horner => {
                let mut acc = vec![Integer::new(); self.n * self.a()];
                for c in g.iter().rev() {
                    acc = self.rmul(&acc, eta, w);
                    for (u, v) in acc.iter_mut().zip(c) {
                        *u += v;
                    }
                    self.rmod(&mut acc[..self.a()], w);
                }
                acc
            }
            ComposeMethod::Blocked => {
                let len = g.len();
                let m = ((len as f64).sqrt().ceil() as usize).max(1);
                let mut baby = Vec::with_capacity(m + 1);
                baby.push(self.rone());
                for k in 1..=m {
                    let next = self.rmul(&baby[k - 1], eta, w);
                    baby.push(next);
                }
                let giant = baby[m].clone();
                let blocks = len.div_ceil(m);
                let mut acc = vec![Integer::new(); self.n * self.a()];
                for b in (0..blocks).rev() {
                    acc = self.rmul(&acc, &giant, w);
                    for j in 0..m {
                        let idx = b * m + j;
                        if idx >= len {
                            break;
                        }
                        let coef = &g[idx];
                        if coef.iter().all(|x| x.is_zero()) {
                            continue;
                        }
                        self.scalar_acc(&mut acc, coef, &baby[j]);
                    }
                    self.rmod(&mut acc, w);
                }
                acc
            }
        }
    }

    /// `acc += s · v` for a `Q_q` scalar `s`.
    fn scalar_acc(&self, acc: &mut [Integer], s: &[Integer], v: &[Integer]) {
        let a = self.a();
        for j in 0..self.n {
            let mut wide = self.qq.mul_wide(s, &v[j * a..(j + 1) * a]);
            self.qq.reduce_chi(&mut wide);
            for (u, x) in acc[j * a..(j + 1) * a].iter_mut().zip(wide) {
                *u += x;
            }
        }
    }

    /// `σ^k(y)` modulo `p^(N + budget)`: Newton on `φ^(σ^k)` from `ȳ^(p^k)`.
    pub fn frobenius_image_y(&self, k: u64) -> Result<Vec<Integer>> {
        let w = self.qq.prec() + self.qq.budget();
        let p = self.qq.p();
        let ybar = self.fqn.gen();
        let mut img = ybar;
        for _ in 0..k {
            img = self.fqn.pow_u(&img, p);
        }
        let mut z = self.lift_residue_raw(&img);
        let ks = k as i64;
        let mut phis: Vec<Vec<Integer>> = self
            .phi
            .iter()
            .map(|c| self.qq.frobenius_raw(c, ks, w))
            .collect();
        let mut one = vec![Integer::new(); self.a()];
        one[0] = Integer::from(1);
        phis.push(one);
        let dphis: Vec<Vec<Integer>> = phis
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.iter().map(|x| Integer::from(x * i as u64)).collect())
            .collect();
        let mut prec = 1u32;
        while prec < w {
            prec = (2 * prec).min(w);
            let val = self.rcompose(&phis, &z, prec, ComposeMethod::Horner);
            let der = self.rcompose(&dphis, &z, prec, ComposeMethod::Horner);
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

    pub fn zero(&self) -> QqnElem {
        QqnElem {
            c: vec![Integer::new(); self.n * self.a()],
            shift: 0,
        }
    }

    pub fn one(&self) -> QqnElem {
        self.from_qq(&self.qq.one())
    }

    /// The generator `y`.
    pub fn gen(&self) -> QqnElem {
        if self.n == 1 {
            // y = -φ_0
            let c = self.phi[0].iter().map(|x| Integer::from(-x)).collect();
            return self.make(c, 0);
        }
        let mut c = vec![Integer::new(); self.n * self.a()];
        c[self.a()] = Integer::from(1);
        self.make(c, 0)
    }

    pub fn from_qq(&self, x: &QqElem) -> QqnElem {
        let mut c = vec![Integer::new(); self.n * self.a()];
        c[..self.a()].clone_from_slice(&x.c);
        self.make(c, x.shift)
    }

    /// Element with the given `Q_q` coefficients in `y` (any length).
    pub fn from_poly(&self, coeffs: &[QqElem]) -> Result<QqnElem> {
        let s = coeffs.iter().map(|c| c.shift).max().unwrap_or(0);
        self.qq.pm().check_shift("Q_{q^n} element", s)?;
        let w = self.prec() + s;
        let v: Vec<Vec<Integer>> = coeffs
            .iter()
            .map(|c| {
                let f = self.qq.pow_p(s - c.shift);
                c.c.iter().map(|x| Integer::from(x * &f)).collect()
            })
            .collect();
        Ok(self.make(self.reduce_phi(v, w), s))
    }

    /// Element `p^(-shift) Σ_j v_j y^j` from raw `Q_q` vectors of any length.
    pub fn from_raw_poly(&self, v: Vec<Vec<Integer>>, shift: u32) -> QqnElem {
        let w = self.prec() + shift;
        self.make(self.reduce_phi(v, w), shift)
    }

    pub fn make(&self, mut c: Vec<Integer>, shift: u32) -> QqnElem {
        self.rmod(&mut c, self.prec() + shift);
        let mut e = QqnElem { c, shift };
        self.normalize(&mut e);
        e
    }

    pub fn normalize(&self, e: &mut QqnElem) {
        if e.shift == 0 {
            return;
        }
        let v = int::min_val_capped(self.qq.p(), &e.c, e.shift);
        if v > 0 {
            let d = self.qq.pow_p(v);
            for x in e.c.iter_mut() {
                x.div_exact_mut(&d);
            }
            e.shift -= v;
        }
    }

    /// The `y^j` coefficient.
    pub fn coeff(&self, x: &QqnElem, j: usize) -> QqElem {
        let a = self.a();
        self.qq.make(x.c[j * a..(j + 1) * a].to_vec(), x.shift)
    }

    pub fn valuation(&self, x: &QqnElem) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        Some(int::min_val_capped(self.qq.p(), &x.c, u32::MAX) as i64 - x.shift as i64)
    }

    fn aligned(&self, x: &QqnElem, s: u32) -> Vec<Integer> {
        if x.shift == s {
            return x.c.clone();
        }
        let f = self.qq.pow_p(s - x.shift);
        x.c.iter().map(|c| Integer::from(c * &f)).collect()
    }

    pub fn add(&self, x: &QqnElem, y: &QqnElem) -> QqnElem {
        let s = x.shift.max(y.shift);
        let mut c = self.aligned(x, s);
        for (u, v) in c.iter_mut().zip(self.aligned(y, s)) {
            *u += v;
        }
        self.make(c, s)
    }

    pub fn sub(&self, x: &QqnElem, y: &QqnElem) -> QqnElem {
        let s = x.shift.max(y.shift);
        let mut c = self.aligned(x, s);
        for (u, v) in c.iter_mut().zip(self.aligned(y, s)) {
            *u -= v;
        }
        self.make(c, s)
    }

    pub fn neg(&self, x: &QqnElem) -> QqnElem {
        self.make(x.c.iter().map(|c| Integer::from(-c)).collect(), x.shift)
    }

    pub fn mul(&self, x: &QqnElem, y: &QqnElem) -> Result<QqnElem> {
        let s = x.shift + y.shift;
        self.qq.pm().check_shift("Q_{q^n} product", s)?;
        Ok(self.make(self.rmul(&x.c, &y.c, self.prec() + s), s))
    }

    pub fn mul_qq(&self, x: &QqnElem, s: &QqElem) -> Result<QqnElem> {
        let sh = x.shift + s.shift;
        self.qq.pm().check_shift("Q_{q^n} scalar product", sh)?;
        let mut acc = vec![Integer::new(); x.c.len()];
        self.scalar_acc(&mut acc, &s.c, &x.c);
        Ok(self.make(acc, sh))
    }

    pub fn inv(&self, x: &QqnElem) -> Result<QqnElem> {
        let v = self
            .valuation(x)
            .ok_or_else(|| Error::NotInvertible("zero in Q_{q^n}".into()))?;
        let vm = (v + x.shift as i64) as u32;
        let d = self.qq.pow_p(vm);
        let unit: Vec<Integer> = x.c.iter().map(|c| Integer::from(c / &d)).collect();
        if v > 0 {
            let s = v as u32;
            self.qq.pm().check_shift("Q_{q^n} inverse", s)?;
            Ok(self.make(self.rinv_unit(&unit, self.prec() + s)?, s))
        } else {
            let inv = self.rinv_unit(&unit, self.prec())?;
            let f = self.qq.pow_p((-v) as u32);
            Ok(self.make(inv.into_iter().map(|c| c * &f).collect(), 0))
        }
    }

    pub fn pow(&self, x: &QqnElem, e: u64) -> Result<QqnElem> {
        let mut r = self.one();
        for i in (0..64 - e.leading_zeros()).rev() {
            r = self.mul(&r, &r)?;
            if (e >> i) & 1 == 1 {
                r = self.mul(&r, x)?;
            }
        }
        Ok(r)
    }

    /// `g(η) mod φ`, for `g` with `Q_q` coefficients and integral `η`.
    pub fn compose(&self, g: &[QqElem], eta: &QqnElem, method: ComposeMethod) -> Result<QqnElem> {
        if eta.shift > 0 {
            return Err(Error::Invariant("composition point must be integral".into()));
        }
        let s = g.iter().map(|c| c.shift).max().unwrap_or(0);
        let w = self.prec() + s;
        let raw: Vec<Vec<Integer>> = g
            .iter()
            .map(|c| {
                let f = self.qq.pow_p(s - c.shift);
                c.c.iter().map(|x| Integer::from(x * &f)).collect()
            })
            .collect();
        Ok(self.make(self.rcompose(&raw, &eta.c, w, method), s))
    }

    /// `σ^k(x)` given `img = σ^k(y)` from [`Self::frobenius_image_y`].
    pub fn frobenius_with(&self, x: &QqnElem, k: u64, img: &[Integer], method: ComposeMethod) -> QqnElem {
        let a = self.a();
        let w = self.prec() + x.shift;
        let g: Vec<Vec<Integer>> = (0..self.n)
            .map(|j| self.qq.frobenius_raw(&x.c[j * a..(j + 1) * a], k as i64, w))
            .collect();
        let mut eta = img.to_vec();
        self.rmod(&mut eta, w);
        self.make(self.rcompose(&g, &eta, w, method), x.shift)
    }

    /// `σ^k(x)`; computes the image of `y` afresh.
    pub fn frobenius(&self, x: &QqnElem, k: u64) -> Result<QqnElem> {
        let img = self.frobenius_image_y(k)?;
        Ok(self.frobenius_with(x, k, &img, ComposeMethod::Horner))
    }

    pub fn eq_mod(&self, x: &QqnElem, y: &QqnElem, k: u32) -> bool {
        match self.valuation(&self.sub(x, y)) {
            None => true,
            Some(v) => v >= k as i64,
        }
    }

    /// Trace down to `Q_q`: `Σ_j c_j Tr(y^j)` with the power sums of `φ`.
    pub fn trace(&self, x: &QqnElem) -> Result<QqElem> {
        let sums = self.power_sums()?;
        let mut acc = self.qq.zero();
        for (j, s) in sums.iter().enumerate() {
            let cj = self.coeff(x, j);
            if cj.is_zero() {
                continue;
            }
            acc = self.qq.add(&acc, &self.qq.mul(&cj, s)?);
        }
        Ok(acc)
    }

    /// `Tr(y^j)` for `j < n`, by Newton's identities on `φ`.
    fn power_sums(&self) -> Result<Vec<QqElem>> {
        let n = self.n;
        let phi = self.modulus();
        let q = &self.qq;
        let mut s: Vec<QqElem> = vec![q.from_int(n as u64)];
        for k in 1..n {
            // s_k = -k φ_{n-k} - Σ_{i=1}^{k-1} φ_{n-i} s_{k-i}
            let mut acc = q.mul_int(&phi[n - k], -(k as i64));
            for i in 1..k {
                acc = q.sub(&acc, &q.mul(&phi[n - i], &s[k - i])?);
            }
            s.push(acc);
        }
        Ok(s)
    }
}
