use super::resultant::ResultantCertificate;
use crate::arith::qq::Qq;
use crate::error::{Error, Result};
use crate::series::TruncSeries;
use std::collections::BTreeMap;

/// Polynomial in `X` with truncated-series coefficients, constant term first.
pub type XPoly = Vec<TruncSeries>;

pub fn xp_trim(mut a: XPoly) -> XPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn xp_add(qq: &Qq, a: &[TruncSeries], b: &[TruncSeries]) -> Result<XPoly> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o = o.add(qq, s)?;
    }
    Ok(xp_trim(out))
}

pub fn xp_sub(qq: &Qq, a: &[TruncSeries], b: &[TruncSeries]) -> Result<XPoly> {
    let nb: XPoly = b.iter().map(|c| c.neg(qq)).collect();
    xp_add(qq, a, &nb)
}

/// Adds `b · X^off` into `acc`.
fn xp_add_into(qq: &Qq, acc: &mut XPoly, b: &[TruncSeries], off: usize) -> Result<()> {
    if b.is_empty() {
        return Ok(());
    }
    let t = b[0].trunc();
    if acc.len() < b.len() + off {
        acc.resize(b.len() + off, TruncSeries::zero(qq, t));
    }
    for (i, c) in b.iter().enumerate() {
        if !c.is_zero() {
            acc[i + off] = acc[i + off].add(qq, c)?;
        }
    }
    Ok(())
}

pub fn xp_mul(qq: &Qq, a: &[TruncSeries], b: &[TruncSeries]) -> Result<XPoly> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let t = a[0].trunc();
    let mut out = vec![TruncSeries::zero(qq, t); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(qq, &x.mul(qq, y)?)?;
        }
    }
    Ok(xp_trim(out))
}

pub fn xp_scale(qq: &Qq, a: &[TruncSeries], s: &TruncSeries) -> Result<XPoly> {
    let v: Result<XPoly> = a.iter().map(|c| c.mul(qq, s)).collect();
    Ok(xp_trim(v?))
}

pub fn xp_div_int(qq: &Qq, a: &[TruncSeries], k: i64) -> Result<XPoly> {
    a.iter().map(|c| c.div_int(qq, k)).collect()
}

pub fn xp_derivative(qq: &Qq, a: &[TruncSeries]) -> XPoly {
    xp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_int(qq, i as u64))
            .collect(),
    )
}

/// Division by a monic `b`.
pub fn xp_divrem_monic(qq: &Qq, a: &[TruncSeries], b: &[TruncSeries]) -> Result<(XPoly, XPoly)> {
    let db = b.len() - 1;
    let mut r = xp_trim(a.to_vec());
    if r.len() <= db {
        return Ok((Vec::new(), r));
    }
    let t = b[0].trunc();
    let mut quot = vec![TruncSeries::zero(qq, t); r.len() - db];
    for top in (db..r.len()).rev() {
        let c = r[top].clone();
        if c.is_zero() {
            continue;
        }
        let s = top - db;
        for (j, bj) in b.iter().enumerate().take(db) {
            if !bj.is_zero() {
                r[s + j] = r[s + j].sub(qq, &c.mul(qq, bj)?)?;
            }
        }
        r[top] = TruncSeries::zero(qq, t);
        quot[s] = c;
    }
    r.truncate(db);
    Ok((xp_trim(quot), xp_trim(r)))
}

/// `Σ_k B_k(X) dX / √Q^k`.
#[derive(Clone, Debug, Default)]
pub struct DifferentialForm {
    terms: BTreeMap<i64, XPoly>,
}

impl DifferentialForm {
    pub fn new() -> Self {
        Self::default()
    }

    /// `b dX / √Q^k`.
    pub fn single(k: i64, b: XPoly) -> Self {
        let mut f = Self::new();
        f.terms.insert(k, b);
        f
    }

    pub fn add_term(&mut self, qq: &Qq, k: i64, b: &[TruncSeries]) -> Result<()> {
        match self.terms.get_mut(&k) {
            Some(acc) => *acc = xp_add(qq, acc, b)?,
            None => {
                self.terms.insert(k, xp_trim(b.to_vec()));
            }
        }
        Ok(())
    }

    pub fn terms(&self) -> &BTreeMap<i64, XPoly> {
        &self.terms
    }

    pub fn max_level(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn pop_top(&mut self) -> Option<(i64, XPoly)> {
        self.terms.pop_last()
    }
}

/// Reduction of forms to coordinates over `X^i dX/√Q`, `0 <= i < 2g`,
/// modulo exact forms.
#[derive(Clone, Debug)]
pub struct Reducer {
    qq: Qq,
    trunc: usize,
    g: usize,
    q: XPoly,
    dq: XPoly,
    alpha: XPoly,
    beta: XPoly,
    rinv: TruncSeries,
}

impl Reducer {
    /// Coefficients of `cert` are cut or padded to `trunc`; `1/r` is used
    /// as a power series in `Γ`.
    pub fn new(qq: &Qq, cert: &ResultantCertificate, trunc: usize) -> Result<Self> {
        let fit = |p: &[TruncSeries]| -> XPoly {
            xp_trim(p.iter().map(|c| c.to_context(qq).with_trunc(qq, trunc)).collect())
        };
        let q = fit(cert.q());
        let dq = xp_derivative(qq, &q);
        let rinv = cert.r().to_context(qq).with_trunc(qq, trunc).inverse(qq)?;
        Ok(Reducer {
            qq: qq.clone(),
            trunc,
            g: cert.genus(),
            alpha: fit(cert.alpha()),
            beta: fit(cert.beta()),
            q,
            dq,
            rinv,
        })
    }

    pub fn qq(&self) -> &Qq {
        &self.qq
    }
    pub fn trunc(&self) -> usize {
        self.trunc
    }
    pub fn genus(&self) -> usize {
        self.g
    }
    pub fn q(&self) -> &[TruncSeries] {
        &self.q
    }
    pub fn dq(&self) -> &[TruncSeries] {
        &self.dq
    }

    /// Digits `d_t` (each of degree `<= 2g`) with `b = Σ d_t Q^t`.
    pub fn q_digits(&self, b: &[TruncSeries]) -> Result<Vec<XPoly>> {
        let mut out = Vec::new();
        let mut rest = xp_trim(b.to_vec());
        while !rest.is_empty() {
            let (quot, rem) = xp_divrem_monic(&self.qq, &rest, &self.q)?;
            out.push(rem);
            rest = quot;
        }
        Ok(out)
    }

    /// One step `B/√Q^k ↦ (αB + 2(βB)'/(k−2)) / (r √Q^(k−2))`, `k > 2` odd.
    pub fn denominator_step(&self, b: &[TruncSeries], k: i64) -> Result<XPoly> {
        if k <= 2 || k % 2 == 0 {
            return Err(Error::Invariant(format!("denominator step at level {k}")));
        }
        let qq = &self.qq;
        let pk = xp_mul(qq, &self.alpha, b)?;
        let rk = xp_mul(qq, &self.beta, b)?;
        let drk = xp_div_int(qq, &xp_derivative(qq, &rk), k - 2)?;
        let drk: XPoly = drk.iter().map(|c| c.mul_int(qq, 2)).collect();
        let n = xp_add(qq, &pk, &drk)?;
        xp_scale(qq, &n, &self.rinv)
    }

    /// Lowers every level to `k = 1`; the result is the numerator over `√Q`.
    pub fn reduce_denominator(&self, form: DifferentialForm) -> Result<XPoly> {
        let qq = &self.qq;
        let mut form = form;
        let mut low = DifferentialForm::new();
        while let Some((k, b)) = form.pop_top() {
            if k <= 1 {
                low.terms.insert(k, b);
                continue;
            }
            if k % 2 == 0 {
                if b.is_empty() {
                    continue;
                }
                return Err(Error::Invariant(format!("even denominator level {k}")));
            }
            let digits = self.q_digits(&b)?;
            for (t, d) in digits.iter().enumerate().skip(1) {
                if !d.is_empty() {
                    form.add_term(qq, k - 2 * t as i64, d)?;
                }
            }
            let Some(d0) = digits.into_iter().next() else {
                continue;
            };
            if d0.is_empty() {
                continue;
            }
            let n = self.denominator_step(&d0, k)?;
            form.add_term(qq, k - 2, &n)?;
        }
        let mut acc: XPoly = Vec::new();
        for (k, b) in low.terms {
            // B Q^(|k|/2) dX has no Y and is exact.
            if k % 2 == 0 {
                continue;
            }
            let mut b = b;
            for _ in 0..(1 - k) / 2 {
                b = xp_mul(qq, &b, &self.q)?;
            }
            acc = xp_add(qq, &acc, &b)?;
        }
        Ok(acc)
    }

    /// Coordinates of `b dX / √Q`, lowering `X^m` for `m >= 2g` top-down.
    pub fn reduce_xpower(&self, b: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        let qq = &self.qq;
        let g2 = 2 * self.g;
        let mut b = xp_trim(b.to_vec());
        let q_low = &self.q[..g2 + 1];
        let dq_low = &self.dq[..g2];
        for m in (g2..b.len()).rev() {
            let c = std::mem::replace(&mut b[m], TruncSeries::zero(qq, self.trunc));
            if c.is_zero() {
                continue;
            }
            let c = c.div_int(qq, -(2 * m as i64 - g2 as i64 + 1))?;
            let j = m - g2;
            if j > 0 {
                let c2 = c.mul_int(qq, 2 * j as u64);
                let t = xp_scale(qq, q_low, &c2)?;
                xp_add_into(qq, &mut b, &t, j - 1)?;
            }
            let t = xp_scale(qq, dq_low, &c)?;
            xp_add_into(qq, &mut b, &t, j)?;
        }
        b.resize(g2, TruncSeries::zero(qq, self.trunc));
        b.truncate(g2);
        Ok(b)
    }

    pub fn reduce(&self, form: DifferentialForm) -> Result<Vec<TruncSeries>> {
        let n = self.reduce_denominator(form)?;
        self.reduce_xpower(&n)
    }
}
