//! Finite fields as towers `F_p ⊂ F_p[x]/χ̄ ⊂ F_q[y]/ψ̄ ⊂ …` and dense
//! polynomials over them.

use crate::error::{Error, Result};
use rug::Integer;
use std::fmt::Debug;

pub trait FiniteField: Clone + Debug + Send + Sync {
    type El: Clone + PartialEq + Eq + Debug + Send + Sync;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Option<Self::El>;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn absolute_degree(&self) -> usize;
    fn from_prime(&self, c: u64) -> Self::El;
    /// The element as an `F_p` constant, if it is one.
    fn to_prime(&self, a: &Self::El) -> Option<u64>;
    /// Flat coordinates over `F_p`, length [`Self::absolute_degree`].
    fn coords(&self, a: &Self::El) -> Vec<u64>;
    fn from_coords(&self, c: &[u64]) -> Self::El;

    fn order(&self) -> Integer {
        Integer::from(self.characteristic()).pow(self.absolute_degree() as u32)
    }

    fn pow(&self, a: &Self::El, e: &Integer) -> Self::El {
        let mut r = self.one();
        for i in (0..e.significant_bits()).rev() {
            r = self.mul(&r, &r);
            if e.get_bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    fn pow_u(&self, a: &Self::El, e: u64) -> Self::El {
        self.pow(a, &Integer::from(e))
    }

    fn is_one(&self, a: &Self::El) -> bool {
        *a == self.one()
    }
}

use rug::ops::Pow;

/// The prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || !super::int::is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Fp { p })
    }
    pub fn p(&self) -> u64 {
        self.p
    }
}

impl FiniteField for Fp {
    type El = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a % self.p == 0 {
            return None;
        }
        Some(self.pow_u(a, self.p - 2))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn absolute_degree(&self) -> usize {
        1
    }
    fn from_prime(&self, c: u64) -> u64 {
        c % self.p
    }
    fn to_prime(&self, a: &u64) -> Option<u64> {
        Some(*a)
    }
    fn coords(&self, a: &u64) -> Vec<u64> {
        vec![*a]
    }
    fn from_coords(&self, c: &[u64]) -> u64 {
        c[0] % self.p
    }
    fn pow_u(&self, a: &u64, mut e: u64) -> u64 {
        let mut b = *a % self.p;
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }
}

/// `K[t]/(m(t))` for a monic irreducible `m`.
#[derive(Clone, Debug)]
pub struct Ext<K: FiniteField> {
    base: K,
    modulus: Vec<K::El>,
}

pub type Fq = Ext<Fp>;
pub type Fqn = Ext<Fq>;

impl<K: FiniteField> Ext<K> {
    /// Checks that `modulus` is monic and irreducible.
    pub fn new(base: K, modulus: Vec<K::El>) -> Result<Self> {
        let m = poly_trim(&base, modulus);
        if m.len() < 2 || !base.is_one(m.last().unwrap()) {
            return Err(Error::InvalidInput("extension modulus must be monic of degree >= 1".into()));
        }
        if !is_irreducible(&base, &m) {
            return Err(Error::Reducible(format!("{m:?}")));
        }
        Ok(Ext { base, modulus: m })
    }

    pub fn new_unchecked(base: K, modulus: Vec<K::El>) -> Self {
        Ext { base, modulus }
    }

    pub fn base(&self) -> &K {
        &self.base
    }
    pub fn modulus(&self) -> &[K::El] {
        &self.modulus
    }
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn from_base(&self, c: &K::El) -> Vec<K::El> {
        let mut v = vec![self.base.zero(); self.degree()];
        v[0] = c.clone();
        v
    }

    /// The element as a base-field constant, if it is one.
    pub fn to_base(&self, a: &[K::El]) -> Option<K::El> {
        if a[1..].iter().all(|c| self.base.is_zero(c)) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    /// The class of the polynomial `a`.
    pub fn from_poly(&self, a: &[K::El]) -> Vec<K::El> {
        let r = poly_rem(&self.base, a, &self.modulus);
        let mut v = r;
        v.resize(self.degree(), self.base.zero());
        v
    }

    /// The generator `t`.
    pub fn gen(&self) -> Vec<K::El> {
        self.from_poly(&[self.base.zero(), self.base.one()])
    }
}

impl<K: FiniteField> FiniteField for Ext<K> {
    type El = Vec<K::El>;

    fn zero(&self) -> Self::El {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Self::El {
        self.from_base(&self.base.one())
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        let d = self.degree();
        let k = &self.base;
        let mut prod = vec![k.zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if k.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = k.add(&prod[i + j], &k.mul(x, y));
            }
        }
        for t in (d..prod.len()).rev() {
            let c = prod[t].clone();
            if k.is_zero(&c) {
                continue;
            }
            for j in 0..d {
                prod[t - d + j] = k.sub(&prod[t - d + j], &k.mul(&c, &self.modulus[j]));
            }
        }
        prod.truncate(d);
        prod
    }
    fn inv(&self, a: &Self::El) -> Option<Self::El> {
        let k = &self.base;
        let (g, s, _) = poly_xgcd(k, &poly_trim(k, a.clone()), &self.modulus);
        if g.len() != 1 {
            return None;
        }
        let c = k.inv(&g[0])?;
        let s: Vec<K::El> = s.iter().map(|x| k.mul(x, &c)).collect();
        Some(self.from_poly(&s))
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn absolute_degree(&self) -> usize {
        self.degree() * self.base.absolute_degree()
    }
    fn from_prime(&self, c: u64) -> Self::El {
        self.from_base(&self.base.from_prime(c))
    }
    fn to_prime(&self, a: &Self::El) -> Option<u64> {
        self.to_base(a).and_then(|c| self.base.to_prime(&c))
    }
    fn coords(&self, a: &Self::El) -> Vec<u64> {
        a.iter().flat_map(|c| self.base.coords(c)).collect()
    }
    fn from_coords(&self, c: &[u64]) -> Self::El {
        let w = self.base.absolute_degree();
        (0..self.degree())
            .map(|i| self.base.from_coords(&c[i * w..(i + 1) * w]))
            .collect()
    }
}

/// Drops leading zeros; the zero polynomial is empty.
pub fn poly_trim<K: FiniteField>(k: &K, mut a: Vec<K::El>) -> Vec<K::El> {
    while a.last().is_some_and(|c| k.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn poly_add<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El]) -> Vec<K::El> {
    let n = a.len().max(b.len());
    let z = k.zero();
    let out = (0..n)
        .map(|i| k.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    poly_trim(k, out)
}

pub fn poly_sub<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El]) -> Vec<K::El> {
    let n = a.len().max(b.len());
    let z = k.zero();
    let out = (0..n)
        .map(|i| k.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    poly_trim(k, out)
}

pub fn poly_mul<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El]) -> Vec<K::El> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    poly_trim(k, out)
}

/// Quotient and remainder by a nonzero divisor.
pub fn poly_divrem<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El]) -> (Vec<K::El>, Vec<K::El>) {
    let b = poly_trim(k, b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = poly_trim(k, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = k.inv(b.last().unwrap()).expect("leading coefficient is a unit");
    let db = b.len() - 1;
    let mut q = vec![k.zero(); r.len() - db];
    for t in (db..r.len()).rev() {
        if k.is_zero(&r[t]) {
            continue;
        }
        let c = k.mul(&r[t], &lead_inv);
        for j in 0..=db {
            r[t - db + j] = k.sub(&r[t - db + j], &k.mul(&c, &b[j]));
        }
        q[t - db] = c;
    }
    r.truncate(db);
    (poly_trim(k, q), poly_trim(k, r))
}

pub fn poly_rem<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El]) -> Vec<K::El> {
    poly_divrem(k, a, b).1
}

pub fn poly_monic<K: FiniteField>(k: &K, a: &[K::El]) -> Vec<K::El> {
    match a.last() {
        None => Vec::new(),
        Some(l) => {
            let c = k.inv(l).unwrap();
            a.iter().map(|x| k.mul(x, &c)).collect()
        }
    }
}

/// Monic gcd.
pub fn poly_gcd<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El]) -> Vec<K::El> {
    let mut x = poly_trim(k, a.to_vec());
    let mut y = poly_trim(k, b.to_vec());
    while !y.is_empty() {
        let r = poly_rem(k, &x, &y);
        x = y;
        y = r;
    }
    poly_monic(k, &x)
}

/// `(g, s, t)` with `s a + t b = g`; `g` is not normalised.
pub fn poly_xgcd<K: FiniteField>(
    k: &K,
    a: &[K::El],
    b: &[K::El],
) -> (Vec<K::El>, Vec<K::El>, Vec<K::El>) {
    let (mut r0, mut r1) = (poly_trim(k, a.to_vec()), poly_trim(k, b.to_vec()));
    let (mut s0, mut s1) = (vec![k.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![k.one()]);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(k, &r0, &r1);
        let s = poly_sub(k, &s0, &poly_mul(k, &q, &s1));
        let t = poly_sub(k, &t0, &poly_mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    (r0, s0, t0)
}

pub fn poly_mulmod<K: FiniteField>(k: &K, a: &[K::El], b: &[K::El], m: &[K::El]) -> Vec<K::El> {
    poly_rem(k, &poly_mul(k, a, b), m)
}

/// `a^e mod m`.
pub fn poly_powmod<K: FiniteField>(k: &K, a: &[K::El], e: &Integer, m: &[K::El]) -> Vec<K::El> {
    let a = poly_rem(k, a, m);
    let mut r = poly_rem(k, &[k.one()], m);
    for i in (0..e.significant_bits()).rev() {
        r = poly_mulmod(k, &r, &r, m);
        if e.get_bit(i) {
            r = poly_mulmod(k, &r, &a, m);
        }
    }
    r
}

pub fn poly_eval<K: FiniteField>(k: &K, a: &[K::El], x: &K::El) -> K::El {
    let mut acc = k.zero();
    for c in a.iter().rev() {
        acc = k.add(&k.mul(&acc, x), c);
    }
    acc
}

pub fn poly_derivative<K: FiniteField>(k: &K, a: &[K::El]) -> Vec<K::El> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| k.mul(c, &k.from_prime(i as u64 % k.characteristic())))
        .collect();
    poly_trim(k, out)
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `x^(|K|^j) mod m`, by repeated `|K|`-th powering.
pub fn frobenius_x_power<K: FiniteField>(k: &K, m: &[K::El], j: usize) -> Vec<K::El> {
    let q = k.order();
    let mut h = poly_rem(k, &[k.zero(), k.one()], m);
    for _ in 0..j {
        h = poly_powmod(k, &h, &q, m);
    }
    h
}

/// Rabin's irreducibility test.
pub fn is_irreducible<K: FiniteField>(k: &K, f: &[K::El]) -> bool {
    let f = poly_trim(k, f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    let q = k.order();
    let x = vec![k.zero(), k.one()];
    // Frobenius powers x^(q^j) for j = 1..d, computed incrementally.
    let mut pows = Vec::with_capacity(d + 1);
    let mut h = poly_rem(k, &x, &f);
    pows.push(h.clone());
    for _ in 0..d {
        h = poly_powmod(k, &h, &q, &f);
        pows.push(h.clone());
    }
    if !poly_sub(k, &pows[d], &x).is_empty() {
        return false;
    }
    for r in prime_divisors(d) {
        let g = poly_gcd(k, &f, &poly_sub(k, &pows[d / r], &x));
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Minimal polynomial over `K` of `θ ∈ K[t]/m`, as the product of its
/// distinct conjugates under `z ↦ z^|K|`.
pub fn min_poly_over_base<K: FiniteField>(l: &Ext<K>, theta: &[K::El]) -> Vec<K::El> {
    let q = l.base().order();
    let conj = orbit(l, &theta.to_vec(), &q);
    let prod = product_of_linears(l, &conj);
    prod.iter()
        .map(|c| l.to_base(c).expect("minimal polynomial has base coefficients"))
        .collect()
}

/// Minimal polynomial over `F_p` of an element of any tower.
pub fn min_poly_over_prime<L: FiniteField>(l: &L, theta: &L::El) -> Vec<u64> {
    let p = Integer::from(l.characteristic());
    let conj = orbit(l, theta, &p);
    let prod = product_of_linears(l, &conj);
    prod.iter()
        .map(|c| l.to_prime(c).expect("minimal polynomial has prime-field coefficients"))
        .collect()
}

fn orbit<L: FiniteField>(l: &L, theta: &L::El, q: &Integer) -> Vec<L::El> {
    let mut conj = vec![theta.clone()];
    loop {
        let next = l.pow(conj.last().unwrap(), q);
        if next == *theta {
            break;
        }
        conj.push(next);
    }
    conj
}

fn product_of_linears<L: FiniteField>(l: &L, roots: &[L::El]) -> Vec<L::El> {
    let mut prod = vec![l.one()];
    for r in roots {
        prod = poly_mul(l, &prod, &[l.neg(r), l.one()]);
    }
    prod
}

/// Embeds a polynomial over the base into polynomials over the extension.
pub fn lift_poly<K: FiniteField>(l: &Ext<K>, f: &[K::El]) -> Vec<Vec<K::El>> {
    f.iter().map(|c| l.from_base(c)).collect()
}

/// All elements of a small field, in coordinate order.
pub fn enumerate<L: FiniteField>(l: &L) -> impl Iterator<Item = L::El> + '_ {
    let p = l.characteristic();
    let d = l.absolute_degree();
    let total = (p as u128).pow(d as u32);
    (0..total).map(move |mut idx| {
        let mut c = vec![0u64; d];
        for x in c.iter_mut() {
            *x = (idx % p as u128) as u64;
            idx /= p as u128;
        }
        l.from_coords(&c)
    })
}

/// Parses an `F_q` element from its `a` coordinates over `F_p`.
pub fn fq_from_coeffs(fq: &Fq, c: &[u64]) -> Result<Vec<u64>> {
    if c.len() > fq.degree() {
        return Err(Error::InvalidInput(format!(
            "F_q element has {} coordinates, field degree is {}",
            c.len(),
            fq.degree()
        )));
    }
    let mut v: Vec<u64> = c.iter().map(|x| x % fq.characteristic()).collect();
    v.resize(fq.degree(), 0);
    Ok(v)
}

/// The first monic irreducible polynomial of degree `d` over `K`, scanning
/// lower coefficients in counting order.
pub fn find_irreducible<K: FiniteField>(k: &K, d: usize) -> Vec<K::El> {
    assert!(d >= 1, "degree must be positive");
    let p = k.characteristic();
    let e = k.absolute_degree();
    let mut idx: u128 = 0;
    loop {
        let mut i = idx;
        let mut f = Vec::with_capacity(d + 1);
        for _ in 0..d {
            let mut c = vec![0u64; e];
            for x in c.iter_mut() {
                *x = (i % p as u128) as u64;
                i /= p as u128;
            }
            f.push(k.from_coords(&c));
        }
        f.push(k.one());
        if is_irreducible(k, &f) {
            return f;
        }
        idx += 1;
    }
}

/// The distinct roots of `f` in `K`, by Cantor–Zassenhaus splitting with a
/// deterministic sequence of shifts. Odd characteristic only.
pub fn poly_roots<K: FiniteField>(k: &K, f: &[K::El]) -> Vec<K::El> {
    let f = poly_monic(k, &poly_trim(k, f.to_vec()));
    if f.len() < 2 {
        return Vec::new();
    }
    let x = vec![k.zero(), k.one()];
    let xq = poly_powmod(k, &x, &k.order(), &f);
    let split = poly_gcd(k, &f, &poly_sub(k, &xq, &x));
    let mut out = Vec::new();
    let mut stack = vec![split];
    let half = (k.order() - 1u32) / 2u32;
    let mut shift_idx: u64 = 0;
    while let Some(g) = stack.pop() {
        match g.len() {
            0 | 1 => continue,
            2 => {
                out.push(k.neg(&g[0]));
                continue;
            }
            _ => {}
        }
        loop {
            shift_idx += 1;
            let mut c = vec![0u64; k.absolute_degree()];
            let mut i = shift_idx;
            for x in c.iter_mut() {
                *x = i % k.characteristic();
                i /= k.characteristic();
            }
            let lin = vec![k.from_coords(&c), k.one()];
            let h = poly_powmod(k, &lin, &half, &g);
            let d = poly_gcd(k, &g, &poly_sub(k, &h, &[k.one()]));
            if d.len() > 1 && d.len() < g.len() {
                let (quo, _) = poly_divrem(k, &g, &d);
                stack.push(d);
                stack.push(poly_monic(k, &quo));
                break;
            }
        }
    }
    out
}
