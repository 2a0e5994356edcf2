#![allow(dead_code)]

use famzeta_core::arith::ff::{find_irreducible, FiniteField, Fp};
use famzeta_core::arith::{Qq, QqElem, Qqn, QqnElem};
use rand::Rng;
use rug::Integer;

pub fn rand_int<R: Rng>(rng: &mut R, m: &Integer) -> Integer {
    // Enough random bits to make the bias irrelevant for tests.
    let bits = m.significant_bits() + 64;
    let words: Vec<u64> = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
    Integer::from_digits(&words, rug::integer::Order::Lsf) % m
}

/// `Q_q` with `q = p^a`, the modulus being the first irreducible of degree `a`.
pub fn qq_context(p: u64, a: usize, prec: u32, budget: u32) -> Qq {
    let fp = Fp::new(p).unwrap();
    let chibar = find_irreducible(&fp, a);
    Qq::new(p, &chibar, prec, budget).unwrap()
}

pub fn rand_qq<R: Rng>(rng: &mut R, qq: &Qq, shift: u32) -> QqElem {
    let m = qq.pow_p(qq.prec() + shift);
    let c = (0..qq.a()).map(|_| rand_int(rng, &m)).collect();
    qq.make(c, shift)
}

pub fn rand_unit<R: Rng>(rng: &mut R, qq: &Qq) -> QqElem {
    loop {
        let x = rand_qq(rng, qq, 0);
        if qq.valuation(&x) == Some(0) {
            return x;
        }
    }
}

/// `Q_{q^n}` defined by a Teichmüller modulus over `Q_p` when `a = 1`, or
/// by a lift of an irreducible `F_q` polynomial otherwise.
pub fn qqn_context(qq: &Qq, n: usize) -> Qqn {
    let fq = qq.fq().clone();
    let psi = find_irreducible(&fq, n);
    let phi: Vec<QqElem> = psi.iter().map(|c| qq.from_fq(c)).collect();
    Qqn::new(qq.clone(), &phi).unwrap()
}

pub fn rand_qqn<R: Rng>(rng: &mut R, qqn: &Qqn) -> QqnElem {
    let qq = qqn.qq();
    let coeffs: Vec<QqElem> = (0..qqn.n()).map(|_| rand_qq(rng, qq, 0)).collect();
    qqn.from_poly(&coeffs).unwrap()
}

pub fn fp_poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let fp = Fp::new(p).unwrap();
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = fp.add(&out[i + j], &fp.mul(x, y));
        }
    }
    out
}
