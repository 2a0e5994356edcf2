//! Dense polynomials over `Z_q` modulo `p^w`, coefficients stored as raw
//! `Q_q` mantissa vectors. Used where shifts are known to be zero.

use super::qq::Qq;
use rug::Integer;

pub type RawPoly = Vec<Vec<Integer>>;

pub fn trim(mut a: RawPoly) -> RawPoly {
    while a.last().is_some_and(|c| c.iter().all(|x| x.is_zero())) {
        a.pop();
    }
    a
}

pub fn zero_coeff(q: &Qq) -> Vec<Integer> {
    vec![Integer::new(); q.a()]
}

pub fn one(q: &Qq) -> RawPoly {
    let mut c = zero_coeff(q);
    c[0] = Integer::from(1);
    vec![c]
}

/// `a + sign · b` modulo `p^w`.
pub fn add(q: &Qq, a: &RawPoly, b: &RawPoly, w: u32, sign: i32) -> RawPoly {
    let n = a.len().max(b.len());
    let z = zero_coeff(q);
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).unwrap_or(&z);
            let y = b.get(i).unwrap_or(&z);
            let mut v: Vec<Integer> = x
                .iter()
                .zip(y)
                .map(|(u, v)| {
                    if sign > 0 {
                        Integer::from(u + v)
                    } else {
                        Integer::from(u - v)
                    }
                })
                .collect();
            q.rmod(&mut v, w);
            v
        })
        .collect();
    trim(out)
}

/// Product modulo `p^w`.
pub fn mul(q: &Qq, a: &RawPoly, b: &RawPoly, w: u32) -> RawPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![vec![Integer::new(); 2 * q.a() - 1]; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.iter().all(|c| c.is_zero()) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            q.mul_acc(&mut out[i + j], x, y);
        }
    }
    let out = out
        .into_iter()
        .map(|mut c| {
            q.reduce_chi(&mut c);
            q.rmod(&mut c, w);
            c
        })
        .collect();
    trim(out)
}

/// Division by a monic polynomial modulo `p^w`.
pub fn divrem_monic(q: &Qq, a: &RawPoly, b: &RawPoly, w: u32) -> (RawPoly, RawPoly) {
    let db = b.len() - 1;
    let mut r = a.clone();
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut quo = vec![zero_coeff(q); r.len() - db];
    for t in (db..r.len()).rev() {
        let mut c = std::mem::take(&mut r[t]);
        q.rmod(&mut c, w);
        if c.iter().all(|x| x.is_zero()) {
            continue;
        }
        for j in 0..db {
            let mut prod = q.mul_wide(&c, &b[j]);
            q.reduce_chi(&mut prod);
            for (u, v) in r[t - db + j].iter_mut().zip(prod) {
                *u -= v;
            }
        }
        quo[t - db] = c;
    }
    r.truncate(db);
    for c in r.iter_mut() {
        q.rmod(c, w);
    }
    (trim(quo), trim(r))
}
