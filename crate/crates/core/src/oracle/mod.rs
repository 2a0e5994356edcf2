//! Brute-force ground truth: point counts by enumeration and the
//! L-polynomial they determine.

pub mod flat;

use crate::arith::ff::{find_irreducible, poly_roots, Ext, FiniteField, Fp, Fqn};
use crate::cohomology::CurveFamily;
use crate::error::{Error, Result};
use flat::FlatField;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Integer;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_VAR: &str = "FAMZETA_ENUM_CAP";
pub const DEFAULT_ENUM_CAP: u64 = 1 << 26;
/// Fields at most this large use Euler's criterion directly.
const TABLE_THRESHOLD: u64 = 1 << 16;

/// Largest field the counter will enumerate.
pub fn enumeration_cap() -> u64 {
    std::env::var(ENUM_CAP_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub field_size: u64,
    pub affine: u64,
    /// `affine + 1`: the odd-degree model has one point at infinity.
    pub total: u64,
    pub elapsed: Duration,
}

/// `Y² = Q̄(X)` over an enumeration field.
#[derive(Clone, Debug)]
pub struct FibreCounter {
    field: FlatField,
    /// Coefficients of `Q̄(X)`, constant first.
    q: Vec<Vec<u64>>,
}

impl FibreCounter {
    pub fn new(field: FlatField, q: Vec<Vec<u64>>) -> Self {
        FibreCounter { field, q }
    }

    /// The fibre at `γ̄ ∈ gamma_field`, over the degree-`k` extension of
    /// `gamma_field`.
    pub fn for_parameter(family: &CurveFamily, gamma_field: &Fqn, gamma_bar: &[Vec<u64>], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        let p = family.p();
        let fp = Fp::new(p)?;
        let a = family.a();
        let n = gamma_field.degree();
        let big = Ext::new(fp.clone(), find_irreducible(&fp, a * n * k))?;
        // Embed F_p[ξ]/χ̄ ⊂ F_q[y]/ψ̄ into the flat field by choosing roots.
        let chi: Vec<Vec<u64>> = family.chibar().iter().map(|&c| big.from_prime(c)).collect();
        let xi = poly_roots(&big, &chi)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Invariant("χ̄ has no root in the enumeration field".into()))?;
        let embed_fq = |c: &[u64]| -> Vec<u64> {
            let mut acc = big.zero();
            for &x in c.iter().rev() {
                acc = big.add(&big.mul(&acc, &xi), &big.from_prime(x));
            }
            acc
        };
        let psi: Vec<Vec<u64>> = gamma_field.modulus().iter().map(|c| embed_fq(c)).collect();
        let y = poly_roots(&big, &psi)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Invariant("ψ̄ has no root in the enumeration field".into()))?;
        let embed = |c: &[Vec<u64>]| -> Vec<u64> {
            let mut acc = big.zero();
            for x in c.iter().rev() {
                acc = big.add(&big.mul(&acc, &y), &embed_fq(x));
            }
            acc
        };
        let q: Vec<Vec<u64>> = family
            .eval_bar(gamma_field, gamma_bar)
            .iter()
            .map(|c| big.coords(&embed(c)))
            .collect();
        let modulus: Vec<u64> = big.modulus().to_vec();
        Ok(FibreCounter::new(FlatField::new(p, &modulus), q))
    }

    pub fn field(&self) -> &FlatField {
        &self.field
    }

    /// The model `Y² = Q̄(X + c)`.
    pub fn translate(&self, c: &[u64]) -> Self {
        let f = &self.field;
        // Taylor shift by repeated synthetic division.
        let mut coeffs = self.q.clone();
        let n = coeffs.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = f.mul(&coeffs[j + 1], c);
                coeffs[j] = f.add(&coeffs[j], &t);
            }
        }
        FibreCounter::new(f.clone(), coeffs)
    }

    /// Counts points by enumerating `x` and adding `1 + χ₂(Q̄(x))`.
    pub fn count(&self, cap: u64) -> Result<CountReport> {
        let f = &self.field;
        let size = match f.size() {
            Some(s) if s <= cap => s,
            _ => {
                return Err(Error::CapExceeded {
                    size: format!("{}^{}", f.p(), f.degree()),
                    cap,
                })
            }
        };
        let t = Instant::now();
        let sum: i64 = if size <= TABLE_THRESHOLD {
            let by_power: i64 = (0..size)
                .into_par_iter()
                .map(|i| 1 + f.chi(&f.eval(&self.q, &f.element(i))) as i64)
                .sum();
            let table = square_table(f, size);
            let by_table = self.sum_with_table(&table, size);
            if by_power != by_table {
                return Err(Error::Invariant(format!(
                    "quadratic character mismatch: {by_power} by powering, {by_table} by table"
                )));
            }
            by_power
        } else {
            let table = square_table(f, size);
            let step = (size / 1024).max(1);
            for i in (0..size).step_by(step as usize) {
                let x = f.element(i);
                let chi = f.chi(&x);
                let idx = f.index(&x) as usize;
                let tab = if i == 0 { 0 } else if table[idx].load(Ordering::Relaxed) { 1 } else { -1 };
                if chi != tab {
                    return Err(Error::Invariant("quadratic character table disagrees with powering".into()));
                }
            }
            self.sum_with_table(&table, size)
        };
        let affine = u64::try_from(sum).map_err(|_| Error::Invariant("negative point count".into()))?;
        Ok(CountReport {
            field_size: size,
            affine,
            total: affine + 1,
            elapsed: t.elapsed(),
        })
    }

    fn sum_with_table(&self, table: &[AtomicBool], size: u64) -> i64 {
        let f = &self.field;
        (0..size)
            .into_par_iter()
            .map(|i| {
                let v = f.eval(&self.q, &f.element(i));
                let idx = f.index(&v);
                if idx == 0 {
                    1
                } else if table[idx as usize].load(Ordering::Relaxed) {
                    2
                } else {
                    0
                }
            })
            .sum()
    }
}

/// `table[i]` is set when the element with index `i` is a nonzero square.
fn square_table(f: &FlatField, size: u64) -> Vec<AtomicBool> {
    let table: Vec<AtomicBool> = (0..size).map(|_| AtomicBool::new(false)).collect();
    (1..size).into_par_iter().for_each(|i| {
        let x = f.element(i);
        table[f.index(&f.mul(&x, &x)) as usize].store(true, Ordering::Relaxed);
    });
    table
}

/// `#X(F_{|gamma_field|^k})` for the fibre at `γ̄`, capped by
/// [`enumeration_cap`].
pub fn count_points_naive(family: &CurveFamily, gamma_field: &Fqn, gamma_bar: &[Vec<u64>], k: usize) -> Result<CountReport> {
    FibreCounter::for_parameter(family, gamma_field, gamma_bar, k)?.count(enumeration_cap())
}

/// `P(t)` from `#X(F_{Q^k})`, `k = 1..=g` (further counts are checked for
/// consistency), where `Q = field_size`.
pub fn zeta_from_counts(counts: &[Integer], field_size: &Integer, g: usize) -> Result<Vec<Integer>> {
    if counts.len() < g {
        return Err(Error::InconsistentCounts(format!("need {g} counts, got {}", counts.len())));
    }
    // s_k = Q^k + 1 − N_k; k e_k = Σ_{i=1}^k (−1)^(i−1) e_{k−i} s_i
    let s: Vec<Integer> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| Integer::from(field_size.pow(i as u32 + 1)) + 1u32 - c)
        .collect();
    let mut e = vec![Integer::from(1)];
    for k in 1..=g {
        let mut acc = Integer::new();
        for i in 1..=k {
            let t = Integer::from(&e[k - i] * &s[i - 1]);
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        if !acc.is_divisible_u(k as u32) {
            return Err(Error::InconsistentCounts(format!(
                "e_{k} = {acc}/{k} is not an integer"
            )));
        }
        e.push(acc / k as u32);
    }
    let mut a: Vec<Integer> = e
        .into_iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 1 { -x } else { x })
        .collect();
    for i in (0..g).rev() {
        a.push(Integer::from(field_size.pow((g - i) as u32)) * &a[i]);
    }
    if counts.len() > g {
        let back = crate::zeta::counts_from_lpolynomial(&a, field_size, counts.len());
        if back != counts {
            return Err(Error::InconsistentCounts(format!(
                "counts {counts:?} do not come from a genus-{g} L-polynomial"
            )));
        }
    }
    Ok(a)
}
