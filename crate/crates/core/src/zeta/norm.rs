//! The norm `𝓕 = F^(σ^(m-1)) ⋯ F^σ F` of a σ-semilinear Frobenius matrix.

use super::specialize::{mat_frobenius, mat_mul, QqnMatrix};
use crate::arith::qqn::Qqn;
use crate::error::Result;

/// `𝓕` for `m = a n` by doubling: with `N(k) = F^(σ^(k-1)) ⋯ F`, uses
/// `N(2c) = N(c)^(σ^c) N(c)` and `N(2c+1) = F^(σ^(2c)) N(2c)` along the bits
/// of `m`.
pub fn norm_product(qqn: &Qqn, f: &QqnMatrix, m: usize) -> Result<QqnMatrix> {
    assert!(m >= 1, "norm over an empty range");
    let bits = usize::BITS - m.leading_zeros();
    let mut acc = f.clone();
    let mut c = 1usize;
    for i in (0..bits - 1).rev() {
        acc = mat_mul(qqn, &mat_frobenius(qqn, &acc, c as u64)?, &acc)?;
        c *= 2;
        if (m >> i) & 1 == 1 {
            acc = mat_mul(qqn, &mat_frobenius(qqn, f, c as u64)?, &acc)?;
            c += 1;
        }
    }
    debug_assert_eq!(c, m);
    Ok(acc)
}

/// The same product accumulated one factor at a time.
pub fn norm_product_naive(qqn: &Qqn, f: &QqnMatrix, m: usize) -> Result<QqnMatrix> {
    assert!(m >= 1, "norm over an empty range");
    let mut acc = f.clone();
    for i in 1..m {
        acc = mat_mul(qqn, &mat_frobenius(qqn, f, i as u64)?, &acc)?;
    }
    Ok(acc)
}
