//! Polynomial products by Kronecker substitution: coefficients are packed
//! into 64-bit aligned slots of one big integer and a single GMP product does
//! the work. Packing needs nonnegative slots, so signed operands are split
//! into positive and negative parts first.

use rug::integer::Order;
use rug::Integer;

/// Below this many coefficient products schoolbook multiplication wins.
const SCHOOLBOOK_LIMIT: usize = 256;

fn max_bits(xs: &[Integer]) -> u32 {
    xs.iter().map(|x| x.significant_bits()).max().unwrap_or(0)
}

fn bits_for(n: usize) -> u32 {
    usize::BITS - n.leading_zeros()
}

/// Slot width in 64-bit limbs for a product of inputs bounded by `ba` and
/// `bb` bits with at most `terms` summands per output coefficient.
pub fn slot_limbs(ba: u32, bb: u32, terms: usize) -> usize {
    let bits = ba as usize + bb as usize + bits_for(terms) as usize + 1;
    bits.div_ceil(64).max(1)
}

/// Packs nonnegative coefficients, lowest degree first.
pub fn pack(xs: &[Integer], limbs: usize) -> Integer {
    let mut buf = vec![0u64; xs.len() * limbs];
    for (i, x) in xs.iter().enumerate() {
        debug_assert!(x.cmp0() != std::cmp::Ordering::Less);
        if x.is_zero() {
            continue;
        }
        let n = x.significant_digits::<u64>();
        debug_assert!(n <= limbs);
        x.write_digits(&mut buf[i * limbs..i * limbs + n], Order::Lsf);
    }
    Integer::from_digits(&buf, Order::Lsf)
}

/// Inverse of [`pack`] for the first `len` slots.
pub fn unpack(x: &Integer, limbs: usize, len: usize) -> Vec<Integer> {
    let digits = x.to_digits::<u64>(Order::Lsf);
    (0..len)
        .map(|i| {
            let lo = i * limbs;
            if lo >= digits.len() {
                Integer::new()
            } else {
                let hi = (lo + limbs).min(digits.len());
                Integer::from_digits(&digits[lo..hi], Order::Lsf)
            }
        })
        .collect()
}

fn has_negative(xs: &[Integer]) -> bool {
    xs.iter().any(|x| x.cmp0() == std::cmp::Ordering::Less)
}

/// `(x⁺, x⁻)` with `x = x⁺ − x⁻`, both nonnegative.
fn split_signs(xs: &[Integer]) -> (Vec<Integer>, Vec<Integer>) {
    xs.iter()
        .map(|x| {
            if x.cmp0() == std::cmp::Ordering::Less {
                (Integer::new(), Integer::from(-x))
            } else {
                (x.clone(), Integer::new())
            }
        })
        .unzip()
}

/// Truncated product `a · b mod t^out_len`.
pub fn mul_trunc(a: &[Integer], b: &[Integer], out_len: usize) -> Vec<Integer> {
    let a = &a[..a.len().min(out_len)];
    let b = &b[..b.len().min(out_len)];
    if a.is_empty() || b.is_empty() {
        return vec![Integer::new(); out_len];
    }
    if a.len() * b.len() <= SCHOOLBOOK_LIMIT {
        return schoolbook(a, b, out_len);
    }
    if has_negative(a) || has_negative(b) {
        let (ap, an) = split_signs(a);
        let (bp, bn) = split_signs(b);
        let mut out = mul_nonneg(&ap, &bp, out_len);
        for (o, (x, (y, z))) in out.iter_mut().zip(
            mul_nonneg(&an, &bn, out_len)
                .into_iter()
                .zip(mul_nonneg(&ap, &bn, out_len).into_iter().zip(mul_nonneg(&an, &bp, out_len))),
        ) {
            *o += x;
            *o -= y;
            *o -= z;
        }
        return out;
    }
    mul_nonneg(a, b, out_len)
}

fn mul_nonneg(a: &[Integer], b: &[Integer], out_len: usize) -> Vec<Integer> {
    let limbs = slot_limbs(max_bits(a), max_bits(b), a.len().min(b.len()));
    let pa = pack(a, limbs);
    let pb = pack(b, limbs);
    let prod = pa * pb;
    unpack(&prod, limbs, out_len)
}

pub fn schoolbook(a: &[Integer], b: &[Integer], out_len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); out_len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() || i >= out_len {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= out_len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum of products `Σ_l a_l · b_l`, truncated; used for matrix products so
/// every output entry is unpacked once.
pub fn dot_trunc(a: &[&[Integer]], b: &[&[Integer]], out_len: usize) -> Vec<Integer> {
    assert_eq!(a.len(), b.len());
    let total: usize = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.len().min(out_len) * y.len().min(out_len))
        .sum();
    if total <= SCHOOLBOOK_LIMIT * a.len().max(1) && total <= 4 * SCHOOLBOOK_LIMIT {
        let mut out = vec![Integer::new(); out_len];
        for (x, y) in a.iter().zip(b) {
            for (o, v) in out.iter_mut().zip(schoolbook(x, y, out_len)) {
                *o += v;
            }
        }
        return out;
    }
    if a.iter().chain(b).any(|x| has_negative(x)) {
        let mut out = vec![Integer::new(); out_len];
        for (x, y) in a.iter().zip(b) {
            for (o, v) in out.iter_mut().zip(mul_trunc(x, y, out_len)) {
                *o += v;
            }
        }
        return out;
    }
    let ba = a.iter().map(|x| max_bits(x)).max().unwrap_or(0);
    let bb = b.iter().map(|x| max_bits(x)).max().unwrap_or(0);
    let limbs = slot_limbs(ba, bb, out_len * a.len());
    let packed = Packed::new_pair(a, b, limbs, out_len);
    packed.dot(out_len)
}

/// Operands packed once and reused across many products.
pub struct Packed {
    left: Vec<Integer>,
    right: Vec<Integer>,
    limbs: usize,
}

impl Packed {
    fn new_pair(a: &[&[Integer]], b: &[&[Integer]], limbs: usize, out_len: usize) -> Self {
        Packed {
            left: a.iter().map(|x| pack(&x[..x.len().min(out_len)], limbs)).collect(),
            right: b.iter().map(|x| pack(&x[..x.len().min(out_len)], limbs)).collect(),
            limbs,
        }
    }

    fn dot(&self, out_len: usize) -> Vec<Integer> {
        let mut acc = Integer::new();
        for (x, y) in self.left.iter().zip(&self.right) {
            acc += x * y;
        }
        unpack(&acc, self.limbs, out_len)
    }
}

/// Matrix product of polynomial matrices (row-major, `n x n`), truncated.
/// Each operand entry is packed exactly once.
pub fn matmul_trunc(a: &[Vec<Integer>], b: &[Vec<Integer>], n: usize, out_len: usize) -> Vec<Vec<Integer>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n * n);
    let small = a.iter().chain(b).all(|x| x.len().min(out_len) <= 16);
    if small || a.iter().chain(b).any(|x| has_negative(x)) {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = vec![Integer::new(); out_len];
                for l in 0..n {
                    for (o, v) in acc
                        .iter_mut()
                        .zip(mul_trunc(&a[i * n + l], &b[l * n + j], out_len))
                    {
                        *o += v;
                    }
                }
                out.push(acc);
            }
        }
        return out;
    }
    let ba = a.iter().map(|x| max_bits(x)).max().unwrap_or(0);
    let bb = b.iter().map(|x| max_bits(x)).max().unwrap_or(0);
    let limbs = slot_limbs(ba, bb, out_len * n);
    let pa: Vec<Integer> = a.iter().map(|x| pack(&x[..x.len().min(out_len)], limbs)).collect();
    let pb: Vec<Integer> = b.iter().map(|x| pack(&x[..x.len().min(out_len)], limbs)).collect();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    use rayon::prelude::*;
    cells
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = Integer::new();
            for l in 0..n {
                acc += &pa[i * n + l] * &pb[l * n + j];
            }
            unpack(&acc, limbs, out_len)
        })
        .collect()
}
