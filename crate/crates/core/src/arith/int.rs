//! Small integer helpers shared by every layer.

use rug::Integer;

/// Deterministic primality test for word-sized inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest `e >= 0` with `p^e >= x`.
pub fn ilog_ceil(p: u64, x: u64) -> u32 {
    let mut e = 0;
    let mut acc: u128 = 1;
    while acc < x as u128 {
        acc *= p as u128;
        e += 1;
    }
    e
}

/// Largest `e >= 0` with `p^e <= x`, for `x >= 1`.
pub fn ilog_floor(p: u64, x: u64) -> u32 {
    assert!(x >= 1);
    let mut e = 0;
    let mut acc: u128 = p as u128;
    while acc <= x as u128 {
        acc *= p as u128;
        e += 1;
    }
    e
}

/// p-adic valuation of a nonzero machine integer.
pub fn val_u64(p: u64, mut k: u64) -> u32 {
    assert!(k != 0);
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of `x`, capped at `cap` (zero has valuation `cap`).
pub fn val_capped(p: u64, x: &Integer, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let mut v = 0;
    let mut y = x.clone();
    while v < cap && y.is_divisible_u(p as u32) {
        y.div_exact_u_mut(p as u32);
        v += 1;
    }
    v
}

/// Minimum capped valuation over a slice; stops early on a unit.
pub fn min_val_capped(p: u64, xs: &[Integer], cap: u32) -> u32 {
    let mut best = cap;
    for x in xs {
        if best == 0 {
            break;
        }
        if x.is_zero() {
            continue;
        }
        if !x.is_divisible_u(p as u32) {
            return 0;
        }
        best = best.min(val_capped(p, x, best));
    }
    best
}

/// Reduce into `[0, m)`.
#[inline]
pub fn reduce(x: &mut Integer, m: &Integer) {
    if x.cmp0() == std::cmp::Ordering::Less || *x >= *m {
        x.modulo_mut(m);
    }
}

/// Representative of `x mod m` in `(-m/2, m/2]`.
pub fn centered(x: &Integer, m: &Integer) -> Integer {
    let mut y = Integer::from(x.modulo_ref(m));
    let half = Integer::from(m >> 1);
    if y > half {
        y -= m;
    }
    y
}

/// Centred lift of a residue modulo a small prime.
pub fn centered_u64(x: u64, p: u64) -> i64 {
    let x = x % p;
    if x > p / 2 {
        x as i64 - p as i64
    } else {
        x as i64
    }
}

/// `x mod p` for a word-sized prime.
pub fn mod_u64(x: &Integer, p: u64) -> u64 {
    x.mod_u(p as u32) as u64
}

/// Snap a floating value to the nearest integer when it is within rounding
/// noise of it; used before floor/ceil in the precision formulas.
pub fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

pub fn log_base(p: u64, x: f64) -> f64 {
    x.ln() / (p as f64).ln()
}
