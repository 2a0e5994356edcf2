use crate::arith::int::{ilog_ceil, log_base, snap};
use crate::error::{Error, Result};

/// Precisions and truncations for one family and a target extension degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionProfile {
    pub p: u64,
    pub a: usize,
    pub g: usize,
    pub kappa: usize,
    pub n: usize,
    pub eta: u32,
    /// `2μ = pg − 4`.
    pub two_mu: i64,
    pub n0: u32,
    pub n3: u32,
    pub n4: u32,
    pub n6: u32,
    pub n8: u32,
    pub nb: u32,
    pub na: u32,
    pub n_gamma: usize,
    pub m: u64,
    /// `M` comes from the experimental short formula.
    pub heuristic_m: bool,
}

fn ceil(x: f64) -> u64 {
    snap(x).ceil() as u64
}
fn floor(x: f64) -> u64 {
    snap(x).floor() as u64
}

impl PrecisionProfile {
    pub fn compute(p: u64, a: usize, g: usize, kappa: usize, n: usize) -> Result<Self> {
        Self::compute_with(p, a, g, kappa, n, false)
    }

    /// With `heuristic_m`, `M = ⌈(3n/2 + 10) p g / 3⌉` replaces the proven
    /// value; results must then be checked after the fact.
    pub fn compute_with(p: u64, a: usize, g: usize, kappa: usize, n: usize, heuristic_m: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("extension degree n must be at least 1".into()));
        }
        if g == 0 || a == 0 {
            return Err(Error::InvalidInput("genus and field degree must be positive".into()));
        }
        let (gf, af, nf) = (g as f64, a as f64, n as f64);
        let lg = log_base(p, gf);
        let eta = ceil(2.0 * gf * lg + gf) as u32;
        let n0 = ceil(nf * gf * af / 2.0 + (2.0 * gf + 1.0) * log_base(p, 2.0)) as u32;
        let n8 = ((a * n) as u64 * floor(lg + 2.0) + floor(2.0 * gf * af * nf * (lg + 3.0))) as u32;
        let nb = n0 + n8;
        let n_gamma = (2 * nb as usize + 5) * (8 * g + 2) * kappa * p as usize + 1;
        let m = if heuristic_m {
            ceil((3.0 * nf / 2.0 + 10.0) * (p as f64) * gf / 3.0)
        } else {
            p * (2 * nb as u64 + 4) + (p - 1) / 2
        };
        let l = ilog_ceil(p, n_gamma as u64);
        let n3 = (2 * eta + 1) * l;
        let n4 = if l == 0 {
            0
        } else {
            ceil((n_gamma as f64).log2() * eta as f64 * (2.0 * (l as f64 - 1.0) + l as f64)) as u32
        };
        let n6 = 3 * eta * l;
        let na = nb + n3 + n4 + n6;
        let two_mu = (p * g as u64) as i64 - 4;
        if 2 * nb as u64 + 4 < p * g as u64 {
            return Err(Error::PrecisionExhausted(format!(
                "2N_b + 4 = {} is below pg = {}",
                2 * nb + 4,
                p * g as u64
            )));
        }
        Ok(PrecisionProfile {
            p,
            a,
            g,
            kappa,
            n,
            eta,
            two_mu,
            n0,
            n3,
            n4,
            n6,
            n8,
            nb,
            na,
            n_gamma,
            m,
            heuristic_m,
        })
    }

    /// `⌈log_p N_Γ⌉`.
    pub fn log_n_gamma(&self) -> u32 {
        ilog_ceil(self.p, self.n_gamma as u64)
    }

    /// Common scale for the coefficients of `C`: `η ⌈log_p N_Γ⌉`.
    pub fn c_scale(&self) -> u32 {
        self.eta * self.log_n_gamma()
    }

    /// Shift bound for `C_k`.
    pub fn c_bound(&self, k: usize) -> u32 {
        self.eta * ilog_ceil(self.p, k as u64 + 1)
    }

    /// Shift bound for the `Γ^k` coefficient of `(C^σ(Γ^p))^(-1)`:
    /// `η ⌈log_p(k/p + 1)⌉`.
    pub fn d_bound(&self, k: usize) -> u32 {
        self.eta * (ilog_ceil(self.p, k as u64 + self.p) - 1)
    }

    /// Bound on `|a_i|` for this profile's field.
    pub fn weil_bound(&self) -> rug::Integer {
        weil_bound(self.p, self.a * self.n, self.g)
    }
}

/// `⌊2^(2g) p^(e g / 2)⌋`, where `p^e` is the field size.
pub fn weil_bound(p: u64, e: usize, g: usize) -> rug::Integer {
    use rug::ops::Pow;
    let pw = rug::Integer::from(p).pow((e * g) as u32) << (4 * g as u32);
    pw.sqrt()
}
