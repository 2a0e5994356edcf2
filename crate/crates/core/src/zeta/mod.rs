//! Specialise the cached family at a parameter and read off
//! the zeta function of the fibre.

pub mod lpoly;
pub mod norm;
pub mod specialize;

pub use lpoly::{counts_from_lpolynomial, functional_equation_holds, hasse_weil_holds, lpolynomial, sharp_weil_holds};
pub use norm::{norm_product, norm_product_naive};
pub use specialize::{build_specialization, specialize_frobenius, QqnMatrix, SpecializationContext};

use crate::arith::ff::Fqn;
use crate::deformation::{DeformationCache, StageTiming};
use crate::error::{Error, Result};
use rug::ops::Pow;
use rug::Integer;
use std::time::Instant;

/// `Z(t) = P(t) / ((1 − t)(1 − Q t))` for a fibre over a field with `Q`
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFunction {
    /// `a_0..a_{2g}` with `P(t) = Σ a_i t^i`.
    pub numerator: Vec<Integer>,
    pub field_size: Integer,
}

impl ZetaFunction {
    /// The two linear factors of the denominator, each as `[1, −c]`.
    pub fn denominator(&self) -> [[Integer; 2]; 2] {
        [
            [Integer::from(1), Integer::from(-1)],
            [Integer::from(1), Integer::from(-&self.field_size)],
        ]
    }

    pub fn genus(&self) -> usize {
        (self.numerator.len() - 1) / 2
    }

    /// `#X(F_{Q^k})` for `k = 1..=kmax`.
    pub fn counts(&self, kmax: usize) -> Vec<Integer> {
        counts_from_lpolynomial(&self.numerator, &self.field_size, kmax)
    }

    /// The zeta function of the same curve over `F_{Q^r}`.
    pub fn base_change(&self, r: usize) -> Result<ZetaFunction> {
        if r == 0 {
            return Err(Error::InvalidInput("base change degree must be at least 1".into()));
        }
        let g = self.genus();
        let all = self.counts(r * 2 * g);
        let counts: Vec<Integer> = all.into_iter().skip(r - 1).step_by(r).collect();
        let field_size = Integer::from((&self.field_size).pow(r as u32));
        let numerator = crate::oracle::zeta_from_counts(&counts, &field_size, g)?;
        Ok(ZetaFunction { numerator, field_size })
    }

    /// `#Jac(F_Q) = P(1)`.
    pub fn jacobian_order(&self) -> Integer {
        self.numerator.iter().sum()
    }
}

/// The full outcome for one parameter.
#[derive(Clone, Debug)]
pub struct ZetaResult {
    /// Effective extension degree of `F_q(γ̄)` over `F_q`.
    pub n: usize,
    pub zeta: ZetaFunction,
    /// `#X(F_{Q^k})` for `k = 1..=2g`.
    pub counts: Vec<Integer>,
    /// `F(γ)` over `Q_{q^n}`.
    pub frobenius: QqnMatrix,
    /// `𝓕 = F^(σ^(an−1)) ⋯ F`.
    pub norm: QqnMatrix,
    pub timings: Vec<StageTiming>,
}

impl ZetaResult {
    pub fn coefficients(&self) -> &[Integer] {
        &self.zeta.numerator
    }
    pub fn point_count(&self) -> &Integer {
        &self.counts[0]
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZetaOptions {
    /// Work in the basis `X^i dX/√Q³`; needs a cache built with it.
    pub variant_basis: bool,
    /// Multiply the `a n` conjugates one at a time instead of doubling.
    pub naive_norm: bool,
}

/// Packages `P(t)`, checks the functional equation and the Hasse–Weil
/// bounds, and derives the counts over the first `2g` extensions.
pub fn zeta_assemble(coeffs: Vec<Integer>, p: u64, field_exp: usize) -> Result<(ZetaFunction, Vec<Integer>)> {
    let field_size = Integer::from(p).pow(field_exp as u32);
    if coeffs.len() % 2 != 1 || coeffs[0] != 1 {
        return Err(Error::Invariant("L-polynomial must have odd length and a_0 = 1".into()));
    }
    if !functional_equation_holds(&coeffs, &field_size) {
        return Err(Error::Invariant(format!("functional equation fails for {coeffs:?}")));
    }
    if !sharp_weil_holds(&coeffs, &field_size) {
        return Err(Error::Invariant(format!("{coeffs:?} violates |a_i| <= binom(2g, i) q^(i/2)")));
    }
    let g = (coeffs.len() - 1) / 2;
    let zeta = ZetaFunction {
        numerator: coeffs,
        field_size,
    };
    let counts = zeta.counts(2 * g);
    if !hasse_weil_holds(&counts, &zeta.field_size, g) {
        return Err(Error::Invariant(format!("point counts {counts:?} violate the Weil bounds")));
    }
    Ok((zeta, counts))
}

/// The zeta function of the fibre at `γ̄ ∈ field`, where `field = F_q[y]/ψ̄`.
pub fn zeta_for_parameter(
    cache: &DeformationCache,
    field: &Fqn,
    gamma_bar: &[Vec<u64>],
    opts: &ZetaOptions,
) -> Result<ZetaResult> {
    let mut timings = Vec::new();
    let mut timed = |stage: &'static str, t: Instant| {
        timings.push(StageTiming {
            stage,
            elapsed: t.elapsed(),
        })
    };
    let t = Instant::now();
    let ctx = build_specialization(cache, field, gamma_bar)?;
    timed("γ", t);
    let t = Instant::now();
    let f = specialize_frobenius(cache, &ctx, opts.variant_basis)?;
    timed("F(γ)", t);
    let t = Instant::now();
    let pr = &cache.profile;
    let m = pr.a * ctx.n;
    let norm = if opts.naive_norm {
        norm_product_naive(&ctx.qqn, &f, m)?
    } else {
        norm_product(&ctx.qqn, &f, m)?
    };
    timed("𝓕", t);
    let t = Instant::now();
    let pm = ctx.qqn.qq().pm();
    let traces = lpoly::power_traces(&ctx.qqn, &norm, 2 * pr.g, pr.n0)?;
    let coeffs = lpolynomial(pm, &traces, pr.g, pr.n0, m)?;
    let (zeta, counts) = zeta_assemble(coeffs, pr.p, m)?;
    timed("P(t)", t);
    Ok(ZetaResult {
        n: ctx.n,
        zeta,
        counts,
        frobenius: f,
        norm,
        timings,
    })
}
