//! The family-level computation: precision planning, local solutions of
//! the connection, and the Frobenius matrix `r(Γ)^M F(Γ)` as a polynomial.

pub mod ode;
pub mod precision;

pub use ode::{check_c_valuation, check_d_valuation, solve_connection_ode};
pub use precision::{weil_bound, PrecisionProfile};

use crate::arith::qq::Qq;
use crate::cohomology::connection::h_shift_bound;
use crate::cohomology::kedlaya::frobenius_shift_bound;
use crate::cohomology::{
    connection_matrix, kedlaya_frobenius_zero, validate_family, CurveFamily, DifferentialForm, Reducer,
};
use crate::error::{self, Error, Result};
use crate::series::{QqMatrix, SeriesMatrix, TruncSeries};
use std::time::{Duration, Instant};

/// Version of the logical cache layout.
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecomputeOptions {
    /// Use the short experimental formula for `M`.
    pub heuristic_m: bool,
    /// Also compute the change of basis to `X^i dX/√Q³`.
    pub variant_basis: bool,
    /// Keep `C(Γ)` in the cache.
    pub keep_c: bool,
    /// Plug `C` and `F` back into their differential equations.
    pub residual_checks: bool,
    /// Extra `Γ`-truncation beyond `N_Γ`.
    pub extra_truncation: usize,
}

impl Default for PrecomputeOptions {
    fn default() -> Self {
        PrecomputeOptions {
            heuristic_m: false,
            variant_basis: false,
            keep_c: false,
            residual_checks: true,
            extra_truncation: 0,
        }
    }
}

/// Wall time of one pipeline stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageTiming {
    pub stage: &'static str,
    pub elapsed: Duration,
}

/// Smallest valuations of the residuals of the two differential equations,
/// next to the precision at which they must vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualReport {
    pub c_residual_valuation: Option<i64>,
    pub c_required: i64,
    pub f_residual_valuation: Option<i64>,
    pub f_required: i64,
}

/// Everything needed to specialise the family at any good parameter of
/// degree up to `profile.n`.
#[derive(Clone, Debug)]
pub struct DeformationCache {
    pub family: CurveFamily,
    pub profile: PrecisionProfile,
    /// `Q_q` at precision `N_b`.
    pub qq: Qq,
    /// `r(Γ)` modulo `p^`[`r_precision`].
    pub r: TruncSeries,
    /// `F(0)` modulo `p^(N_b)`.
    pub f0: QqMatrix,
    /// `r(Γ)^M F(Γ)` modulo `(Γ^(N_Γ), p^(N_b))`.
    pub rmf: SeriesMatrix,
    /// `C(Γ)` at precision `N_a`, when requested.
    pub c: Option<SeriesMatrix>,
    /// `r(Γ) T(Γ)`, where row `i` of `T` holds the coordinates of
    /// `X^i dX/√Q³`.
    pub rt: Option<SeriesMatrix>,
    pub residuals: Option<ResidualReport>,
    pub timings: Vec<StageTiming>,
}

/// Shift budget of the working `Q_q` context.
pub fn working_budget(profile: &PrecisionProfile) -> u32 {
    4 * profile.c_scale() + 2 * h_shift_bound(profile.p, profile.g) + 2 * frobenius_shift_bound(profile.p, profile.g) + 16
}

/// Shift budget of the `N_b` context.
pub fn cache_budget(profile: &PrecisionProfile) -> u32 {
    2 * frobenius_shift_bound(profile.p, profile.g) + h_shift_bound(profile.p, profile.g) + 8
}

/// Precision of the cached `r(Γ)`: `N_b` plus the shift bound of `F`.
pub fn r_precision(profile: &PrecisionProfile) -> u32 {
    profile.nb + frobenius_shift_bound(profile.p, profile.g)
}

/// When set, each stage prints its timing to stderr as it finishes.
pub const TRACE_VAR: &str = "FAMZETA_TRACE";

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f()?;
    let elapsed = t.elapsed();
    if std::env::var_os(TRACE_VAR).is_some() {
        eprintln!("{stage}\t{:.3}s", elapsed.as_secs_f64());
    }
    timings.push(StageTiming { stage, elapsed });
    Ok(out)
}

/// `r T` where `T` expresses `X^i dX/√Q³` on the basis `X^i dX/√Q`.
pub fn variant_basis_matrix(qq: &Qq, cert: &crate::cohomology::ResultantCertificate) -> Result<SeriesMatrix> {
    let g = cert.genus();
    let trunc = (8 * g + 2) * cert.kappa() + 2;
    let reducer = Reducer::new(qq, cert, trunc)?;
    let zero = TruncSeries::zero(qq, trunc);
    let r = cert.r().to_context(qq).with_trunc(qq, trunc);
    let mut entries = Vec::with_capacity(4 * g * g);
    for i in 0..2 * g {
        let mut b = vec![zero.clone(); i];
        b.push(r.clone());
        entries.extend(reducer.reduce(DifferentialForm::single(3, b))?);
    }
    SeriesMatrix::from_entries(qq, 2 * g, &entries)
}

/// Everything that depends on the family only, up to `r^M F`.
pub fn precompute(family: &CurveFamily, n: usize, opts: &PrecomputeOptions) -> Result<DeformationCache> {
    let profile = PrecisionProfile::compute_with(family.p(), family.a(), family.genus(), family.kappa(), n, opts.heuristic_m)?;
    let mut timings = Vec::new();
    let g = family.genus();
    let p = family.p();
    let qa = Qq::new(p, family.chibar(), profile.na, working_budget(&profile))?;
    let qb = Qq::new(p, family.chibar(), profile.nb, cache_budget(&profile))?;
    let n_gamma = profile.n_gamma + opts.extra_truncation;

    let cert = timed(&mut timings, "resultant", || validate_family(family, &qa))?;
    let h = timed(&mut timings, "H", || connection_matrix(&qa, &cert))?;
    let scale = profile.c_scale();
    let c = timed(&mut timings, "C", || {
        let c = solve_connection_ode(&qa, h.matrix(), cert.r(), n_gamma, scale)?;
        check_c_valuation(&qa, &profile, &c)?;
        Ok(c)
    })?;
    let dm = timed(&mut timings, "inverse", || {
        let dm = c.inverse_sigma_gamma_p(&qa)?;
        check_d_valuation(&qa, &profile, &dm)?;
        Ok(dm)
    })?;
    // D·ΔF(0)·C loses at most the shifts of D and C, so this precision
    // already pins F(Γ) modulo p^(N_b).
    let f0_prec = (profile.nb + dm.shift() + c.shift() + cache_budget(&profile)).min(profile.na);
    let f0 = timed(&mut timings, "F(0)", || {
        let low = qa.with_prec(f0_prec)?;
        let f0 = kedlaya_frobenius_zero(family, &low)?;
        Ok(f0.iter().map(|row| row.iter().map(|x| low.to_context(x, &qa)).collect()).collect::<QqMatrix>())
    })?;
    let f = timed(&mut timings, "F(Γ)", || {
        let f = dm.mul_const_right(&qa, &f0)?.mul(&qa, &c)?;
        error::budget("F(Γ)", f.shift(), frobenius_shift_bound(p, g))?;
        Ok(f)
    })?;
    let rmf = timed(&mut timings, "r^M F", || {
        let rm = cert.r().with_trunc(&qa, n_gamma).pow(&qa, profile.m)?;
        Ok(f.mul_series(&qa, &rm)?.to_context(&qb))
    })?;

    let residuals = if opts.residual_checks {
        let below = n_gamma.saturating_sub(1);
        let cres = ode::c_residual(&qa, &c, h.matrix(), cert.r())?;
        let fres = ode::f_residual(&qa, &f, h.matrix(), cert.r())?;
        let report = ResidualReport {
            c_residual_valuation: ode::min_valuation_below(&qa, &cres, below),
            c_required: profile.na as i64 - profile.n3 as i64,
            f_residual_valuation: ode::min_valuation_below(&qa, &fres, below),
            f_required: profile.nb as i64 - h.shift() as i64,
        };
        let ok = |v: Option<i64>, req: i64| v.is_none_or(|v| v >= req);
        if !ok(report.c_residual_valuation, report.c_required) {
            return Err(Error::Invariant(format!("residual of r Ċ + C H: {report:?}")));
        }
        if !ok(report.f_residual_valuation, report.f_required) {
            return Err(Error::Invariant(format!("residual of the Frobenius equation: {report:?}")));
        }
        Some(report)
    } else {
        None
    };

    let rt = if opts.variant_basis {
        Some(variant_basis_matrix(&qa, &cert)?.to_context(&qb))
    } else {
        None
    };
    let qr = qb.with_prec(r_precision(&profile))?;
    let r = cert.r().to_context(&qr).with_trunc(&qr, cert.rho() + 1);
    let f0b = f0.iter().map(|row| row.iter().map(|x| qa.to_context(x, &qb)).collect()).collect();
    Ok(DeformationCache {
        family: family.clone(),
        profile,
        qq: qb,
        r,
        f0: f0b,
        rmf,
        c: if opts.keep_c { Some(c) } else { None },
        rt,
        residuals,
        timings,
    })
}

impl DeformationCache {
    /// `r(0)^(-M) (r^M F)(0) = F(0)` modulo `p^(N_b)`.
    pub fn check_base_point(&self) -> Result<bool> {
        let qq = &self.qq;
        let r0 = self.r.coeff(qq, 0);
        let scale = qq.inv(&qq.pow(&r0, self.profile.m)?)?;
        let m0 = self.rmf.constant_term(qq);
        for (row, frow) in m0.iter().zip(&self.f0) {
            for (x, y) in row.iter().zip(frow) {
                if !qq.eq_mod(&qq.mul(x, &scale)?, y, qq.prec()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
