use famzeta_core::arith::ff::{find_irreducible, Ext, FiniteField};
use famzeta_core::arith::int::ilog_ceil;
use famzeta_core::arith::Qq;
use famzeta_core::cohomology::connection::connection_matrix;
use famzeta_core::cohomology::kedlaya::frobenius_shift_bound;
use famzeta_core::cohomology::{kedlaya_frobenius_zero, validate_family, CurveFamily};
use famzeta_core::deformation::ode::{c_residual, f_residual, min_valuation_below, worst_violation};
use famzeta_core::deformation::{
    precompute, solve_connection_ode, working_budget, DeformationCache, PrecisionProfile, PrecomputeOptions,
};
use famzeta_core::series::{SeriesMatrix, TruncSeries};
use famzeta_core::zeta::{build_specialization, specialize_frobenius, zeta_for_parameter, ZetaOptions};
use rug::Integer;

fn legendre_cache(p: u64, n: usize, opts: &PrecomputeOptions) -> DeformationCache {
    precompute(&CurveFamily::legendre(p).unwrap(), n, opts).unwrap()
}

fn with_c() -> PrecomputeOptions {
    PrecomputeOptions {
        keep_c: true,
        ..Default::default()
    }
}

fn working_context(fam: &CurveFamily, pr: &PrecisionProfile) -> Qq {
    Qq::new(fam.p(), fam.chibar(), pr.na, working_budget(pr)).unwrap()
}

fn p_coefficients(cache: &DeformationCache, gamma: &[u64], opts: &ZetaOptions) -> Vec<Integer> {
    let fq = cache.family.fq();
    let n = gamma.len();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, n)).unwrap();
    let gb: Vec<Vec<u64>> = gamma.iter().map(|&c| fq.from_prime(c)).collect();
    zeta_for_parameter(cache, &field, &gb, opts).unwrap().zeta.numerator
}

#[test]
fn c_starts_at_identity_and_respects_its_bounds() {
    let cache = legendre_cache(3, 2, &with_c());
    let pr = &cache.profile;
    let fam = &cache.family;
    let qa = working_context(fam, pr);
    let c = cache.c.as_ref().unwrap();
    assert_eq!(c.trunc(), pr.n_gamma);
    let c0 = c.constant_term(&qa);
    for (i, row) in c0.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert!(qa.eq_mod(x, &qa.from_int(i64::from(i == j)), pr.na));
        }
    }
    assert_eq!(worst_violation(&qa, c, |k| pr.eta * ilog_ceil(3, k as u64 + 1)), None);
    assert!(c.shift() <= pr.eta * ilog_ceil(3, pr.n_gamma as u64));
    let dm = c.inverse_sigma_gamma_p(&qa).unwrap();
    assert_eq!(worst_violation(&qa, &dm, |k| pr.d_bound(k)), None);
    // D(0) F(0) C(0) = F(0).
    let d0 = dm.constant_term(&qa);
    for (i, row) in d0.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert!(qa.eq_mod(x, &qa.from_int(i64::from(i == j)), pr.na - c.shift()));
        }
    }
}

#[test]
fn residuals_vanish_and_perturbations_do_not() {
    let cache = legendre_cache(3, 1, &with_c());
    let pr = &cache.profile;
    let report = cache.residuals.clone().unwrap();
    assert!(report.c_residual_valuation.is_none_or(|v| v >= report.c_required));
    assert!(report.f_residual_valuation.is_none_or(|v| v >= report.f_required));

    let fam = &cache.family;
    let qa = working_context(fam, pr);
    let cert = validate_family(fam, &qa).unwrap();
    let h = connection_matrix(&qa, &cert).unwrap();
    let c = cache.c.as_ref().unwrap();
    let below = pr.n_gamma - 1;
    let v = min_valuation_below(&qa, &c_residual(&qa, c, h.matrix(), cert.r()).unwrap(), below);
    assert!(v.is_none_or(|v| v >= pr.na as i64 - pr.n3 as i64));

    // Any other C̃ with C̃(0) = I fails the equation.
    let mut bump = vec![qa.zero(); 6];
    bump[5] = qa.one();
    let bump = TruncSeries::from_coeffs(&qa, &bump, c.trunc());
    let zero = TruncSeries::zero(&qa, c.trunc());
    let e = SeriesMatrix::from_entries(&qa, 2, &[bump, zero.clone(), zero.clone(), zero]).unwrap();
    let perturbed = c.add(&qa, &e).unwrap();
    let v = min_valuation_below(&qa, &c_residual(&qa, &perturbed, h.matrix(), cert.r()).unwrap(), below);
    assert!(v.is_some_and(|v| v < 5));

    // The Frobenius equation holds for F = D F(0) C.
    let f0 = kedlaya_frobenius_zero(fam, &qa).unwrap();
    let f = c.inverse_sigma_gamma_p(&qa).unwrap().mul_const_right(&qa, &f0).unwrap().mul(&qa, c).unwrap();
    let v = min_valuation_below(&qa, &f_residual(&qa, &f, h.matrix(), cert.r()).unwrap(), below);
    assert!(v.is_none_or(|v| v >= pr.nb as i64));
    assert!(f.shift() <= frobenius_shift_bound(3, 1));
}

#[test]
fn error_matrix_of_c_is_bounded() {
    let fam = CurveFamily::legendre(3).unwrap();
    let pr = PrecisionProfile::compute(3, 1, 1, 1, 1).unwrap();
    let lo = working_context(&fam, &pr);
    let hi = lo.with_prec(pr.na + 10).unwrap();
    let solve = |qq: &Qq| {
        let cert = validate_family(&fam, qq).unwrap();
        let h = connection_matrix(qq, &cert).unwrap();
        solve_connection_ode(qq, h.matrix(), cert.r(), pr.n_gamma, pr.c_scale()).unwrap()
    };
    let c_lo = solve(&lo).to_context(&hi);
    let c_hi = solve(&hi);
    let diff = c_hi.sub(&hi, &c_lo).unwrap();
    let slack = 10;
    for k in 0..pr.n_gamma {
        if let Some(v) = diff.coeff_valuation(&hi, k) {
            let allowed = (2 * pr.eta + 1) * ilog_ceil(3, k as u64 + 1) + slack;
            assert!(
                v >= pr.na as i64 - allowed as i64,
                "k = {k}: ord = {v}, N_a = {}, allowed loss {allowed}",
                pr.na
            );
        }
    }
}

#[test]
fn r_m_f_is_a_polynomial() {
    let base = legendre_cache(3, 1, &PrecomputeOptions::default());
    let wide = legendre_cache(
        3,
        1,
        &PrecomputeOptions {
            extra_truncation: 50,
            ..Default::default()
        },
    );
    let qq = &base.qq;
    let ng = base.profile.n_gamma;
    assert_eq!(ng, (2 * base.profile.nb as usize + 5) * 10 * 3 + 1);
    assert_eq!(wide.rmf.trunc(), ng + 50);
    for k in 0..ng {
        assert_eq!(base.rmf.coeff_matrix(qq, k), wide.rmf.coeff_matrix(qq, k), "k = {k}");
    }
    for k in ng..ng + 50 {
        assert_eq!(wide.rmf.coeff_valuation(qq, k), None, "k = {k}");
    }
}

#[test]
fn base_point_and_zero_specialisation() {
    let cache = legendre_cache(5, 2, &PrecomputeOptions::default());
    assert!(cache.check_base_point().unwrap());
    let qq = &cache.qq;
    let fq = cache.family.fq();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, 1)).unwrap();
    let ctx = build_specialization(&cache, &field, &[fq.zero()]).unwrap();
    assert_eq!(ctx.n, 1);
    let f = specialize_frobenius(&cache, &ctx, false).unwrap();
    for (row, frow) in f.iter().zip(&cache.f0) {
        for (x, y) in row.iter().zip(frow) {
            let x0 = ctx.qqn.coeff(x, 0);
            assert!(qq.eq_mod(&ctx.qqn.qq().to_context(&x0, qq), y, qq.prec()));
        }
    }
    let fb = frobenius_shift_bound(5, 1);
    assert!(cache.f0.iter().flatten().all(|x| x.shift() <= fb));
}

#[test]
fn variant_basis_gives_the_same_zeta_function() {
    let plain = legendre_cache(5, 1, &PrecomputeOptions::default());
    let variant = legendre_cache(
        5,
        1,
        &PrecomputeOptions {
            variant_basis: true,
            ..Default::default()
        },
    );
    let opts = ZetaOptions {
        variant_basis: true,
        ..Default::default()
    };
    for g in [0u64, 3, 4] {
        assert_eq!(p_coefficients(&plain, &[g], &ZetaOptions::default()), p_coefficients(&variant, &[g], &opts));
    }
    // The plain cache has no change of basis.
    let fq = plain.family.fq();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, 1)).unwrap();
    assert!(zeta_for_parameter(&plain, &field, &[fq.zero()], &opts).is_err());
}

#[test]
fn heuristic_m_agrees_with_the_proven_value() {
    let proven = legendre_cache(3, 2, &PrecomputeOptions::default());
    let heuristic = legendre_cache(
        3,
        2,
        &PrecomputeOptions {
            heuristic_m: true,
            ..Default::default()
        },
    );
    assert!(heuristic.profile.m < proven.profile.m);
    for g in [[0u64, 1], [1, 1], [2, 2]] {
        assert_eq!(
            p_coefficients(&proven, &g, &ZetaOptions::default()),
            p_coefficients(&heuristic, &g, &ZetaOptions::default())
        );
    }
}

#[test]
fn precompute_is_deterministic() {
    let a = legendre_cache(3, 1, &PrecomputeOptions::default());
    let b = legendre_cache(3, 1, &PrecomputeOptions::default());
    assert_eq!(a.rmf, b.rmf);
    assert_eq!(a.f0, b.f0);
    assert_eq!(a.r, b.r);
}
