mod common;

use common::*;
use famzeta_core::arith::ff::{find_irreducible, Ext, FiniteField};
use famzeta_core::cohomology::CurveFamily;
use famzeta_core::deformation::{precompute, DeformationCache, PrecomputeOptions};
use famzeta_core::oracle::{zeta_from_counts, FibreCounter};
use famzeta_core::zeta::specialize::mat_mul;
use famzeta_core::zeta::{
    counts_from_lpolynomial, functional_equation_holds, hasse_weil_holds, norm_product, norm_product_naive,
    sharp_weil_holds, zeta_assemble, zeta_for_parameter, QqnMatrix, ZetaFunction, ZetaOptions, ZetaResult,
};
use famzeta_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Integer;

fn ints(xs: &[i64]) -> Vec<Integer> {
    xs.iter().map(|&x| Integer::from(x)).collect()
}

fn run(cache: &DeformationCache, n: usize, gamma: &[u64]) -> famzeta_core::Result<ZetaResult> {
    let fq = cache.family.fq();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, n)).unwrap();
    let mut gb: Vec<Vec<u64>> = gamma.iter().map(|&c| fq.from_prime(c)).collect();
    gb.resize(n, fq.zero());
    zeta_for_parameter(cache, &field, &gb, &ZetaOptions::default())
}

#[test]
fn counts_from_p() {
    let z = ZetaFunction {
        numerator: ints(&[1, 2, 5]),
        field_size: Integer::from(5),
    };
    assert_eq!(z.counts(2), ints(&[8, 32]));
    assert_eq!(z.genus(), 1);
    assert_eq!(z.jacobian_order(), 8);
    let z2 = z.base_change(2).unwrap();
    assert_eq!(z2.numerator, ints(&[1, 6, 25]));
    assert_eq!(z2.field_size, 25);
    assert_eq!(z2.counts(1), ints(&[32]));
    assert!(z.base_change(0).is_err());
}

#[test]
fn assemble_checks_invariants() {
    let (z, counts) = zeta_assemble(ints(&[1, 2, 5]), 5, 1).unwrap();
    assert_eq!(z.field_size, 5);
    assert_eq!(counts, ints(&[8, 32]));
    assert!(zeta_assemble(ints(&[1, 2, 6]), 5, 1).is_err());
    assert!(zeta_assemble(ints(&[1, 5, 5]), 5, 1).is_err());
    assert!(zeta_assemble(ints(&[2, 2, 10]), 5, 1).is_err());
    assert!(functional_equation_holds(&ints(&[1, 3, 7, 9, 9]), &Integer::from(3)));
    assert!(sharp_weil_holds(&ints(&[1, 3, 7, 9, 9]), &Integer::from(3)));
    assert!(!sharp_weil_holds(&ints(&[1, 5, 5]), &Integer::from(5)));
    assert!(hasse_weil_holds(&ints(&[8, 32]), &Integer::from(5), 1));
    assert!(!hasse_weil_holds(&ints(&[11]), &Integer::from(5), 1));
}

#[test]
fn doubling_norm_equals_naive_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, a, n) in [(3u64, 1usize, 3usize), (5, 1, 1), (3, 2, 2), (5, 2, 3), (3, 1, 7)] {
        let qq = qq_context(p, a, 20, 8);
        let qqn = qqn_context(&qq, n);
        let f: QqnMatrix = (0..3).map(|_| (0..3).map(|_| rand_qqn(&mut rng, &qqn)).collect()).collect();
        let m = a * n;
        let fast = norm_product(&qqn, &f, m).unwrap();
        let slow = norm_product_naive(&qqn, &f, m).unwrap();
        for (x, y) in fast.iter().flatten().zip(slow.iter().flatten()) {
            assert!(qqn.eq_mod(x, y, 20), "p = {p}, a = {a}, n = {n}");
        }
    }
}

#[test]
fn pipeline_examples_and_determinants() {
    let fam5 = CurveFamily::legendre(5).unwrap();
    let cache5 = precompute(&fam5, 2, &PrecomputeOptions::default()).unwrap();
    let z = run(&cache5, 1, &[0]).unwrap();
    assert_eq!(z.coefficients(), &ints(&[1, 2, 5])[..]);
    assert_eq!(z.point_count(), &Integer::from(8));

    let fam3 = CurveFamily::legendre(3).unwrap();
    let cache3 = precompute(&fam3, 2, &PrecomputeOptions::default()).unwrap();
    assert_eq!(run(&cache3, 1, &[0]).unwrap().coefficients(), &ints(&[1, 0, 3])[..]);

    // det 𝓕 = p^(g a n) on a degree-2 parameter.
    let z = run(&cache3, 2, &[0, 1]).unwrap();
    assert_eq!(z.n, 2);
    let qqn = {
        let fq = fam3.fq();
        let field = Ext::new(fq.clone(), find_irreducible(&fq, 2)).unwrap();
        famzeta_core::zeta::build_specialization(&cache3, &field, &[fq.zero(), fq.one()]).unwrap().qqn
    };
    let nm = &z.norm;
    let det = qqn.sub(&qqn.mul(&nm[0][0], &nm[1][1]).unwrap(), &qqn.mul(&nm[0][1], &nm[1][0]).unwrap());
    let slack = 8;
    assert!(qqn.eq_mod(&det, &qqn.from_qq(&qqn.qq().from_int(9)), cache3.profile.nb - slack));
    // 𝓕 = F^σ F for a n = 2.
    let fs = famzeta_core::zeta::specialize::mat_frobenius(&qqn, &z.frobenius, 1).unwrap();
    let prod = mat_mul(&qqn, &fs, &z.frobenius).unwrap();
    for (x, y) in prod.iter().flatten().zip(nm.iter().flatten()) {
        assert!(qqn.eq_mod(x, y, cache3.profile.nb - slack));
    }
}

#[test]
fn refusals() {
    let fam = CurveFamily::legendre(3).unwrap();
    let cache = precompute(&fam, 1, &PrecomputeOptions::default()).unwrap();
    assert!(matches!(run(&cache, 1, &[1]), Err(Error::BadParameter)));
    assert!(matches!(run(&cache, 1, &[2]), Err(Error::BadParameter)));
    assert!(matches!(run(&cache, 2, &[0, 1]), Err(Error::CacheTooSmall { needed: 2, available: 1 })));
}

#[test]
fn subfield_parameter_is_specialised_over_its_own_field() {
    let fam = CurveFamily::legendre(5).unwrap();
    let cache = precompute(&fam, 1, &PrecomputeOptions::default()).unwrap();
    // γ̄ = 3 inside F_25 needs only the degree-1 cache.
    let z = run(&cache, 2, &[3]).unwrap();
    assert_eq!(z.n, 1);
    let fq = fam.fq();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, 2)).unwrap();
    let gb = vec![fq.from_prime(3), fq.zero()];
    let over25 = FibreCounter::for_parameter(&fam, &field, &gb, 1).unwrap().count(u64::MAX).unwrap();
    let z2 = z.zeta.base_change(2).unwrap();
    assert_eq!(z2.counts(1)[0], over25.total);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn counts_round_trip(g in 1usize..4, q in prop::sample::select(vec![3u64, 5, 7, 9, 25, 27]), seed in any::<u64>()) {
        let qi = Integer::from(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![Integer::from(1)];
        for i in 1..=g {
            let bound = Integer::from(q).pow(i as u32 / 2 + 1);
            let x = rand_int(&mut rng, &bound) - Integer::from(&bound >> 1u32);
            a.push(x);
        }
        for i in (0..g).rev() {
            a.push(Integer::from((&qi).pow((g - i) as u32)) * &a[i]);
        }
        let counts = counts_from_lpolynomial(&a, &qi, 2 * g);
        prop_assert_eq!(zeta_from_counts(&counts[..g], &qi, g).unwrap(), a.clone());
        prop_assert_eq!(zeta_from_counts(&counts, &qi, g).unwrap(), a);
    }
}
