use famzeta_core::arith::ff::{find_irreducible, Ext, FiniteField, Fp};
use famzeta_core::cohomology::CurveFamily;
use famzeta_core::oracle::flat::FlatField;
use famzeta_core::oracle::{count_points_naive, zeta_from_counts, FibreCounter, ENUM_CAP_VAR};
use famzeta_core::zeta::counts_from_lpolynomial;
use famzeta_core::Error;
use proptest::prelude::*;
use rug::Integer;

fn counter(fam: &CurveFamily, gamma: u64, k: usize) -> FibreCounter {
    let fq = fam.fq();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, 1)).unwrap();
    FibreCounter::for_parameter(fam, &field, &[fq.from_prime(gamma)], k).unwrap()
}

fn genus2() -> CurveFamily {
    CurveFamily::new(3, &[0, 1], &[(5, 0, vec![1]), (2, 1, vec![1]), (1, 0, vec![2]), (0, 0, vec![1])]).unwrap()
}

/// `#{(x, y) : y² = f(x)} + 1` over `F_p` by listing the squares.
fn count_by_squares(p: u64, f: &[u64]) -> u64 {
    let mut sq = vec![0u64; p as usize];
    for y in 0..p {
        sq[(y * y % p) as usize] += 1;
    }
    let eval = |x: u64| f.iter().rev().fold(0, |acc, &c| (acc * x + c) % p);
    (0..p).map(|x| sq[eval(x) as usize]).sum::<u64>() + 1
}

#[test]
fn x3_minus_x() {
    assert_eq!(counter(&CurveFamily::legendre(5).unwrap(), 0, 1).count(u64::MAX).unwrap().total, 8);
    let r = counter(&CurveFamily::legendre(3).unwrap(), 0, 1).count(u64::MAX).unwrap();
    assert_eq!((r.total, r.affine, r.field_size), (4, 3, 3));
}

#[test]
fn matches_square_counting_over_prime_fields() {
    let fam = CurveFamily::legendre(7).unwrap();
    for gamma in [0u64, 3, 4, 5, 6] {
        // X³ − γX² + (γ − 1)X
        let f = [0, (gamma + 6) % 7, (7 - gamma) % 7, 1];
        assert_eq!(counter(&fam, gamma, 1).count(u64::MAX).unwrap().total, count_by_squares(7, &f));
    }
}

#[test]
fn table_path_agrees_with_the_l_polynomial() {
    // Y² = X³ − X over F_3 has P(t) = 1 + 3t²; F_{3^11} takes the table path.
    let r = counter(&CurveFamily::legendre(3).unwrap(), 0, 11).count(u64::MAX).unwrap();
    assert_eq!(r.field_size, 177_147);
    let want = counts_from_lpolynomial(&[1.into(), 0.into(), 3.into()], &Integer::from(3), 11);
    assert_eq!(Integer::from(r.total), want[10]);
}

#[test]
fn genus2_zeta_from_counts() {
    let fam = genus2();
    let counts: Vec<Integer> = (1..=4).map(|k| counter(&fam, 0, k).count(u64::MAX).unwrap().total.into()).collect();
    let p = zeta_from_counts(&counts, &Integer::from(3), 2).unwrap();
    let want: Vec<Integer> = [1, 3, 7, 9, 9].iter().map(|&x| Integer::from(x)).collect();
    assert_eq!(p, want);
}

#[test]
fn inconsistent_counts_are_refused() {
    let bad = [Integer::from(4), Integer::from(9)];
    assert!(matches!(
        zeta_from_counts(&bad, &Integer::from(3), 2),
        Err(Error::InconsistentCounts(_))
    ));
    assert!(zeta_from_counts(&bad[..1], &Integer::from(3), 2).is_err());
}

#[test]
fn cap_is_enforced() {
    let c = counter(&CurveFamily::legendre(3).unwrap(), 0, 4);
    assert!(matches!(c.count(80), Err(Error::CapExceeded { cap: 80, .. })));
    assert!(c.count(81).is_ok());
}

#[test]
fn cap_from_environment() {
    let fam = CurveFamily::legendre(3).unwrap();
    let fq = fam.fq();
    let field = Ext::new(fq.clone(), find_irreducible(&fq, 1)).unwrap();
    std::env::set_var(ENUM_CAP_VAR, "26");
    let small = count_points_naive(&fam, &field, &[fq.zero()], 3);
    std::env::remove_var(ENUM_CAP_VAR);
    assert!(matches!(small, Err(Error::CapExceeded { .. })));
    assert!(count_points_naive(&fam, &field, &[fq.zero()], 3).is_ok());
}

#[test]
fn parameter_in_an_extension() {
    // γ̄ a root of y² + 1 over F_3: the fibre is defined over F_9.
    let fam = CurveFamily::legendre(3).unwrap();
    let fp = Fp::new(3).unwrap();
    let fq = fam.fq();
    let field = Ext::new(fq.clone(), vec![fq.one(), fq.zero(), fq.one()]).unwrap();
    let gb = vec![fq.zero(), fq.one()];
    let c1 = FibreCounter::for_parameter(&fam, &field, &gb, 1).unwrap();
    assert_eq!(c1.field().size(), Some(9));
    let total = c1.count(u64::MAX).unwrap().total;
    // Direct count over F_9 = F_3[i]: Q̄ = X³ − iX² + (i − 1)X.
    let f9 = Ext::new(fp.clone(), vec![1, 0, 1]).unwrap();
    let i = vec![0u64, 1];
    let q = |x: &Vec<u64>| {
        let x2 = f9.mul(x, x);
        let x3 = f9.mul(&x2, x);
        let t2 = f9.mul(&i, &x2);
        let t1 = f9.mul(&f9.sub(&i, &f9.one()), x);
        f9.add(&f9.sub(&x3, &t2), &t1)
    };
    let elems: Vec<Vec<u64>> = (0..9).map(|k| vec![k % 3, k / 3]).collect();
    let mut n = 1u64;
    for x in &elems {
        let v = q(x);
        n += elems.iter().filter(|y| f9.mul(y, y) == v).count() as u64;
    }
    assert_eq!(total, n);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn translation_invariance(p in prop::sample::select(vec![3u64, 5, 7]), d in 1usize..4, deg in prop::sample::select(vec![3usize, 5]), seed in prop::collection::vec(0u64..1000, 16), c in prop::collection::vec(0u64..1000, 3)) {
        let fp = Fp::new(p).unwrap();
        let m = find_irreducible(&fp, d);
        let field = FlatField::new(p, &m);
        let mut q: Vec<Vec<u64>> = (0..deg).map(|i| (0..d).map(|j| seed[(i * d + j) % 16] % p).collect()).collect();
        q.push(field.one());
        let shift: Vec<u64> = (0..d).map(|j| c[j] % p).collect();
        let base = FibreCounter::new(field.clone(), q);
        let moved = base.translate(&shift);
        prop_assert_eq!(base.count(u64::MAX).unwrap().total, moved.count(u64::MAX).unwrap().total);
    }
}
