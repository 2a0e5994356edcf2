mod common;

use common::*;
use famzeta_core::arith::{Qq, QqElem};
use famzeta_core::series::{QqMatrix, SeriesMatrix, TruncSeries};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_series<R: Rng>(rng: &mut R, qq: &Qq, trunc: usize, shift: u32) -> TruncSeries {
    let xs: Vec<QqElem> = (0..trunc).map(|_| rand_qq(rng, qq, shift)).collect();
    TruncSeries::from_coeffs(qq, &xs, trunc)
}

fn rand_matrix<R: Rng>(rng: &mut R, qq: &Qq, dim: usize, trunc: usize, shift: u32) -> SeriesMatrix {
    let entries: Vec<TruncSeries> = (0..dim * dim).map(|_| rand_series(rng, qq, trunc, shift)).collect();
    SeriesMatrix::from_entries(qq, dim, &entries).unwrap()
}

/// Random matrix with constant term `I`.
fn rand_unipotent<R: Rng>(rng: &mut R, qq: &Qq, dim: usize, trunc: usize) -> SeriesMatrix {
    let m = rand_matrix(rng, qq, dim, trunc, 0);
    let c0 = m.with_trunc(qq, 1).with_trunc(qq, trunc);
    m.sub(qq, &c0).unwrap().add(qq, &SeriesMatrix::identity(qq, dim, trunc)).unwrap()
}

fn coeffs_of(qq: &Qq, m: &SeriesMatrix) -> Vec<QqMatrix> {
    (0..m.trunc()).map(|k| m.coeff_matrix(qq, k)).collect()
}

fn schoolbook(qq: &Qq, a: &SeriesMatrix, b: &SeriesMatrix) -> Vec<QqMatrix> {
    let (ac, bc) = (coeffs_of(qq, a), coeffs_of(qq, b));
    let d = a.dim();
    let t = a.trunc();
    let mut out = vec![vec![vec![qq.zero(); d]; d]; t];
    for k in 0..t {
        for u in 0..=k {
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        let x = qq.mul(&ac[u][i][l], &bc[k - u][l][j]).unwrap();
                        out[k][i][j] = qq.add(&out[k][i][j], &x);
                    }
                }
            }
        }
    }
    out
}

fn same(qq: &Qq, x: &[QqMatrix], y: &[QqMatrix], prec: u32) -> bool {
    x.iter()
        .flatten()
        .flatten()
        .zip(y.iter().flatten().flatten())
        .all(|(u, v)| qq.eq_mod(u, v, prec))
}

fn is_identity(qq: &Qq, m: &SeriesMatrix, prec: u32) -> bool {
    same(qq, &coeffs_of(qq, m), &coeffs_of(qq, &SeriesMatrix::identity(qq, m.dim(), m.trunc())), prec)
}

#[test]
fn small_examples() {
    let qq = qq_context(5, 1, 20, 4);
    let t = 6;
    let one_minus = TruncSeries::from_coeffs(&qq, &[qq.one(), qq.from_int(-1)], t);
    let one_plus = TruncSeries::from_coeffs(&qq, &[qq.one(), qq.one()], t);
    let prod = one_minus.mul(&qq, &one_plus).unwrap();
    let want = TruncSeries::from_coeffs(&qq, &[qq.one(), qq.zero(), qq.from_int(-1)], t);
    assert_eq!(prod.sub(&qq, &want).unwrap().valuation(&qq), None);
    // (1 − Γ)^(-1) = 1 + Γ + Γ² + …
    let m = SeriesMatrix::from_entries(&qq, 1, &[one_minus]).unwrap();
    let inv = m.newton_invert(&qq).unwrap();
    for k in 0..t {
        assert!(qq.eq_mod(&inv.coeff_matrix(&qq, k)[0][0], &qq.one(), 20));
    }
    let id = SeriesMatrix::identity(&qq, 3, t);
    assert!(is_identity(&qq, &id.newton_invert(&qq).unwrap(), 20));
}

#[test]
fn substitution_examples() {
    // p = 3, χ = x² + 1: x·Γ² ↦ −x·Γ⁶.
    let qq = Qq::new(3, &[1, 0, 1], 10, 2).unwrap();
    let x = qq.make(vec![0.into(), 1.into()], 0);
    let t = 8;
    let s = TruncSeries::from_coeffs(&qq, &[qq.zero(), qq.zero(), x.clone()], t);
    let img = s.substitute_sigma_gamma_p(&qq);
    for k in 0..t {
        let want = if k == 6 { qq.neg(&x) } else { qq.zero() };
        assert!(qq.eq_mod(&img.coeff(&qq, k), &want, 10), "k = {k}");
    }
    // Constants over Q_p are fixed.
    let qp = qq_context(3, 1, 10, 2);
    let c = TruncSeries::constant(&qp, &qp.from_int(7), 5);
    assert_eq!(c.substitute_sigma_gamma_p(&qp), c);
}

#[test]
fn random_product_matches_schoolbook() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, a) in [(3u64, 1usize), (5, 2), (7, 3)] {
        let qq = qq_context(p, a, 25, 10);
        let x = rand_matrix(&mut rng, &qq, 3, 16, 0);
        let y = rand_matrix(&mut rng, &qq, 3, 16, 0);
        assert!(same(&qq, &coeffs_of(&qq, &x.mul(&qq, &y).unwrap()), &schoolbook(&qq, &x, &y), 25));
        // With shifts the product is exact modulo p^(N − s₁ − s₂).
        let x = rand_matrix(&mut rng, &qq, 2, 16, 2);
        let y = rand_matrix(&mut rng, &qq, 2, 16, 3);
        assert!(same(&qq, &coeffs_of(&qq, &x.mul(&qq, &y).unwrap()), &schoolbook(&qq, &x, &y), 20));
    }
}

#[test]
fn inverse_of_a_unipotent_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let qq = qq_context(5, 2, 20, 4);
    let m = rand_unipotent(&mut rng, &qq, 4, 32);
    let d = m.newton_invert(&qq).unwrap();
    assert!(is_identity(&qq, &d.mul(&qq, &m).unwrap(), 20));
    assert!(is_identity(&qq, &m.mul(&qq, &d).unwrap(), 20));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn matrix_ring_axioms(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5]), a in 1usize..3, dim in 1usize..4, t in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qq = qq_context(p, a, 15, 4);
        let x = rand_matrix(&mut rng, &qq, dim, t, 0);
        let y = rand_matrix(&mut rng, &qq, dim, t, 0);
        let z = rand_matrix(&mut rng, &qq, dim, t, 0);
        let lhs = x.mul(&qq, &y).unwrap().mul(&qq, &z).unwrap();
        let rhs = x.mul(&qq, &y.mul(&qq, &z).unwrap()).unwrap();
        prop_assert!(same(&qq, &coeffs_of(&qq, &lhs), &coeffs_of(&qq, &rhs), 15));
        let lhs = x.mul(&qq, &y.add(&qq, &z).unwrap()).unwrap();
        let rhs = x.mul(&qq, &y).unwrap().add(&qq, &x.mul(&qq, &z).unwrap()).unwrap();
        prop_assert!(same(&qq, &coeffs_of(&qq, &lhs), &coeffs_of(&qq, &rhs), 15));
        let id = SeriesMatrix::identity(&qq, dim, t);
        prop_assert!(same(&qq, &coeffs_of(&qq, &x.mul(&qq, &id).unwrap()), &coeffs_of(&qq, &x), 15));
    }

    #[test]
    fn newton_inverse_is_two_sided(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7]), dim in 1usize..4, t in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qq = qq_context(p, 2, 20, 4);
        let m = rand_unipotent(&mut rng, &qq, dim, t);
        let d = m.newton_invert(&qq).unwrap();
        prop_assert!(is_identity(&qq, &d.mul(&qq, &m).unwrap(), 20));
        prop_assert!(is_identity(&qq, &m.mul(&qq, &d).unwrap(), 20));
    }

    #[test]
    fn substitution_is_multiplicative(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5]), t in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qq = qq_context(p, 2, 15, 4);
        let x = rand_matrix(&mut rng, &qq, 2, t, 0);
        let y = rand_matrix(&mut rng, &qq, 2, t, 0);
        let lhs = x.mul(&qq, &y).unwrap().substitute_sigma_gamma_p(&qq);
        let rhs = x.substitute_sigma_gamma_p(&qq).mul(&qq, &y.substitute_sigma_gamma_p(&qq)).unwrap();
        prop_assert!(same(&qq, &coeffs_of(&qq, &lhs), &coeffs_of(&qq, &rhs), 15));
    }

    #[test]
    fn short_inverse_matches_direct_inverse(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7]), t in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qq = qq_context(p, 2, 20, 4);
        let m = rand_unipotent(&mut rng, &qq, 2, t);
        let direct = m.substitute_sigma_gamma_p(&qq).newton_invert(&qq).unwrap();
        let short = m.inverse_sigma_gamma_p(&qq).unwrap();
        prop_assert_eq!(short.trunc(), direct.trunc());
        prop_assert!(same(&qq, &coeffs_of(&qq, &short), &coeffs_of(&qq, &direct), 20));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(seed in any::<u64>(), n in 1usize..5, d1 in 1usize..8, d2 in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let qq = qq_context(3, 2, 15, 4);
        let qqn = qqn_context(&qq, n);
        let t = d1 + d2;
        let s = rand_series(&mut rng, &qq, d1, 0).with_trunc(&qq, t);
        let u = rand_series(&mut rng, &qq, d2, 0).with_trunc(&qq, t);
        let pt = rand_qqn(&mut rng, &qqn);
        let lhs = s.mul(&qq, &u).unwrap().evaluate(&qq, &qqn, &pt).unwrap();
        let rhs = qqn.mul(&s.evaluate(&qq, &qqn, &pt).unwrap(), &u.evaluate(&qq, &qqn, &pt).unwrap()).unwrap();
        prop_assert!(qqn.eq_mod(&lhs, &rhs, 15));
        // Γ ↦ point.
        let gamma = TruncSeries::from_coeffs(&qq, &[qq.zero(), qq.one()], 2);
        prop_assert!(qqn.eq_mod(&gamma.evaluate(&qq, &qqn, &pt).unwrap(), &pt, 15));
    }
}
