//! Invariants of the public API over random inputs.

use cyclotrace::arithmetic::{gcd, hurwitz_class_number, kronecker, reduce_definite, QuadForm};
use cyclotrace::kloosterman::{kloosterman_int, kloosterman_plus, salie};
use cyclotrace::verify::hurwitz_by_class_number_formula;
use cyclotrace::QSeries;
use proptest::prelude::*;
use rug::Integer;

const P: u32 = 128;

fn divisor_count(c: i64) -> f64 {
    (1..=c).filter(|k| c % k == 0).count() as f64
}

fn series() -> impl Strategy<Value = QSeries<Integer>> {
    (-2i64..3, prop::collection::vec(-20i64..20, 1..10)).prop_map(|(val, cs)| QSeries::new(val, cs.into_iter().map(Integer::from).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kloosterman_is_real_symmetric_and_weil_bounded(m in -30i64..30, n in -30i64..30, c in 1i64..120) {
        let k = kloosterman_int(m, n, c, P).unwrap();
        let k_swap = kloosterman_int(n, m, c, P).unwrap();
        prop_assert!(k.im.abs().to_f64() < 1e-25);
        prop_assert!((k.re.to_f64() - k_swap.re.to_f64()).abs() < 1e-25);
        let g = gcd(gcd(m, n), c) as f64;
        prop_assert!(k.re.abs().to_f64() <= divisor_count(c) * g.sqrt() * (c as f64).sqrt() + 1e-9);
    }

    #[test]
    fn kloosterman_depends_on_residues_only(m in -30i64..30, n in -30i64..30, c in 1i64..60, a in -3i64..3, b in -3i64..3) {
        let k = kloosterman_int(m, n, c, P).unwrap();
        let k2 = kloosterman_int(m + a * c, n + b * c, c, P).unwrap();
        prop_assert!((k.re.to_f64() - k2.re.to_f64()).abs() < 1e-25);
    }

    #[test]
    fn plus_space_sum_matches_salie_factorization(i in 0usize..6, j in 0usize..6, k in 1i64..40) {
        // fundamental d < 0, D > 0 with dD < 0 a discriminant product
        let ds = [-3i64, -4, -7, -8, -11, -15];
        let big = [1i64, 5, 8, 12, 13, 17];
        let (d, big_d) = (ds[i], big[j]);
        let c = 4 * k;
        let kp = kloosterman_plus(d, big_d, c, P).unwrap();
        let s = salie(-1, d, big_d, c, P).unwrap();
        let rhs = s.re.to_f64() * (c as f64).sqrt();
        prop_assert!((kp.re.to_f64() - rhs).abs() < 1e-12 * (1.0 + rhs.abs()), "K⁺ = {}, √c·S = {rhs}", kp.re.to_f64());
    }

    #[test]
    fn reduction_is_canonical(a in 1i64..30, b in -30i64..30, c in 1i64..30, m in prop::sample::select(vec![[1i64, 1, 0, 1], [0, -1, 1, 0], [1, -2, 0, 1], [2, 1, 1, 1], [3, 2, 1, 1]])) {
        let q = QuadForm::new(a, b, c);
        prop_assume!(q.disc() < 0);
        let r = reduce_definite(q).unwrap();
        prop_assert_eq!(r.disc(), q.disc());
        prop_assert!(r.b.abs() <= r.a && r.a <= r.c);
        prop_assert_eq!(reduce_definite(r).unwrap(), r);
        prop_assert_eq!(reduce_definite(q.act([[m[0], m[1]], [m[2], m[3]]])).unwrap(), r);
    }

    #[test]
    fn hurwitz_agrees_with_class_number_formula(k in 1i64..400, r in prop::sample::select(vec![0i64, 3])) {
        let n = 4 * k + r - 4;
        prop_assume!(n > 0);
        prop_assert_eq!(hurwitz_class_number(n).unwrap(), hurwitz_by_class_number_formula(n));
    }

    #[test]
    fn kronecker_is_multiplicative(d in prop::sample::select(vec![-3i64, -4, -7, -8, 5, 8, 12, 13]), a in 1i64..200, b in 1i64..200) {
        prop_assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b));
    }

    #[test]
    fn series_ring_laws(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b).normalized(), b.mul(&a).normalized());
        let lhs = a.mul(&b.add(&c)).normalized();
        let rhs = a.mul(&b).add(&a.mul(&c)).normalized();
        let n = lhs.n_max().min(rhs.n_max());
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }

    #[test]
    fn unit_series_divide_exactly(a in series(), tail in prop::collection::vec(-5i64..5, 0..8), sign in prop::sample::select(vec![1i64, -1])) {
        let mut cs = vec![Integer::from(sign)];
        cs.extend(tail.into_iter().map(Integer::from));
        let u = QSeries::new(0, cs);
        let back = a.mul(&u).div(&u).unwrap();
        let n = back.n_max().min(a.n_max());
        prop_assert_eq!(back.normalized().truncate(n), a.normalized().truncate(n));
    }
}
