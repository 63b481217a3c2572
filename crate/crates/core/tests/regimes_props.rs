use proptest::prelude::*;

use nl4s::regimes::{
    classify, critical_exponent, working_exponents, Real, RegimeQuery, Verdict,
};

fn dense_queries() -> impl Iterator<Item = RegimeQuery> {
    (1..=6u32).flat_map(|d| {
        (3..=40i64).flat_map(move |nu4| {
            (-32..=32i64).flat_map(move |g8| {
                [1i8, -1].into_iter().map(move |mu| {
                    RegimeQuery::new(d, Real::ratio(nu4, 4) + Real::int(1), Real::ratio(g8, 8), mu)
                })
            })
        })
    })
}

#[test]
fn theta_sign_tracks_criticality_on_a_dense_grid() {
    for q in dense_queries() {
        if q.gamma.eq_tol(Real::ratio(q.d as i64, 2)) {
            continue;
        }
        let rep = working_exponents(&q).unwrap();
        let gc = critical_exponent(q.d, q.nu);
        assert_eq!(rep.theta.gt(Real::int(0)), q.gamma.gt(gc), "{q:?}");
        assert_eq!(rep.theta.eq_tol(Real::int(0)), q.gamma.eq_tol(gc), "{q:?}");
        if let Some((p, qq)) = rep.pq {
            assert!(rep.gamma_pq_check.unwrap().eq_tol(Real::int(0)), "{q:?} -> ({p}, {qq})");
            assert_eq!(rep.admissible_ok, Some(true), "{q:?}");
        }
    }
}

#[test]
fn well_and_ill_posed_ranges_are_disjoint() {
    for q in dense_queries() {
        let v = classify(&q).unwrap().verdict;
        let gc = critical_exponent(q.d, q.nu);
        if v.is_ill_posed() {
            assert!(q.gamma.lt(gc), "{q:?} -> {v:?}");
        }
        if v.is_well_posed() {
            assert!(q.gamma.ge(gc) && q.gamma.ge(Real::int(0)), "{q:?} -> {v:?}");
        }
    }
}

#[test]
fn mass_critical_threshold_is_exact() {
    for d in 1..=8u32 {
        let nu_c = Real::int(1) + Real::ratio(8, d as i64);
        let below = classify(&RegimeQuery::new(d, nu_c - Real::ratio(1, 1000), Real::int(0), -1)).unwrap();
        assert_eq!(below.verdict, Verdict::Global, "d = {d}");
        let at = classify(&RegimeQuery::new(d, nu_c, Real::int(0), -1)).unwrap();
        assert_ne!(at.verdict, Verdict::Global, "d = {d}");
    }
}

proptest! {
    #[test]
    fn every_valid_query_gets_one_verdict(
        d in 1u32..=8,
        nu in 1.01f64..20.0,
        gamma in -6.0f64..6.0,
        mu in prop_oneof![Just(1i8), Just(-1i8)],
    ) {
        let q = RegimeQuery::new(d, nu, gamma, mu);
        let a = classify(&q).unwrap();
        let b = classify(&q).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(!a.conditions.is_empty());
    }
}
