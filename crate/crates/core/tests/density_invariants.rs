use fibrank_core::arith::{self, gcd};
use fibrank_core::density::{
    generators, heilbronn_lower_bound, is_member, lk_generators, membership, series,
};
use fibrank_core::oracle::nonmultiple_density;
use fibrank_core::rank::fibonacci_cache;
use num_traits::{Signed, ToPrimitive, Zero};

#[test]
fn member_series_are_positive_and_exceed_their_tail() {
    let cache = fibonacci_cache();
    for k in (1..=50u64).filter(|&k| is_member(k).unwrap().member) {
        let s = series(cache, k, 10_000).unwrap();
        assert!(s.partial_sum.is_positive(), "k = {k}");
        assert!(
            s.partial_sum > s.tail_window,
            "k = {k}: {} vs {}",
            s.float_value,
            s.tail_float()
        );
        assert!(s.partial_sum.abs() <= num_rational::BigRational::from_integer(1.into()));
    }
}

#[test]
fn ell_of_products_is_the_lcm_of_ells() {
    let cache = fibonacci_cache();
    for k in 1..=50u64 {
        let lk = cache.ell_of(k).unwrap();
        for d in (1..=1000u64).filter(|&d| arith::mobius(&arith::factor(d)) != 0) {
            let ldk = cache.ell_of(d * k).unwrap();
            assert_eq!(ldk % (d * k), 0);
            let ld = cache.ell_of(d).unwrap();
            let joint = cache.ell_of(d / gcd(d, k) * k).unwrap();
            assert_eq!(joint, ld / gcd(ld, lk) * lk, "d = {d}, k = {k}");
            if gcd(d, k) == 1 {
                assert_eq!(ldk, joint);
            }
        }
    }
}

#[test]
fn deeper_series_stay_within_the_tail_window() {
    let cache = fibonacci_cache();
    for k in [1u64, 2, 5, 7, 10, 12, 3, 4] {
        for depth in [1000u64, 2500] {
            let shallow = series(cache, k, depth).unwrap();
            let deep = series(cache, k, 4 * depth).unwrap();
            let moved = (&deep.partial_sum - &shallow.partial_sum).abs();
            assert!(moved <= shallow.tail_window, "k = {k}, depth = {depth}");
        }
    }
}

#[test]
fn heilbronn_bound_is_monotone_and_below_the_measured_density() {
    let cache = fibonacci_cache();
    for k in [1u64, 2, 5] {
        assert_eq!(
            lk_generators(k, 50).unwrap(),
            generators(cache, k, 50).unwrap()
        );
        let mut previous = None;
        for bound in [2u64, 5, 10, 30, 100, 300] {
            let g = generators(cache, k, bound).unwrap();
            let h = heilbronn_lower_bound(&g);
            let measured = nonmultiple_density(&g, 1_000_000).unwrap();
            if let Some(prev) = previous.replace(h.clone()) {
                assert!(h <= prev, "k = {k}, P = {bound}");
            }
            assert!(
                h <= measured,
                "k = {k}, P = {bound}: {} > {}",
                h.to_f64().unwrap(),
                measured.to_f64().unwrap()
            );
        }
    }
    let g = lk_generators(1, 100).unwrap();
    let measured = nonmultiple_density(&g, 100_000).unwrap().to_f64().unwrap();
    assert!(measured >= heilbronn_lower_bound(&g).to_f64().unwrap() - 0.02);
}

#[test]
fn non_members_have_no_generators_and_vanishing_series() {
    let cache = fibonacci_cache();
    for k in [3u64, 4, 6, 8, 9] {
        assert!(!membership(cache, k).unwrap().member);
        assert!(generators(cache, k, 10).is_err());
        assert!(series(cache, k, 20_000).unwrap().float_value.abs() < 1e-3);
    }
    assert!(
        series(cache, 1, 1).unwrap().partial_sum
            == num_rational::BigRational::from_integer(1.into())
    );
    assert!(!series(cache, 3, 1).unwrap().partial_sum.is_zero());
}
