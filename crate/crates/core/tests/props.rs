//! Property tests for the sieve tables and divisor-sum machinery.

use proptest::prelude::*;
use pgl_core::arith::{build_tables, psi, psi_interval};
use pgl_core::divisor::{
    build_lambda_r_window, divisor_count, lambda_r, lambda_r_tuple, psi_r_k,
};
use pgl_core::tuples::{singular_series, TupleSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_matches_direct_enumeration(
        start in 1u64..500_000,
        offset in 0u64..400,
        r in 2.0f64..60.0,
    ) {
        let w = build_lambda_r_window(start, 512, r).unwrap();
        let n = start + offset;
        let direct = lambda_r(n, r);
        prop_assert!((w.value(n).unwrap() - direct).abs() < 1e-11,
            "n={n} r={r}: {} vs {direct}", w.value(n).unwrap());
        prop_assert!(w.value(n).unwrap().abs() <= divisor_count(n) as f64 * r.ln() + 1e-11);
    }

    #[test]
    fn fast_symmetric_route_matches_brute_force(
        n in 1u64..200,
        h in 1u64..=6,
        k in 1u32..=4,
    ) {
        let w = build_lambda_r_window(1, 256, 7.5).unwrap();
        let fast = psi_r_k(n, h, k, &w).unwrap();
        // brute force over all h^k vectors
        let mut idx = vec![1u64; k as usize];
        let mut brute = 0.0;
        'outer: loop {
            let mut distinct = idx.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let mut term = w.log_r().powi((idx.len() - distinct.len()) as i32);
            for &s in &distinct {
                term *= w.value(n + s).unwrap();
            }
            brute += term;
            let mut pos = 0;
            loop {
                if pos == k as usize {
                    break 'outer;
                }
                if idx[pos] < h {
                    idx[pos] += 1;
                    break;
                }
                idx[pos] = 1;
                pos += 1;
            }
        }
        let scale = brute.abs().max(1.0);
        prop_assert!((fast - brute).abs() < 1e-9 * scale, "{fast} vs {brute}");
    }

    #[test]
    fn psi_additivity(n in 1u64..2_000, h in 0u64..500) {
        let t = build_tables(1, 4_096).unwrap();
        let lhs = psi(n + h, &t).unwrap();
        let rhs = psi(n, &t).unwrap() + psi_interval(n, h, &t).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn tuple_shift_covariance(
        n in 1u64..300,
        c in 0u64..200,
        raw in proptest::collection::btree_set(0u64..40, 1..5),
    ) {
        let shifts: Vec<u64> = raw.into_iter().collect();
        let h = TupleSet::new(shifts).unwrap();
        let w = build_lambda_r_window(1, 640, 9.0).unwrap();
        let lhs = lambda_r_tuple(n, &h.translate(c), &w).unwrap();
        let rhs = lambda_r_tuple(n + c, &h, &w).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn singular_series_translation_invariant(
        c in 0u64..60,
        raw in proptest::collection::btree_set(0u64..30, 1..5),
    ) {
        let shifts: Vec<u64> = raw.into_iter().collect();
        let h = TupleSet::new(shifts).unwrap();
        let a = singular_series(&h, 5_000).unwrap();
        let b = singular_series(&h.translate(c), 5_000).unwrap();
        prop_assert_eq!(a.exact_prefix, b.exact_prefix);
        prop_assert!((a.value - b.value).abs() <= 1e-13 * a.value.abs().max(1e-3));
    }
}
