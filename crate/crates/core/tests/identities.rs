//! Exact-identity suite: every assertion here is an equality of rational
//! numbers or integers, with zero tolerance.

use num_traits::{Signed, ToPrimitive};
use pgl_core::laguerre::LaguerrePoly;
use pgl_core::poisson::{
    lambda_power_identity_check, poisson_moment, raise_moment, stirling2,
    surjection_identity_check,
};
use pgl_core::qform::{
    build_moment_form, c_values, det_closed_form_check, f_h_det_check, hankel_det,
    q_max_closed_form, quadratic_form_value,
};
use pgl_core::rat::{rat_from_f64, rat_frac, rat_int, Poly, Rat};
use pgl_core::tuples::{nu_p, subset_parity_identity, TupleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rat {
    let den = rng.gen_range(1..=12i64);
    let num = rng.gen_range(lo * den..=hi * den);
    rat_frac(num, den)
}

#[test]
fn hankel_ratio_and_closed_forms_at_random_rationals() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 1..=6u32 {
        for _ in 0..20 {
            let lambda = random_rational(&mut rng, 1, 6) / rat_int(2); // in (0, 3]
            let rho = rat_int(k as i64) + random_rational(&mut rng, 1, 4) / rat_int(2);
            let form = match build_moment_form(k, &lambda, &rho) {
                Ok(f) => f,
                Err(e) => panic!("singular point hit at k={k}: {e}"),
            };
            // Q equals the Hankel ratio
            assert_eq!(&form.q * &form.d[k as usize - 1], form.d[k as usize]);
            // Hankel determinant equals its Laguerre closed form
            assert!(det_closed_form_check(k, &lambda, &rho).unwrap(), "k={k}");
            // Cramer route equals the closed-form maximum
            let closed = q_max_closed_form(k, &lambda, &rho).unwrap();
            assert_eq!(form.q, closed, "k={k}");
        }
    }
}

#[test]
fn derivative_minor_identity_all_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf0f0);
    for k in 1..=4u32 {
        for h in 0..=k {
            for _ in 0..5 {
                let lambda = random_rational(&mut rng, 1, 9);
                assert!(f_h_det_check(k, h, &lambda).unwrap(), "k={k} h={h}");
            }
        }
    }
}

#[test]
fn stirling_identities() {
    for j in 0..=12 {
        for k in 0..=12 {
            assert!(surjection_identity_check(j, k), "surjection j={j} k={k}");
        }
    }
    for h in 0..=10 {
        assert!(lambda_power_identity_check(h), "power inversion h={h}");
    }
}

#[test]
fn laguerre_derivative_relation_exact() {
    for n in 1..=10usize {
        for alpha in [rat_int(0), rat_frac(1, 2), rat_frac(7, 3), rat_int(5)] {
            let p = LaguerrePoly::new(n, alpha.clone()).unwrap();
            let d = p.derivative();
            let q = LaguerrePoly::new(n - 1, &alpha + rat_int(1)).unwrap();
            for v in 0..n {
                assert_eq!(d[v], -q.coeff_at(v), "n={n} v={v}");
            }
        }
    }
}

#[test]
fn subset_parity_exhaustive() {
    // all tuples with shifts <= 20 and size <= 5, all primes <= 13
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut sets: Vec<Vec<u64>> = vec![vec![]];
    for size in 1..=5usize {
        let mut next = Vec::new();
        for s in sets.iter().filter(|s| s.len() == size - 1) {
            let lo = s.last().map_or(0, |x| x + 1);
            for v in lo..=20 {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        sets.extend(next);
    }
    let mut checked = 0u64;
    for s in &sets {
        if s.is_empty() {
            continue;
        }
        let t = TupleSet::new(s.clone()).unwrap();
        for &p in &primes {
            let lhs = subset_parity_identity(&t, p).unwrap();
            let rhs = t.k() as i64 - nu_p(&t, p).unwrap() as i64;
            assert_eq!(lhs, rhs, "H={s:?} p={p}");
            checked += 1;
        }
    }
    assert!(checked > 100_000, "exhaustive sweep too small: {checked}");
}

#[test]
fn worked_value_regression() {
    // k = 1, lambda = 1, rho = 2
    let form = build_moment_form(1, &rat_int(1), &rat_int(2)).unwrap();
    assert_eq!(form.c, vec![rat_int(-1), rat_int(0), rat_int(1)]);
    assert_eq!(form.a[0], rat_int(0));
    assert_eq!(form.q, rat_int(1));
    assert_eq!(
        q_max_closed_form(1, &rat_int(1), &rat_int(2)).unwrap(),
        rat_int(1)
    );
}

#[test]
fn three_way_moment_agreement() {
    // Stirling polynomial, raising operator, and truncated series
    let mut poly = Poly::one();
    for k in 1..=10u32 {
        poly = raise_moment(&poly);
        assert_eq!(poly, poisson_moment(k), "operator route k={k}");
    }
    // truncated series at floating lambdas
    for k in 0..=10u32 {
        for &lam in &[0.25f64, 1.0, 3.5] {
            let exact = {
                let l = rat_from_f64(lam).unwrap();
                let v = poisson_moment(k).eval(&l);
                v.to_f64().unwrap()
            };
            let mut series = 0.0;
            let mut term = 1.0;
            for j in 0..=80u32 {
                if j > 0 {
                    term *= lam / j as f64;
                }
                series += (j as f64).powi(k as i32) * term;
            }
            series *= (-lam).exp();
            assert!(
                (exact - series).abs() <= 1e-10 * exact.abs().max(1.0),
                "k={k} lambda={lam}: {exact} vs {series}"
            );
        }
    }
}

#[test]
fn maximality_against_random_vectors() {
    // the orthogonal solution maximizes the form among monic vectors while
    // lambda stays inside the certified positivity window
    let mut rng = ChaCha8Rng::seed_from_u64(0xabcd);
    for k in 1..=4u32 {
        let rho = rat_int(k as i64) + rat_int(2);
        let rho_f = k as f64 + 2.0;
        let x1 = pgl_core::laguerre::smallest_zero(k as usize + 1, rho_f - k as f64 - 1.0, 1e-12)
            .unwrap();
        let lambda = rat_from_f64(x1 / 2.0).unwrap();
        let form = build_moment_form(k, &lambda, &rho).unwrap();
        let c = c_values(k, &lambda, &rho);
        for trial in 0..50 {
            let mut b: Vec<Rat> = (0..k).map(|_| random_rational(&mut rng, -3, 3)).collect();
            b.push(rat_int(1));
            let qb = quadratic_form_value(&c, &b);
            assert!(qb <= form.q, "k={k} trial={trial}: {qb} > {}", form.q);
        }
    }
}

#[test]
fn form_sign_changes_at_smallest_zero() {
    for k in 1..=4u32 {
        let rho_f = k as f64 + 1.5;
        let rho = rat_from_f64(rho_f).unwrap();
        let x1 = pgl_core::laguerre::smallest_zero(k as usize + 1, rho_f - k as f64 - 1.0, 1e-12)
            .unwrap();
        let outer =
            pgl_core::laguerre::smallest_zero(k as usize, rho_f - k as f64, 1e-12).unwrap();
        let below = rat_from_f64(x1 * 0.999).unwrap();
        let above = rat_from_f64(x1 * 1.001).unwrap();
        assert!(x1 * 1.001 < outer, "guard: k={k}");
        assert!(
            build_moment_form(k, &below, &rho).unwrap().q.is_negative(),
            "k={k} below"
        );
        assert!(
            build_moment_form(k, &above, &rho).unwrap().q.is_positive(),
            "k={k} above"
        );
    }
}

#[test]
fn hankel_empty_and_first_sizes() {
    let c = c_values(2, &rat_frac(1, 2), &rat_int(3));
    assert_eq!(hankel_det(&c, 0), rat_int(1));
    assert_eq!(hankel_det(&c, 1), c[0]);
}
