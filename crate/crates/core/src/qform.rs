//! Exact optimization of the moment quadratic form.
//!
//! For the bilinear form `<f, g> = sum_j (j - rho) f(j) g(j) p(j)` over a
//! Poisson density with mean lambda, the form on polynomial coefficient
//! vectors is `Q_a = sum a_i a_j c_(i+j)` with
//! `c_m = mu_(m+1)(lambda) - rho mu_m(lambda)`. Maximizing `Q` over monic
//! vectors reduces to a Hankel determinant ratio `D_k / D_(k-1)`, and the
//! determinants collapse to generalized Laguerre polynomials, which is where
//! the smallest-zero machinery takes over.
//!
//! Everything in this module is exact rational arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::laguerre::LaguerrePoly;
use crate::poisson::poisson_moment;
use crate::rat::{binomial_u128, factorial, rational_det, superfactorial, Rat};
use crate::tuples::rat_to_f64;
use crate::{Error, Result};

/// Poisson moments `mu_0 .. mu_upto` evaluated at a rational mean.
pub fn moment_values(upto: usize, lambda: &Rat) -> Vec<Rat> {
    (0..=upto)
        .map(|m| poisson_moment(m as u32).eval(lambda))
        .collect()
}

/// Form coefficients `c_m = mu_(m+1) - rho mu_m` for `m = 0 .. 2k`.
pub fn c_values(k: u32, lambda: &Rat, rho: &Rat) -> Vec<Rat> {
    let mu = moment_values(2 * k as usize + 1, lambda);
    (0..=2 * k as usize)
        .map(|m| &mu[m + 1] - rho * &mu[m])
        .collect()
}

/// Hankel determinant `det [c_(i+j)]` for `i, j = 0 .. size-1`; `size = 0`
/// gives 1.
pub fn hankel_det(c: &[Rat], size: usize) -> Rat {
    if size == 0 {
        return Rat::one();
    }
    debug_assert!(c.len() >= 2 * size - 1);
    let m: Vec<Vec<Rat>> = (0..size)
        .map(|i| (0..size).map(|j| c[i + j].clone()).collect())
        .collect();
    rational_det(&m)
}

/// Value of the form `sum a_i a_j c_(i+j)`.
pub fn quadratic_form_value(c: &[Rat], a: &[Rat]) -> Rat {
    let mut q = Rat::zero();
    for (i, ai) in a.iter().enumerate() {
        for (j, aj) in a.iter().enumerate() {
            q += ai * aj * &c[i + j];
        }
    }
    q
}

/// The optimized form at one parameter point.
#[derive(Debug, Clone)]
pub struct MomentForm {
    pub k: u32,
    pub lambda: Rat,
    pub rho: Rat,
    /// `c_0 .. c_2k`
    pub c: Vec<Rat>,
    /// Hankel determinants `D_0 .. D_k`
    pub d: Vec<Rat>,
    /// optimizer coefficients `a_0 .. a_k`, normalized by `a_k = 1`
    pub a: Vec<Rat>,
    /// maximal form value, equal to `D_k / D_(k-1)`
    pub q: Rat,
}

impl MomentForm {
    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.a.iter().map(rat_to_f64).collect()
    }

    pub fn q_f64(&self) -> f64 {
        rat_to_f64(&self.q)
    }
}

/// Solve the orthogonality system and evaluate the form.
///
/// The monic optimizer is the solution of
/// `sum_(j<k) a_j c_(i+j) = -c_(i+k)` for `i = 0 .. k-1` (Cramer's rule),
/// and its form value collapses to `D_k / D_(k-1)`; both routes are computed
/// and compared exactly.
pub fn build_moment_form(k: u32, lambda: &Rat, rho: &Rat) -> Result<MomentForm> {
    if k < 1 {
        return Err(Error::BadParameter("moment form needs k >= 1"));
    }
    if !lambda.is_positive() {
        return Err(Error::BadParameter("lambda must be positive"));
    }
    if rho <= &Rat::from_integer(BigInt::from(k)) {
        return Err(Error::BadParameter("rho must exceed k"));
    }
    let c = c_values(k, lambda, rho);
    let d: Vec<Rat> = (0..=k as usize).map(|j| hankel_det(&c, j + 1)).collect();

    let kk = k as usize;
    let d_km1 = hankel_det(&c, kk); // D_(k-1), the k x k minor
    if d_km1.is_zero() {
        return Err(Error::SingularSystem {
            k,
            lambda: rat_to_f64(lambda),
        });
    }

    let mut a = vec![Rat::zero(); kk + 1];
    a[kk] = Rat::one();
    if kk >= 1 {
        // Cramer on the k x k system M a' = rhs
        let m: Vec<Vec<Rat>> = (0..kk)
            .map(|i| (0..kk).map(|j| c[i + j].clone()).collect())
            .collect();
        let det_m = rational_det(&m);
        debug_assert_eq!(det_m, d_km1);
        for j in 0..kk {
            let mut mj = m.clone();
            for (i, row) in mj.iter_mut().enumerate() {
                row[j] = -c[i + kk].clone();
            }
            a[j] = rational_det(&mj) / &det_m;
        }
    }

    let q = quadratic_form_value(&c, &a);
    // determinant-ratio route must agree exactly
    assert_eq!(
        &q * &d[kk - 1],
        d[kk],
        "form value disagrees with the Hankel ratio"
    );
    Ok(MomentForm {
        k,
        lambda: lambda.clone(),
        rho: rho.clone(),
        c,
        d,
        a,
        q,
    })
}

/// Closed form for the maximal `Q`:
/// `-(k+1)! lambda^k L_(k+1)^(rho-k-1)(lambda) / L_k^(rho-k)(lambda)`.
pub fn q_max_closed_form(k: u32, lambda: &Rat, rho: &Rat) -> Result<Rat> {
    if k < 1 {
        return Err(Error::BadParameter("moment form needs k >= 1"));
    }
    if !lambda.is_positive() {
        return Err(Error::BadParameter("lambda must be positive"));
    }
    let k_rat = Rat::from_integer(BigInt::from(k));
    if rho <= &k_rat {
        return Err(Error::BadParameter("rho must exceed k"));
    }
    let num_poly = LaguerrePoly::new(k as usize + 1, rho - &k_rat - Rat::one())?;
    let den_poly = LaguerrePoly::new(k as usize, rho - &k_rat)?;
    let den = den_poly.eval(lambda);
    if den.is_zero() {
        return Err(Error::ZeroDenominator("laguerre closed form"));
    }
    let mut value = -Rat::from_integer(factorial(k as u64 + 1));
    value *= lambda.pow(k as i32);
    value *= num_poly.eval(lambda);
    value /= den;
    Ok(value)
}

/// Check the Hankel determinant against its Laguerre closed form:
/// `D_(k-1) = (-1)^k 1! 2! ... k! lambda^(k(k-1)/2) L_k^(rho-k)(lambda)`.
pub fn det_closed_form_check(k: u32, lambda: &Rat, rho: &Rat) -> Result<bool> {
    if k < 1 {
        return Err(Error::BadParameter("check needs k >= 1"));
    }
    let k_rat = Rat::from_integer(BigInt::from(k));
    let alpha = rho - &k_rat;
    if alpha <= Rat::from_integer(BigInt::from(-1)) {
        return Err(Error::BadParameter("rho - k must exceed -1"));
    }
    let c = c_values(k, lambda, rho);
    let hankel = hankel_det(&c, k as usize);
    let lag = LaguerrePoly::new(k as usize, alpha)?.eval(lambda);
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let mut closed = Rat::from_integer(BigInt::from(sign) * superfactorial(k as u64));
    closed *= lambda.pow((k * (k - 1) / 2) as i32);
    closed *= lag;
    Ok(hankel == closed)
}

/// Check the derivative-minor determinant identity: with rows
/// `d^i/dx^i x^j` at `x = lambda` for `i = 0..k-1` and columns
/// `j = 0..k, j != h`, the determinant equals
/// `1! 2! ... (k-1)! C(k, h) lambda^(k-h)`.
pub fn f_h_det_check(k: u32, h: u32, lambda: &Rat) -> Result<bool> {
    if k < 1 || h > k {
        return Err(Error::BadParameter("need k >= 1 and 0 <= h <= k"));
    }
    let kk = k as usize;
    let cols: Vec<usize> = (0..=kk).filter(|&j| j != h as usize).collect();
    let mut m = Vec::with_capacity(kk);
    for i in 0..kk {
        let mut row = Vec::with_capacity(kk);
        for &j in &cols {
            if j < i {
                row.push(Rat::zero());
            } else {
                // falling factorial j (j-1) ... (j-i+1) times lambda^(j-i)
                let mut coeff = BigInt::one();
                for t in 0..i {
                    coeff *= BigInt::from((j - t) as u64);
                }
                row.push(Rat::from_integer(coeff) * lambda.pow((j - i) as i32));
            }
        }
        m.push(row);
    }
    let det = rational_det(&m);
    let mut expect = Rat::from_integer(
        superfactorial(k as u64 - 1) * BigInt::from(binomial_u128(k as u64, h as u64)),
    );
    expect *= lambda.pow((k - h) as i32);
    Ok(det == expect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_frac, rat_int};

    #[test]
    fn worked_point_k1() {
        // lambda = 1, rho = 2: moments are 1, 1, 2, 5
        let form = build_moment_form(1, &rat_int(1), &rat_int(2)).unwrap();
        assert_eq!(form.c, vec![rat_int(-1), rat_int(0), rat_int(1)]);
        assert_eq!(form.a, vec![rat_int(0), rat_int(1)]);
        assert_eq!(form.q, rat_int(1));
        assert_eq!(form.d[0], rat_int(-1));
        assert_eq!(form.d[1], rat_int(-1));
        // closed form agrees
        let q = q_max_closed_form(1, &rat_int(1), &rat_int(2)).unwrap();
        assert_eq!(q, rat_int(1));
    }

    #[test]
    fn d0_is_lambda_minus_rho() {
        for (l, r) in [(1i64, 3i64), (2, 5), (7, 9)] {
            let c = c_values(1, &rat_int(l), &rat_int(r));
            assert_eq!(c[0], rat_int(l - r));
        }
    }

    #[test]
    fn hankel_ratio_identity_holds() {
        let form = build_moment_form(2, &rat_frac(1, 2), &rat_int(3)).unwrap();
        assert_eq!(&form.q * &form.d[1], form.d[2]);
        let form = build_moment_form(3, &rat_frac(5, 7), &rat_frac(7, 2)).unwrap();
        assert_eq!(&form.q * &form.d[2], form.d[3]);
    }

    #[test]
    fn orthogonality_of_solution() {
        // residuals sum_j a_j c_(i+j) vanish for i < k
        let form = build_moment_form(3, &rat_frac(3, 4), &rat_frac(10, 3)).unwrap();
        for i in 0..3usize {
            let mut r = Rat::zero();
            for (j, aj) in form.a.iter().enumerate() {
                r += aj * &form.c[i + j];
            }
            assert!(r.is_zero(), "residual {i} nonzero");
        }
    }

    #[test]
    fn closed_forms_agree_on_rationals() {
        for k in 1..=5u32 {
            let lambda = rat_frac(1, 3);
            let rho = rat_int(k as i64) + rat_frac(3, 2);
            assert!(det_closed_form_check(k, &lambda, &rho).unwrap(), "k={k}");
            let direct = build_moment_form(k, &lambda, &rho).unwrap().q;
            let closed = q_max_closed_form(k, &lambda, &rho).unwrap();
            assert_eq!(direct, closed, "k={k}");
        }
        assert!(det_closed_form_check(3, &rat_int(2), &rat_int(7)).unwrap());
        assert!(det_closed_form_check(5, &rat_frac(1, 3), &rat_frac(11, 2)).unwrap());
    }

    #[test]
    fn derivative_minor_identity() {
        assert!(f_h_det_check(1, 0, &rat_int(5)).unwrap());
        for k in 1..=4u32 {
            for h in 0..=k {
                assert!(f_h_det_check(k, h, &rat_int(2)).unwrap(), "k={k} h={h}");
                assert!(f_h_det_check(k, h, &rat_frac(5, 7)).unwrap(), "k={k} h={h}");
            }
        }
    }

    #[test]
    fn rho_domain_is_enforced() {
        assert!(build_moment_form(2, &rat_int(1), &rat_int(2)).is_err());
        assert!(q_max_closed_form(2, &rat_int(1), &rat_frac(3, 2)).is_err());
    }

    #[test]
    fn sign_flips_across_smallest_zero() {
        // k = 1, rho = 2: zero of L_2^(0) at 2 - sqrt(2); the optimized form
        // is negative below, positive above (still below x_1(1, 1) = 2)
        let below = build_moment_form(1, &rat_frac(58, 100), &rat_int(2)).unwrap();
        assert!(below.q.is_negative());
        let above = build_moment_form(1, &rat_frac(60, 100), &rat_int(2)).unwrap();
        assert!(above.q.is_positive());
    }
}
