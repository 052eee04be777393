//! Generalized Laguerre polynomials, their smallest zeros, and the gap
//! thresholds those zeros control.
//!
//! Coefficients are exact rationals, so sign evaluations during zero
//! isolation are exact: the bisection bracket is certified rather than
//! floating-point-trusted. Zeros of `L_n^(alpha)` for `alpha > -1` are real,
//! positive, and simple, so the first sign change of the scan brackets the
//! smallest one.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::float;
use crate::rat::{binomial_rat, factorial, rat_from_f64, rat_int, Rat};
use crate::tuples::rat_to_f64;
use crate::{Error, Result};

/// A generalized Laguerre polynomial with exact rational coefficients,
/// `sum_v (-1)^v C(n + alpha, n - v) x^v / v!`.
#[derive(Debug, Clone)]
pub struct LaguerrePoly {
    n: usize,
    alpha: Rat,
    /// coefficient of x^v at index v
    coeffs: Vec<Rat>,
}

impl LaguerrePoly {
    /// Requires `alpha > -1`, the classical range where all zeros are real,
    /// positive, and simple.
    pub fn new(n: usize, alpha: Rat) -> Result<Self> {
        if alpha <= rat_int(-1) {
            return Err(Error::BadParameter("laguerre parameter must exceed -1"));
        }
        let shifted = &alpha + rat_int(n as i64);
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut sign = Rat::one();
        for v in 0..=n {
            let c = binomial_rat(&shifted, (n - v) as u64)
                / Rat::from_integer(factorial(v as u64));
            coeffs.push(&sign * c);
            sign = -sign;
        }
        Ok(LaguerrePoly { n, alpha, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff_at(&self, v: usize) -> Rat {
        self.coeffs.get(v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    /// Derivative; equals the negated polynomial one degree down with the
    /// parameter raised by one.
    pub fn derivative(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.n);
        for v in 1..=self.n {
            out.push(&self.coeffs[v] * rat_int(v as i64));
        }
        out
    }
}

/// Exact evaluation of `L_n^(alpha)` at a rational point.
pub fn laguerre_eval(n: usize, alpha: &Rat, x: &Rat) -> Result<Rat> {
    Ok(LaguerrePoly::new(n, alpha.clone())?.eval(x))
}

/// Smallest zero of `L_n^(alpha)`, to absolute tolerance `tol`.
///
/// The constant term `C(n + alpha, n)` is positive, so the polynomial is
/// positive at 0; the scan walks outward in steps of `max(1, (alpha + 2)/8)`
/// until the first sign change and bisects with exact sign evaluations.
/// Before accepting a bracket, the stretch below it is re-scanned on a finer
/// grid so a step that jumped an even number of zeros cannot slip through.
pub fn smallest_zero(n: usize, alpha: f64, tol: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::BadParameter("degree must be >= 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::BadParameter("tolerance must be positive"));
    }
    let alpha_rat =
        rat_from_f64(alpha).ok_or(Error::BadParameter("laguerre parameter must be finite"))?;
    let poly = LaguerrePoly::new(n, alpha_rat)?;

    // All n zeros lie between the roots of the comparison quadratic
    // x^2 - (4n + 2(alpha+1)) x + (alpha^2 - 1), so width/n bounds the mean
    // zero gap. A scan step of (alpha+2)/8 alone can hop over a pair of
    // zeros once n is large (observed at n = 41), which would anchor the
    // bisection on a later sign change; capping by width/(8n) keeps the
    // step below the gap scale.
    let nf = n as f64;
    let disc = 4.0 * nf * nf + 2.0 * alpha + 2.0 + 4.0 * nf * alpha + 4.0 * nf;
    let width = 2.0 * float::sqrt(disc.max(0.0));
    let step = 1f64
        .max((alpha + 2.0) / 8.0)
        .min((width / (8.0 * nf)).max(1e-3));
    let scan_limit = 8.0 * (4.0 * n as f64 + 2.0 * alpha + 4.0);
    let sign_at = |x: f64| -> i32 {
        let v = poly.eval(&rat_from_f64(x).expect("finite scan point"));
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    };

    let mut lo = 0.0;
    let mut hi = step;
    loop {
        if hi > scan_limit {
            return Err(Error::NoConvergence("smallest-zero scan"));
        }
        match sign_at(hi) {
            0 => return Ok(hi),
            1 => {
                lo = hi;
                hi += step;
            }
            _ => break,
        }
    }
    // guard pass: confirm positivity on a finer grid below the bracket and
    // pull the bracket to the first sign change inside it, so a coarse step
    // that cleared an even number of zeros cannot mislead the bisection
    let fine = 64;
    if lo > 0.0 {
        let mut prev = 0.0;
        for i in 1..=fine {
            let x = lo * i as f64 / fine as f64;
            match sign_at(x) {
                0 => return Ok(x),
                1 => prev = x,
                _ => {
                    hi = x;
                    break;
                }
            }
        }
        if hi < lo {
            lo = prev;
        }
    }
    {
        let (a, b) = (lo, hi);
        for i in 1..=fine {
            let x = a + (b - a) * i as f64 / fine as f64;
            match sign_at(x) {
                0 => return Ok(x),
                1 => lo = x,
                _ => {
                    hi = x;
                    break;
                }
            }
        }
    }

    let mut iterations = 0;
    while hi - lo > tol {
        iterations += 1;
        if iterations > 10_000 {
            return Err(Error::NoConvergence("smallest-zero bisection"));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // f64 resolution reached
        }
        match sign_at(mid) {
            0 => return Ok(mid),
            1 => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smaller root of the comparison quadratic
/// `x^2 - (4n + 2(alpha + 1)) x + (alpha^2 - 1)`; tracks the smallest
/// Laguerre zero asymptotically.
pub fn sturm_lower_root(n: u64, alpha: f64) -> Result<f64> {
    if alpha <= -1.0 {
        return Err(Error::BadParameter("laguerre parameter must exceed -1"));
    }
    let nf = n as f64;
    let disc = 4.0 * nf * nf + 2.0 * alpha + 2.0 + 4.0 * nf * alpha + 4.0 * nf;
    // disc = 4n(n + alpha + 1) + 2(alpha + 1) > 0 for alpha > -1
    debug_assert!(disc >= 0.0);
    Ok(2.0 * nf + alpha + 1.0 - float::sqrt(disc))
}

/// Threshold constant `(sqrt(r) - 1/2)^2`: intervals shorter than this
/// multiple of the average gap must contain r+1 primes infinitely often.
pub fn unconditional_gap_threshold(r: u32) -> Result<f64> {
    if r < 1 {
        return Err(Error::BadParameter("r must be >= 1"));
    }
    let s = float::sqrt(r as f64) - 0.5;
    Ok(s * s)
}

/// Same threshold under a level of distribution `theta`:
/// `(sqrt(r) - sqrt(theta/2))^2`.
pub fn eh_gap_threshold(r: u32, theta: f64) -> Result<f64> {
    if r < 1 {
        return Err(Error::BadParameter("r must be >= 1"));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::BadParameter("level of distribution must be in (0, 1]"));
    }
    let s = float::sqrt(r as f64) - float::sqrt(theta / 2.0);
    Ok(s * s)
}

/// Detection threshold at truncation order k:
/// `theta * x_1(k + 1, rho/theta - k - 1)`, the lambda above which the
/// optimized moment form turns positive.
pub fn truncated_gap_threshold(k: u32, r: u32, theta: f64, rho: f64) -> Result<f64> {
    if r < 1 {
        return Err(Error::BadParameter("r must be >= 1"));
    }
    if !(rho > r as f64) {
        return Err(Error::BadParameter("rho must exceed r"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::BadParameter("theta must be in (0, 1)"));
    }
    let alpha = rho / theta - k as f64 - 1.0;
    if alpha <= -1.0 {
        return Err(Error::BadParameter("rho/theta must exceed k"));
    }
    Ok(theta * smallest_zero(k as usize + 1, alpha, 1e-12)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_frac;

    #[test]
    fn linear_and_quadratic_coefficients() {
        // L_1^(a)(x) = (a + 1) - x
        let p = LaguerrePoly::new(1, rat_frac(5, 2)).unwrap();
        assert_eq!(p.coeff_at(0), rat_frac(7, 2));
        assert_eq!(p.coeff_at(1), rat_int(-1));
        // constant term C(n + a, n) > 0, leading (-1)^n / n!
        let p = LaguerrePoly::new(4, rat_frac(1, 3)).unwrap();
        assert!(p.coeff_at(0).is_positive());
        assert_eq!(p.coeff_at(4), rat_frac(1, 24));
        let p = LaguerrePoly::new(3, rat_frac(1, 3)).unwrap();
        assert_eq!(p.coeff_at(3), rat_frac(-1, 6));
    }

    #[test]
    fn classic_point_value() {
        // L_2^(0)(1) = 1 - 2 + 1/2 = -1/2
        let v = laguerre_eval(2, &rat_int(0), &rat_int(1)).unwrap();
        assert_eq!(v, rat_frac(-1, 2));
    }

    #[test]
    fn derivative_lowers_degree_and_raises_parameter() {
        for n in 1..=10usize {
            let alpha = rat_frac(3, 4);
            let p = LaguerrePoly::new(n, alpha.clone()).unwrap();
            let d = p.derivative();
            let q = LaguerrePoly::new(n - 1, &alpha + rat_int(1)).unwrap();
            for v in 0..n {
                assert_eq!(d[v], -q.coeff_at(v), "n={n} v={v}");
            }
        }
    }

    #[test]
    fn smallest_zero_linear_is_exact() {
        for &alpha in &[0.0, 0.5, 3.25, 10.0] {
            let z = smallest_zero(1, alpha, 1e-12).unwrap();
            assert!((z - (alpha + 1.0)).abs() < 1e-10, "alpha={alpha}");
        }
    }

    #[test]
    fn smallest_zero_quadratic() {
        let z = smallest_zero(2, 0.0, 1e-12).unwrap();
        assert!((z - (2.0 - 2f64.sqrt())).abs() < 1e-10);
        // x_1(2, alpha) = (alpha + 2) - sqrt(alpha + 2)
        let z = smallest_zero(2, 3.5, 1e-12).unwrap();
        assert!((z - (5.5 - 5.5f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn zero_is_simple() {
        for (n, alpha) in [(3usize, 0.5f64), (5, 2.0), (8, 10.0)] {
            let z = smallest_zero(n, alpha, 1e-12).unwrap();
            // derivative = -L_(n-1)^(alpha+1)
            let d = LaguerrePoly::new(n - 1, rat_from_f64(alpha + 1.0).unwrap()).unwrap();
            assert!(d.eval_f64(z).abs() > 1e-6, "n={n} alpha={alpha}");
        }
    }

    #[test]
    fn interlacing_of_successive_zeros() {
        for k in 1..=6usize {
            for drho in [0.5f64, 2.0, 10.0] {
                let rho = k as f64 + drho;
                let inner = smallest_zero(k + 1, rho - k as f64 - 1.0, 1e-10).unwrap();
                let outer = smallest_zero(k, rho - k as f64, 1e-10).unwrap();
                assert!(inner < outer, "k={k} rho={rho}: {inner} vs {outer}");
            }
        }
    }

    #[test]
    fn sturm_root_values() {
        let v = sturm_lower_root(1, 0.0).unwrap();
        assert!((v - (3.0 - 10f64.sqrt())).abs() < 1e-12);
        let v = sturm_lower_root(60, 180.0).unwrap();
        assert!((v - (301.0 - 58202f64.sqrt())).abs() < 1e-9);
        assert!((v - 59.749).abs() < 1e-3);
    }

    #[test]
    fn sturm_ratio_approaches_limit() {
        // alpha = (A - 1) n with A = 4: ratio tends to (sqrt(4) - 1)^2 = 1
        let r30 = sturm_lower_root(30, 90.0).unwrap() / 30.0;
        let r300 = sturm_lower_root(300, 900.0).unwrap() / 300.0;
        assert!((r300 - 1.0).abs() < (r30 - 1.0).abs());
        assert!((r300 - 1.0).abs() < 0.03);
    }

    #[test]
    fn asymptotic_ratio_of_true_zeros() {
        let r15 = smallest_zero(15, 45.0, 1e-10).unwrap() / 15.0;
        let r60 = smallest_zero(60, 180.0, 1e-10).unwrap() / 60.0;
        // frozen from an independent exact-arithmetic bisection oracle
        assert!((r15 - 1.325050831283716).abs() < 1e-8);
        assert!((r60 - 1.122774162049199).abs() < 1e-8);
        assert!((r60 - 1.0).abs() <= 0.15);
        assert!((r60 - 1.0).abs() < (r15 - 1.0).abs());
    }

    #[test]
    fn threshold_constants() {
        assert_eq!(unconditional_gap_threshold(1).unwrap(), 0.25);
        assert!((unconditional_gap_threshold(4).unwrap() - 2.25).abs() < 1e-15);
        let mut prev = 0.0;
        for r in 1..=10 {
            let v = unconditional_gap_threshold(r).unwrap();
            assert!(v > prev);
            prev = v;
        }
        // level-of-distribution variants
        let eh = eh_gap_threshold(1, 1.0).unwrap();
        assert!((eh - 0.085786437626905).abs() < 1e-12);
        assert!((eh_gap_threshold(1, 0.5).unwrap() - 0.25).abs() < 1e-12);
        assert!((eh_gap_threshold(2, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn truncated_threshold_example() {
        let v = truncated_gap_threshold(1, 1, 0.2, 1.1).unwrap();
        let expect = 0.2 * (5.5 - 5.5f64.sqrt());
        assert!((v - expect).abs() < 1e-9, "{v} vs {expect}");
    }

    #[test]
    fn alpha_domain_errors() {
        assert!(LaguerrePoly::new(3, rat_int(-2)).is_err());
        assert!(truncated_gap_threshold(5, 1, 0.5, 1.5).is_err()); // rho/theta = 3 <= k
    }
}
