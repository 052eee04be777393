//! Poisson moments and the Stirling-number identities they rest on.
//!
//! The k-th moment of a Poisson variable with mean lambda is a polynomial in
//! lambda whose coefficients are Stirling numbers of the second kind. Both
//! Stirling families, the surjection-counting identity, and the inversion of
//! powers into moments are implemented exactly.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rat::{binomial_u128, Poly, Rat};

/// Largest `k` accepted by the u128 Stirling paths.
pub const STIRLING_CAP: u32 = 26;

/// Stirling number of the second kind: partitions of a k-set into v
/// non-empty blocks. Recurrence: the last element either forms its own
/// block or joins one of the v existing ones.
pub fn stirling2(k: u32, v: u32) -> u128 {
    assert!(k <= STIRLING_CAP, "stirling2 overflow guard");
    if v > k {
        return 0;
    }
    if k == 0 {
        return 1; // v == 0 here
    }
    if v == 0 {
        return 0;
    }
    let mut row = vec![0u128; v as usize + 1];
    row[0] = 1; // S(0, 0)
    for _ in 1..=k {
        for j in (1..=v as usize).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[v as usize]
}

/// Unsigned Stirling number of the first kind `[h, j]`, defined by the
/// falling-factorial expansion
/// `q (q-1) ... (q-h+1) = sum_j (-1)^(h-j) [h, j] q^j`.
pub fn stirling1_unsigned(h: u32, j: u32) -> u128 {
    assert!(h <= STIRLING_CAP, "stirling1 overflow guard");
    if j > h {
        return 0;
    }
    // coefficients of the falling factorial, signed
    let mut coeffs: Vec<i128> = vec![1];
    for i in 0..h as i128 {
        // multiply by (q - i)
        let mut next = vec![0i128; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= i * c;
        }
        coeffs = next;
    }
    let c = coeffs[j as usize];
    let sign = if (h - j) % 2 == 0 { 1 } else { -1 };
    let v = sign as i128 * c;
    debug_assert!(v >= 0);
    v as u128
}

/// The k-th Poisson moment as a polynomial in the mean.
pub fn poisson_moment(k: u32) -> Poly {
    if k == 0 {
        return Poly::one();
    }
    let mut coeffs = Vec::with_capacity(k as usize + 1);
    coeffs.push(Rat::zero());
    for v in 1..=k {
        coeffs.push(Rat::from_integer(BigInt::from(stirling2(k, v))));
    }
    Poly::from_coeffs(coeffs)
}

/// Poisson moment evaluated in floating point.
pub fn poisson_moment_f64(k: u32, mean: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // Horner over v = k .. 1
    let mut acc = 0.0;
    for v in (1..=k).rev() {
        acc = (acc + stirling2(k, v) as f64) * mean;
    }
    acc
}

/// Counting surjections two ways: `sum_v v! S(k, v) C(j, v) = j^k`.
pub fn surjection_identity_check(j: u32, k: u32) -> bool {
    let mut lhs: u128 = 0;
    let mut vfact: u128 = 1;
    for v in 0..=j {
        if v > 0 {
            vfact *= v as u128;
        }
        lhs += vfact * stirling2(k, v) * binomial_u128(j as u64, v as u64);
    }
    let rhs = (j as u128).pow(k);
    lhs == rhs
}

/// Inverting moments back into powers:
/// `lambda^h = sum_j (-1)^(h-j) [h, j] mu_j(lambda)`, checked as an exact
/// polynomial identity.
pub fn lambda_power_identity_check(h: u32) -> bool {
    let mut rhs = Poly::zero();
    for j in 0..=h {
        let s = BigInt::from(stirling1_unsigned(h, j));
        let signed = if (h - j) % 2 == 0 { s } else { -s };
        rhs = rhs.add(&poisson_moment(j).scale(&Rat::from_integer(signed)));
    }
    let mut lhs_coeffs = vec![Rat::zero(); h as usize + 1];
    lhs_coeffs[h as usize] = Rat::one();
    rhs == Poly::from_coeffs(lhs_coeffs)
}

/// Apply the raising operator `lambda * d/dlambda + lambda`, which steps one
/// Poisson moment to the next.
pub fn raise_moment(p: &Poly) -> Poly {
    p.derivative().shift_up().add(&p.shift_up())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_frac, rat_int};

    /// Count partitions of {0..k-1} into exactly v blocks by brute force.
    fn partitions_brute(k: u32, v: u32) -> u128 {
        fn rec(remaining: u32, blocks: u32, v: u32) -> u128 {
            if remaining == 0 {
                return if blocks == v { 1 } else { 0 };
            }
            // place next element: new block, or one of the existing ones
            let mut total = rec(remaining - 1, blocks + 1, v);
            total += blocks as u128 * rec(remaining - 1, blocks, v);
            total
        }
        rec(k, 0, v)
    }

    #[test]
    fn stirling2_matches_partition_enumeration() {
        for k in 0..=9 {
            for v in 0..=k {
                assert_eq!(stirling2(k, v), partitions_brute(k, v), "S2({k},{v})");
            }
        }
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(4, 3), 6);
        for k in 1..=12 {
            assert_eq!(stirling2(k, 1), 1);
            assert_eq!(stirling2(k, k), 1);
        }
    }

    #[test]
    fn stirling1_from_falling_factorial() {
        assert_eq!(stirling1_unsigned(3, 1), 2); // q^3 - 3q^2 + 2q
        assert_eq!(stirling1_unsigned(3, 2), 3);
        for h in 0..=10 {
            assert_eq!(stirling1_unsigned(h, h), 1);
        }
        // defining identity at integer points q = 0..h
        for h in 0..=8u32 {
            for q in 0..=h as i128 {
                let mut falling = 1i128;
                for i in 0..h as i128 {
                    falling *= q - i;
                }
                let mut sum = 0i128;
                for j in 0..=h {
                    let sign = if (h - j) % 2 == 0 { 1 } else { -1 };
                    sum += sign * stirling1_unsigned(h, j) as i128 * q.pow(j);
                }
                assert_eq!(sum, falling, "h={h} q={q}");
            }
        }
    }

    #[test]
    fn first_moments() {
        assert_eq!(poisson_moment(0), Poly::one());
        let mu1 = poisson_moment(1);
        assert_eq!(mu1.coeff(1), rat_int(1));
        assert_eq!(mu1.degree(), 1);
        let mu2 = poisson_moment(2);
        assert_eq!(mu2.coeff(1), rat_int(1));
        assert_eq!(mu2.coeff(2), rat_int(1));
        // mu_4(1) = 1 + 7 + 6 + 1 = 15
        assert_eq!(poisson_moment(4).eval(&rat_int(1)), rat_int(15));
        assert_eq!(poisson_moment_f64(2, 5.0), 30.0);
        assert_eq!(poisson_moment_f64(2, 10.0), 110.0);
    }

    #[test]
    fn truncated_series_oracle() {
        // mu_k(lambda) = e^-lambda * sum_j j^k lambda^j / j!, truncated at 60
        fn series(k: u32, lambda: f64) -> f64 {
            let mut total = 0.0;
            let mut term = 1.0; // lambda^j / j!
            for j in 0..=60u32 {
                if j > 0 {
                    term *= lambda / j as f64;
                }
                total += (j as f64).powi(k as i32) * term;
            }
            total * (-lambda).exp()
        }
        for k in 0..=10 {
            for &lam in &[0.5, 1.0, 2.0] {
                let exact = poisson_moment_f64(k, lam);
                let approx = series(k, lam);
                assert!(
                    (exact - approx).abs() <= 1e-10 * exact.max(1.0),
                    "k={k} lambda={lam}: {exact} vs {approx}"
                );
            }
        }
        assert!((series(4, 1.0) - 15.0).abs() < 1e-10);
    }

    #[test]
    fn raising_operator_reproduces_moments() {
        let mut m = Poly::one();
        for k in 1..=10 {
            m = raise_moment(&m);
            assert_eq!(m, poisson_moment(k), "k = {k}");
        }
    }

    #[test]
    fn surjection_identity_range() {
        for j in 0..=12 {
            for k in 0..=12 {
                assert!(surjection_identity_check(j, k), "j={j} k={k}");
            }
        }
        // hand expansion at j=2, k=3: 1*1*2 + 2*3*1 = 8 = 2^3
        assert!(surjection_identity_check(2, 3));
    }

    #[test]
    fn power_identity_range() {
        for h in 0..=10 {
            assert!(lambda_power_identity_check(h), "h={h}");
        }
    }

    #[test]
    fn moment_polynomial_evaluates_rationally() {
        // mu_2(1/2) = 1/4 + 1/2 = 3/4
        assert_eq!(poisson_moment(2).eval(&rat_frac(1, 2)), rat_frac(3, 4));
    }
}
