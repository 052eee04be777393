//! Truncated divisor sums and their windowed evaluation.
//!
//! `lambda_r(n, R)` is the divisor sum `sum_(d | n, d <= R) mu(d) log(R/d)`,
//! a short-divisor stand-in for the von Mangoldt function that can be sieved
//! over a window: every squarefree `d <= R` deposits `mu(d) log(R/d)` at its
//! multiples, for `O(len * log R)` total work.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::build_tables_capped;
use crate::float;
use crate::poisson::stirling2;
use crate::sum::Kahan;
use crate::tuples::TupleSet;
use crate::{Error, Result};

/// Cap on the symmetric-function order; higher orders make the truncation
/// level too small to be meaningful at desk scale.
pub const K_CAP: u32 = 8;

const WINDOW_BUDGET: u64 = crate::arith::DEFAULT_WINDOW_BUDGET;

/// Reference implementation by direct divisor enumeration.
pub fn lambda_r(n: u64, big_r: f64) -> f64 {
    debug_assert!(n >= 1 && big_r >= 2.0);
    let rcut = float::floor(big_r) as u64;
    let mut acc = 0.0;
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            if i <= rcut {
                if let Some(m) = mobius_u64(i) {
                    acc += m as f64 * float::ln(big_r / i as f64);
                }
            }
            let j = n / i;
            if j != i && j <= rcut {
                if let Some(m) = mobius_u64(j) {
                    acc += m as f64 * float::ln(big_r / j as f64);
                }
            }
        }
        i += 1;
    }
    acc
}

/// Möbius value by trial division; `None` when a square divides `n`.
fn mobius_u64(mut n: u64) -> Option<i32> {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return None;
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    Some(sign)
}

/// Precomputed truncated divisor sums over a half-open window.
#[derive(Debug, Clone)]
pub struct LambdaRWindow {
    big_r: f64,
    log_r: f64,
    window_start: u64,
    values: Vec<f64>,
}

/// Sieve the window `[start, start + len)` at truncation level `R`.
/// Divisor cutoffs use `floor(R)`; the log weights use `R` itself.
pub fn build_lambda_r_window(window_start: u64, window_len: u64, big_r: f64) -> Result<LambdaRWindow> {
    build_lambda_r_window_capped(window_start, window_len, big_r, WINDOW_BUDGET)
}

pub fn build_lambda_r_window_capped(
    window_start: u64,
    window_len: u64,
    big_r: f64,
    budget: u64,
) -> Result<LambdaRWindow> {
    if window_start < 1 || window_len < 1 {
        return Err(Error::BadParameter("window_start and window_len must be >= 1"));
    }
    if !(big_r >= 2.0) {
        return Err(Error::BadParameter("truncation level R must be >= 2"));
    }
    if window_len > budget {
        return Err(Error::CapacityExceeded {
            requested: window_len,
            budget,
        });
    }
    let rcut = float::floor(big_r) as u64;
    if rcut + 1 > budget {
        return Err(Error::CapacityExceeded {
            requested: rcut + 1,
            budget,
        });
    }
    let end = window_start
        .checked_add(window_len)
        .ok_or(Error::BadParameter("window end overflows u64"))?;
    // Möbius values for the divisor loop
    let small = build_tables_capped(1, rcut + 1, budget)?;
    let mut values = vec![0f64; window_len as usize];
    for d in 1..=rcut {
        let mu = small.mu(d)?;
        if mu == 0 {
            continue;
        }
        let w = mu as f64 * float::ln(big_r / d as f64);
        let mut m = window_start.div_ceil(d) * d;
        while m < end {
            values[(m - window_start) as usize] += w;
            m += d;
        }
    }
    Ok(LambdaRWindow {
        big_r,
        log_r: float::ln(big_r),
        window_start,
        values,
    })
}

impl LambdaRWindow {
    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn log_r(&self) -> f64 {
        self.log_r
    }

    pub fn window_start(&self) -> u64 {
        self.window_start
    }

    pub fn window_len(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn window_end(&self) -> u64 {
        self.window_start + self.window_len()
    }

    pub fn covers(&self, n: u64) -> bool {
        n >= self.window_start && n < self.window_end()
    }

    pub fn require_range(&self, lo: u64, hi: u64) -> Result<()> {
        for n in [lo, hi] {
            if !self.covers(n) {
                return Err(Error::OutOfWindow {
                    n,
                    start: self.window_start,
                    len: self.window_len(),
                });
            }
        }
        Ok(())
    }

    pub fn value(&self, n: u64) -> Result<f64> {
        if self.covers(n) {
            Ok(self.values[(n - self.window_start) as usize])
        } else {
            Err(Error::OutOfWindow {
                n,
                start: self.window_start,
                len: self.window_len(),
            })
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Slice of values for `[lo, hi]` after a coverage check.
    pub fn slice(&self, lo: u64, hi: u64) -> Result<&[f64]> {
        self.require_range(lo, hi)?;
        let a = (lo - self.window_start) as usize;
        let b = (hi - self.window_start) as usize;
        Ok(&self.values[a..=b])
    }

    /// Rebuild a window from raw parts (used by the cache layer).
    pub fn from_parts(window_start: u64, big_r: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || window_start < 1 || !(big_r >= 2.0) {
            return Err(Error::BadParameter("invalid window parts"));
        }
        Ok(LambdaRWindow {
            big_r,
            log_r: float::ln(big_r),
            window_start,
            values,
        })
    }

    /// Join windows built at the same truncation level for contiguous
    /// ranges.
    pub fn concat(parts: Vec<LambdaRWindow>) -> Result<LambdaRWindow> {
        let mut parts = parts.into_iter();
        let mut acc = parts
            .next()
            .ok_or(Error::BadParameter("nothing to concatenate"))?;
        for part in parts {
            if part.window_start != acc.window_end() || part.big_r != acc.big_r {
                return Err(Error::BadParameter("windows are not compatible"));
            }
            acc.values.extend_from_slice(&part.values);
        }
        Ok(acc)
    }
}

/// Product of window values over the shifts of `H`; 1 for the empty tuple.
pub fn lambda_r_tuple(n: u64, h: &TupleSet, window: &LambdaRWindow) -> Result<f64> {
    let mut acc = 1.0;
    for &shift in h.shifts() {
        acc *= window.value(n + shift)?;
    }
    Ok(acc)
}

/// Vector (multiset) extension: repeated shifts contribute factors of
/// `log R` instead of repeated divisor sums.
pub fn lambda_r_vector(n: u64, hvec: &[u64], window: &LambdaRWindow) -> Result<f64> {
    let mut distinct: Vec<u64> = hvec.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut acc = float::powi(window.log_r, (hvec.len() - distinct.len()) as u32);
    for &shift in &distinct {
        acc *= window.value(n + shift)?;
    }
    Ok(acc)
}

/// Elementary symmetric functions e_1..e_cap of `vals`, via power sums and
/// Newton's identities. Returns `[e_0, e_1, ..., e_cap]`.
pub(crate) fn elementary_from_powers(vals: &[f64], cap: usize) -> [f64; K_CAP as usize + 1] {
    debug_assert!(cap <= K_CAP as usize);
    let mut power = [0f64; K_CAP as usize + 1]; // power[i] holds p_(i+1)
    for &v in vals {
        let mut acc = v;
        for slot in power.iter_mut().take(cap) {
            *slot += acc;
            acc *= v;
        }
    }
    let mut e = [0f64; K_CAP as usize + 1];
    e[0] = 1.0;
    for m in 1..=cap {
        let mut s = 0.0;
        let mut sign = 1.0;
        for i in 1..=m {
            s += sign * e[m - i] * power[i - 1];
            sign = -sign;
        }
        e[m] = s / m as f64;
    }
    e
}

/// Weights `S2(l, v) v! (log R)^(l - v)` for assembling the symmetric-function
/// route; row `l`, column `v`.
pub(crate) fn psi_r_weights(k: u32, log_r: f64) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(k as usize + 1);
    for l in 0..=k {
        let mut row = vec![0.0; l as usize + 1];
        let mut vfact = 1.0;
        for v in 1..=l {
            vfact *= v as f64;
            row[v as usize] = stirling2(l, v) as f64 * vfact * float::powi(log_r, l - v);
        }
        rows.push(row);
    }
    rows
}

/// Sum of `lambda_r_vector` over all k-component vectors with shifts in
/// `[1, h]`, evaluated through elementary symmetric functions: grouping
/// vectors by their set of distinct values gives
/// `sum_v S2(k, v) v! (log R)^(k-v) e_v(values)` at cost `O(h k)` instead of
/// `O(h^k)`.
pub fn psi_r_k(n: u64, h: u64, k: u32, window: &LambdaRWindow) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if k > K_CAP {
        return Err(Error::KCapExceeded { k, cap: K_CAP });
    }
    if h == 0 {
        return Ok(0.0);
    }
    let vals = window.slice(n + 1, n + h)?;
    let e = elementary_from_powers(vals, k as usize);
    let weights = psi_r_weights(k, window.log_r);
    let row = &weights[k as usize];
    let mut acc = 0.0;
    for v in 1..=k as usize {
        acc += row[v] * e[v];
    }
    Ok(acc)
}

/// The exact finite sum `sum_(d <= R, gcd(d, m) = 1) mu(d)/d log(R/d)`,
/// which tends to `m / phi(m)` as `R` grows.
pub fn mobius_log_sum(big_r: f64, m: u64) -> Result<f64> {
    if !(big_r >= 2.0) {
        return Err(Error::BadParameter("truncation level R must be >= 2"));
    }
    if m < 1 {
        return Err(Error::BadParameter("modulus must be >= 1"));
    }
    let rcut = float::floor(big_r) as u64;
    let small = build_tables_capped(1, rcut + 1, WINDOW_BUDGET)?;
    let mut acc = Kahan::new();
    for d in 1..=rcut {
        let mu = small.mu(d)?;
        if mu == 0 || num_integer::gcd(d, m) != 1 {
            continue;
        }
        acc.add(mu as f64 / d as f64 * float::ln(big_r / d as f64));
    }
    Ok(acc.value())
}

/// Divisor-count bound helper used in tests and sanity checks:
/// `|lambda_r(n, R)| <= d(n) log R`.
pub fn divisor_count(n: u64) -> u64 {
    let mut count = 1u64;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            count *= e + 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        count *= 2;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(start: u64, len: u64, r: f64) -> LambdaRWindow {
        build_lambda_r_window(start, len, r).unwrap()
    }

    #[test]
    fn point_values() {
        // only divisor of 1 is 1
        assert!((lambda_r(1, 10.0) - 10f64.ln()).abs() < 1e-15);
        // primes above R keep only d = 1
        assert!((lambda_r(101, 7.0) - 7f64.ln()).abs() < 1e-15);
        // divisors of 6 up to 3: 1, 2, 3
        assert!((lambda_r(6, 3.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn window_agrees_with_direct_enumeration() {
        let w = window(1, 10_000, 10.0);
        assert!((w.value(1).unwrap() - 10f64.ln()).abs() < 1e-15);
        for n in 1..=10_000u64 {
            let direct = lambda_r(n, 10.0);
            assert!(
                (w.value(n).unwrap() - direct).abs() < 1e-12,
                "n = {n}: {} vs {direct}",
                w.value(n).unwrap()
            );
        }
        // offset window
        let w = window(10_000, 500, 31.41);
        for n in 10_000..10_500u64 {
            let direct = lambda_r(n, 31.41);
            assert!((w.value(n).unwrap() - direct).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn window_mean_tracks_density_one() {
        // the mean of the truncated divisor sum over [1, 10^6] sits near 1
        let n = 1_000_000u64;
        let big_r = 10f64.powf(1.2);
        let w = window(1, n, big_r);
        let mean = crate::sum::Kahan::sum_iter(w.values().iter().copied()) / n as f64;
        assert!(mean > 0.9 && mean < 1.1, "mean = {mean}");
    }

    #[test]
    fn divisor_bound_holds() {
        let r = 25.0;
        let w = window(1, 5_000, r);
        for n in 1..=5_000u64 {
            let bound = divisor_count(n) as f64 * r.ln();
            assert!(w.value(n).unwrap().abs() <= bound + 1e-12, "n = {n}");
        }
    }

    #[test]
    fn tuple_products() {
        let w = window(1, 50, 3.0);
        let empty = TupleSet::empty();
        assert_eq!(lambda_r_tuple(7, &empty, &w).unwrap(), 1.0);
        let single = TupleSet::new(vec![0]).unwrap();
        assert_eq!(
            lambda_r_tuple(9, &single, &w).unwrap(),
            w.value(9).unwrap()
        );
        // 5 and 7 are primes above R = 3
        let pair = TupleSet::new(vec![0, 2]).unwrap();
        let expect = 3f64.ln() * 3f64.ln();
        assert!((lambda_r_tuple(5, &pair, &w).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn vector_extension() {
        let w = window(1, 60, 5.0);
        let lr = w.log_r();
        let v1 = lambda_r_vector(11, &[4], &w).unwrap();
        assert!((v1 - w.value(15).unwrap()).abs() < 1e-15);
        let v2 = lambda_r_vector(11, &[4, 4], &w).unwrap();
        assert!((v2 - lr * w.value(15).unwrap()).abs() < 1e-15);
        let v3 = lambda_r_vector(11, &[0, 2, 0], &w).unwrap();
        let expect = lr * w.value(11).unwrap() * w.value(13).unwrap();
        assert!((v3 - expect).abs() < 1e-14);
    }

    /// Brute-force vector sum over all h^k vectors.
    fn psi_r_k_naive(n: u64, h: u64, k: u32, w: &LambdaRWindow) -> f64 {
        let mut total = 0.0;
        let mut vec_idx = vec![1u64; k as usize];
        loop {
            total += lambda_r_vector(n, &vec_idx, w).unwrap();
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == k as usize {
                    return total;
                }
                if vec_idx[pos] < h {
                    vec_idx[pos] += 1;
                    break;
                }
                vec_idx[pos] = 1;
                pos += 1;
            }
        }
    }

    #[test]
    fn fast_route_matches_enumeration() {
        let w = window(1, 200, 6.5);
        for n in [1u64, 17, 60] {
            for h in 1..=6u64 {
                for k in 1..=4u32 {
                    let fast = psi_r_k(n, h, k, &w).unwrap();
                    let naive = psi_r_k_naive(n, h, k, &w);
                    let scale = naive.abs().max(1.0);
                    assert!(
                        (fast - naive).abs() < 1e-9 * scale,
                        "n={n} h={h} k={k}: {fast} vs {naive}"
                    );
                }
            }
        }
        assert_eq!(psi_r_k(5, 5, 0, &w).unwrap(), 1.0);
    }

    #[test]
    fn k_one_reduces_to_plain_sum() {
        let w = window(1, 100, 4.0);
        let n = 20;
        let h = 9;
        let direct: f64 = (1..=h).map(|m| w.value(n + m).unwrap()).sum();
        assert!((psi_r_k(n, h, 1, &w).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn shift_covariance() {
        // lambda_r_tuple(n, H + c) = lambda_r_tuple(n + c, H)
        let w = window(1, 300, 8.0);
        let h = TupleSet::new(vec![0, 4, 10]).unwrap();
        for n in [3u64, 50, 111] {
            for c in [1u64, 7, 30] {
                let lhs = lambda_r_tuple(n, &h.translate(c), &w).unwrap();
                let rhs = lambda_r_tuple(n + c, &h, &w).unwrap();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mobius_log_sum_examples() {
        assert!((mobius_log_sum(2.0, 1).unwrap() - 2f64.ln()).abs() < 1e-15);
        let v = mobius_log_sum(1_000_000.0, 1).unwrap();
        assert!(v > 0.9 && v < 1.1, "v = {v}");
        let v6 = mobius_log_sum(1_000_000.0, 6).unwrap();
        assert!(v6 > 2.7 && v6 < 3.3, "v6 = {v6}");
        // frozen from an independent sieve: the limits are m/phi(m)
        assert!((v - 0.9999861513736478).abs() < 1e-9);
        assert!((v6 - 2.999956897401016).abs() < 1e-8);
    }

    #[test]
    fn k_cap_enforced() {
        let w = window(1, 50, 4.0);
        assert!(matches!(
            psi_r_k(1, 5, 9, &w),
            Err(Error::KCapExceeded { .. })
        ));
    }
}
