//! Windowed tables of multiplicative functions over an integer range.
//!
//! A single segmented pass over the base primes fills, for every `n` in a
//! half-open window `[start, start + len)`:
//!
//! * `spf`  — smallest prime factor (`n` itself for primes, 1 for `n = 1`),
//! * `mu`   — the Möbius function in {-1, 0, 1},
//! * `lambda` — the von Mangoldt function in natural-log units,
//! * a prime bit.
//!
//! Windows are half-open; callers that want sums over `(N, 2N]` pass
//! `start = N + 1`. Tables are immutable after construction and safe to
//! share across threads.

use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::sum::Kahan;
use crate::{Error, Result};

/// Default cap on window length, in entries. A full window costs about
/// 17 bytes per entry once built (25 during construction).
pub const DEFAULT_WINDOW_BUDGET: u64 = 1 << 26;

/// Simple bit set backed by `u64` words.
#[derive(Debug, Clone)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Immutable window of arithmetic-function values.
#[derive(Debug, Clone)]
pub struct ArithTable {
    window_start: u64,
    spf: Vec<u64>,
    mu: Vec<i8>,
    lambda: Vec<f64>,
    is_prime: BitSet,
}

/// Primes up to `limit` inclusive, by plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for p in 2..=limit {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = float::sqrt(n as f64) as u64 + 1;
    while x * x > n {
        x -= 1;
    }
    x
}

/// Deterministic primality by trial division; meant for parameters, not bulk
/// work.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient by trial-division factorization; parameter-scale only.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut phi = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut pe = 1;
            while n % p == 0 {
                n /= p;
                pe *= p;
            }
            phi *= pe - pe / p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

/// First multiple of `d` that is `>= lo`.
#[inline]
fn first_multiple_at_least(d: u64, lo: u64) -> u64 {
    lo.div_ceil(d) * d
}

/// Build the table for the half-open window `[start, start + len)` under the
/// default budget.
pub fn build_tables(window_start: u64, window_len: u64) -> Result<ArithTable> {
    build_tables_capped(window_start, window_len, DEFAULT_WINDOW_BUDGET)
}

/// Build with an explicit entry budget.
pub fn build_tables_capped(window_start: u64, window_len: u64, budget: u64) -> Result<ArithTable> {
    if window_start < 1 || window_len < 1 {
        return Err(Error::BadParameter("window_start and window_len must be >= 1"));
    }
    if window_len > budget {
        return Err(Error::CapacityExceeded {
            requested: window_len,
            budget,
        });
    }
    let end = window_start
        .checked_add(window_len)
        .ok_or(Error::BadParameter("window end overflows u64"))?;
    let len = window_len as usize;

    let mut spf = vec![0u64; len];
    let mut mu = vec![1i8; len];
    let mut lambda = vec![0f64; len];
    // product of p^{v_p(n)} over base primes p; detects a leftover large
    // prime factor at the end
    let mut small_part = vec![1u64; len];

    let base = small_primes(isqrt(end - 1));
    for &p in &base {
        // sign flips, spf marking, and one factor of p per multiple
        let mut m = first_multiple_at_least(p, window_start);
        while m < end {
            let i = (m - window_start) as usize;
            mu[i] = -mu[i];
            small_part[i] *= p;
            if spf[i] == 0 {
                spf[i] = p;
            }
            m += p;
        }
        // square kills the Möbius value
        if let Some(p2) = p.checked_mul(p) {
            let mut q = p2;
            loop {
                if q >= end && first_multiple_at_least(q, window_start) >= end {
                    break;
                }
                let mut m = first_multiple_at_least(q, window_start);
                while m < end {
                    let i = (m - window_start) as usize;
                    small_part[i] *= p;
                    m += q;
                }
                match q.checked_mul(p) {
                    Some(next) if next < end => q = next,
                    _ => break,
                }
            }
            let mut m = first_multiple_at_least(p2, window_start);
            while m < end {
                mu[(m - window_start) as usize] = 0;
                m += p2;
            }
        }
        // prime powers carry log p
        let logp = float::ln(p as f64);
        let mut q = p;
        loop {
            if q >= window_start {
                let i = (q - window_start) as usize;
                lambda[i] = logp;
            }
            match q.checked_mul(p) {
                Some(next) if next < end => q = next,
                _ => break,
            }
        }
    }

    let mut is_prime = BitSet::new(len);
    for i in 0..len {
        let n = window_start + i as u64;
        if spf[i] == 0 {
            // no base prime divides n: n is 1 or a prime above sqrt(end)
            spf[i] = n;
            if n >= 2 {
                is_prime.set(i);
                lambda[i] = float::ln(n as f64);
                mu[i] = -mu[i];
            }
        } else {
            if spf[i] == n {
                is_prime.set(i);
            }
            if small_part[i] < n && mu[i] != 0 {
                // leftover prime factor above sqrt(end), multiplicity one
                mu[i] = -mu[i];
            }
        }
    }

    Ok(ArithTable {
        window_start,
        spf,
        mu,
        lambda,
        is_prime,
    })
}

impl ArithTable {
    /// Join tables built for contiguous windows (disjoint ranges may be
    /// sieved in parallel and merged here).
    pub fn concat(parts: Vec<ArithTable>) -> Result<ArithTable> {
        let mut parts = parts.into_iter();
        let mut acc = parts
            .next()
            .ok_or(Error::BadParameter("nothing to concatenate"))?;
        for part in parts {
            if part.window_start != acc.window_end() {
                return Err(Error::BadParameter("windows are not contiguous"));
            }
            let offset = acc.spf.len();
            acc.spf.extend_from_slice(&part.spf);
            acc.mu.extend_from_slice(&part.mu);
            acc.lambda.extend_from_slice(&part.lambda);
            let mut bits = BitSet::new(acc.spf.len());
            for i in 0..offset {
                if acc.is_prime.get(i) {
                    bits.set(i);
                }
            }
            for i in 0..part.is_prime.len() {
                if part.is_prime.get(i) {
                    bits.set(offset + i);
                }
            }
            acc.is_prime = bits;
        }
        Ok(acc)
    }

    pub fn window_start(&self) -> u64 {
        self.window_start
    }

    pub fn window_len(&self) -> u64 {
        self.spf.len() as u64
    }

    /// First value beyond the window.
    pub fn window_end(&self) -> u64 {
        self.window_start + self.window_len()
    }

    #[inline]
    pub fn covers(&self, n: u64) -> bool {
        n >= self.window_start && n < self.window_end()
    }

    /// Check that the closed range `[lo, hi]` lies inside the window.
    pub fn require_range(&self, lo: u64, hi: u64) -> Result<()> {
        if !self.covers(lo) {
            return Err(self.out_of_window(lo));
        }
        if hi >= lo && !self.covers(hi) {
            return Err(self.out_of_window(hi));
        }
        Ok(())
    }

    fn out_of_window(&self, n: u64) -> Error {
        Error::OutOfWindow {
            n,
            start: self.window_start,
            len: self.window_len(),
        }
    }

    #[inline]
    fn index(&self, n: u64) -> Result<usize> {
        if self.covers(n) {
            Ok((n - self.window_start) as usize)
        } else {
            Err(self.out_of_window(n))
        }
    }

    pub fn spf(&self, n: u64) -> Result<u64> {
        Ok(self.spf[self.index(n)?])
    }

    pub fn mu(&self, n: u64) -> Result<i8> {
        Ok(self.mu[self.index(n)?])
    }

    pub fn lambda(&self, n: u64) -> Result<f64> {
        Ok(self.lambda[self.index(n)?])
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        Ok(self.is_prime.get(self.index(n)?))
    }

    pub fn spf_values(&self) -> &[u64] {
        &self.spf
    }

    pub fn mu_values(&self) -> &[i8] {
        &self.mu
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda
    }

    pub fn prime_bits(&self) -> &BitSet {
        &self.is_prime
    }

    /// Number of primes in `[window_start, x]`.
    pub fn prime_count_upto(&self, x: u64) -> Result<u64> {
        let idx = self.index(x)?;
        let mut count = 0;
        for i in 0..=idx {
            if self.is_prime.get(i) {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Primes of the window in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let start = self.window_start;
        (0..self.spf.len()).filter_map(move |i| {
            if self.is_prime.get(i) {
                Some(start + i as u64)
            } else {
                None
            }
        })
    }
}

/// Chebyshev function: sum of von Mangoldt values for `n <= x`. The table
/// must cover `[1, x]`.
pub fn psi(x: u64, table: &ArithTable) -> Result<f64> {
    if table.window_start() != 1 {
        return Err(Error::BadParameter("psi needs a window starting at 1"));
    }
    if x == 0 {
        return Ok(0.0);
    }
    let idx = table.index(x)?;
    Ok(Kahan::sum_iter(table.lambda[..=idx].iter().copied()))
}

/// Sum of von Mangoldt values over the half-open interval `(n, n + h]`.
pub fn psi_interval(n: u64, h: u64, table: &ArithTable) -> Result<f64> {
    if h == 0 {
        return Ok(0.0);
    }
    table.require_range(n + 1, n + h)?;
    let lo = (n + 1 - table.window_start) as usize;
    let hi = (n + h - table.window_start) as usize;
    Ok(Kahan::sum_iter(table.lambda[lo..=hi].iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    /// Trial-division oracle for the three table functions.
    fn naive(n: u64) -> (i8, f64, bool) {
        if n == 1 {
            return (1, 0.0, false);
        }
        let mut m = n;
        let mut distinct = 0u32;
        let mut squarefree = true;
        let mut first = 0u64;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                distinct += 1;
                if first == 0 {
                    first = p;
                }
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                if e > 1 {
                    squarefree = false;
                }
            }
            p += 1;
        }
        if m > 1 {
            distinct += 1;
            if first == 0 {
                first = m;
            }
        }
        let mu = if !squarefree {
            0
        } else if distinct % 2 == 0 {
            1
        } else {
            -1
        };
        let lambda = if distinct == 1 { ln(first as f64) } else { 0.0 };
        (mu, lambda, distinct == 1 && m == n)
    }

    #[test]
    fn small_window_values() {
        let t = build_tables(1, 30).unwrap();
        assert_eq!(t.mu(6).unwrap(), 1);
        assert_eq!(t.mu(12).unwrap(), 0);
        assert_eq!(t.mu(30).unwrap(), -1);
        assert!((t.lambda(8).unwrap() - ln(2.0)).abs() < 1e-15);
        assert!((t.lambda(9).unwrap() - ln(3.0)).abs() < 1e-15);
        assert_eq!(t.lambda(10).unwrap(), 0.0);
    }

    #[test]
    fn hundred_window_has_25_primes() {
        let t = build_tables(1, 100).unwrap();
        assert_eq!(t.prime_bits().count_ones(), 25);
        assert_eq!(t.prime_count_upto(100).unwrap(), 25);
    }

    #[test]
    fn matches_trial_division_to_1e4() {
        let t = build_tables(1, 10_000).unwrap();
        for n in 1..=10_000u64 {
            let (mu, lambda, is_pp) = naive(n);
            assert_eq!(t.mu(n).unwrap(), mu, "mu({n})");
            assert!(
                (t.lambda(n).unwrap() - lambda).abs() < 1e-12,
                "lambda({n})"
            );
            let _ = is_pp;
            assert_eq!(t.is_prime(n).unwrap(), is_prime_u64(n), "is_prime({n})");
            // spf cross-check: mu != 0 iff squarefree
            let sq = {
                let mut m = n;
                let mut sf = true;
                let mut p = 2;
                while p * p <= m {
                    if m % p == 0 {
                        let mut e = 0;
                        while m % p == 0 {
                            m /= p;
                            e += 1;
                        }
                        if e > 1 {
                            sf = false;
                        }
                    }
                    p += 1;
                }
                sf
            };
            assert_eq!(t.mu(n).unwrap() != 0, sq, "squarefree({n})");
        }
    }

    #[test]
    fn offset_window_matches_trial_division() {
        let start = 1_000_000;
        let t = build_tables(start, 2_000).unwrap();
        for n in start..start + 2_000 {
            let (mu, lambda, _) = naive(n);
            assert_eq!(t.mu(n).unwrap(), mu, "mu({n})");
            assert!((t.lambda(n).unwrap() - lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn mertens_identity_on_prefix() {
        // sum over n <= x of mu(n) * floor(x/n) = 1 for covered prefixes
        let t = build_tables(1, 3_000).unwrap();
        for x in [1u64, 2, 10, 100, 999, 3_000] {
            let mut s: i64 = 0;
            for n in 1..=x {
                s += t.mu(n).unwrap() as i64 * (x / n) as i64;
            }
            assert_eq!(s, 1, "mertens at {x}");
        }
    }

    #[test]
    fn psi_examples() {
        let t = build_tables(1, 200).unwrap();
        assert_eq!(psi(1, &t).unwrap(), 0.0);
        // prime powers up to 10: 2, 3, 4, 5, 7, 8, 9
        let expect = 3.0 * ln(2.0) + 2.0 * ln(3.0) + ln(5.0) + ln(7.0);
        assert!((psi(10, &t).unwrap() - expect).abs() < 1e-12);
        assert!((psi(10, &t).unwrap() - 7.832014180505469).abs() < 1e-12);
    }

    #[test]
    fn psi_interval_examples() {
        let t = build_tables(1, 200).unwrap();
        assert_eq!(psi_interval(17, 0, &t).unwrap(), 0.0);
        let expect = ln(11.0) + ln(13.0);
        assert!((psi_interval(10, 3, &t).unwrap() - expect).abs() < 1e-12);
        // (14, 16] contains 16 = 2^4
        assert!((psi_interval(14, 2, &t).unwrap() - ln(2.0)).abs() < 1e-12);
    }

    #[test]
    fn psi_monotone_and_additive() {
        let t = build_tables(1, 500).unwrap();
        let mut prev = 0.0;
        for x in 1..=500u64 {
            let v = psi(x, &t).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let whole = psi(500, &t).unwrap();
        let split = psi(200, &t).unwrap() + psi_interval(200, 300, &t).unwrap();
        assert!((whole - split).abs() < 1e-10);
    }

    #[test]
    fn psi_near_x_at_1e6() {
        let t = build_tables(1, 1 << 20).unwrap();
        let x = 1_000_000u64;
        let ratio = psi(x, &t).unwrap() / x as f64;
        assert!(ratio > 0.99 && ratio < 1.01, "psi(1e6)/1e6 = {ratio}");
    }

    #[test]
    fn out_of_window_errors() {
        let t = build_tables(100, 50).unwrap();
        assert!(matches!(t.mu(99), Err(Error::OutOfWindow { .. })));
        assert!(matches!(t.mu(150), Err(Error::OutOfWindow { .. })));
        assert!(psi(120, &t).is_err()); // window does not start at 1
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(
            build_tables_capped(1, 1000, 100),
            Err(Error::CapacityExceeded { .. })
        ));
    }
}
