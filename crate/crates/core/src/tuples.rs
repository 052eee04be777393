//! Shift tuples, admissibility, and the singular series with a certified
//! truncation error.
//!
//! The singular series of a k-tuple H is the Euler product of
//! `(1 - 1/p)^(-k) (1 - nu_p(H)/p)`, where `nu_p(H)` counts the residue
//! classes mod p occupied by H. Primes up to the largest pairwise difference
//! can carry structure and are multiplied exactly as rationals; beyond that
//! every factor has `nu_p = k` and the product is accumulated in floating
//! point with a certified log bound on the omitted tail.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, small_primes};
use crate::float;
use crate::rat::{binomial_u128, Rat};
use crate::sum::Kahan;
use crate::{Error, Result};

/// Guard for the subset enumeration and the exact prefix product.
const MAX_TUPLE_LEN: usize = 24;

/// A finite set of distinct non-negative integer shifts, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleSet {
    shifts: Vec<u64>,
}

impl TupleSet {
    /// Sorts the input; duplicate shifts are rejected.
    pub fn new(mut shifts: Vec<u64>) -> Result<Self> {
        shifts.sort_unstable();
        if shifts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadParameter("tuple shifts must be distinct"));
        }
        if shifts.len() > MAX_TUPLE_LEN {
            return Err(Error::BadParameter("tuple too large"));
        }
        Ok(TupleSet { shifts })
    }

    pub fn empty() -> Self {
        TupleSet { shifts: Vec::new() }
    }

    pub fn singleton(h: u64) -> Self {
        TupleSet { shifts: alloc::vec![h] }
    }

    pub fn k(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn max_shift(&self) -> u64 {
        self.shifts.last().copied().unwrap_or(0)
    }

    pub fn contains(&self, h: u64) -> bool {
        self.shifts.binary_search(&h).is_ok()
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        let mut all = self.shifts.clone();
        all.extend_from_slice(&other.shifts);
        all.sort_unstable();
        all.dedup();
        TupleSet { shifts: all }
    }

    pub fn union_with_shift(&self, h0: u64) -> TupleSet {
        self.union(&TupleSet::singleton(h0))
    }

    pub fn intersection_len(&self, other: &TupleSet) -> usize {
        self.shifts
            .iter()
            .filter(|h| other.contains(**h))
            .count()
    }

    /// Largest pairwise difference (0 when `k < 2`).
    pub fn max_pairwise_diff(&self) -> u64 {
        match (self.shifts.first(), self.shifts.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// Shift every element by `c`.
    pub fn translate(&self, c: u64) -> TupleSet {
        TupleSet {
            shifts: self.shifts.iter().map(|h| h + c).collect(),
        }
    }
}

impl core::fmt::Display for TupleSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, h) in self.shifts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Number of distinct residue classes mod p occupied by the tuple.
pub fn nu_p(h: &TupleSet, p: u64) -> Result<usize> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(nu_p_unchecked(h, p))
}

fn nu_p_unchecked(h: &TupleSet, p: u64) -> usize {
    let mut residues: Vec<u64> = h.shifts.iter().map(|x| x % p).collect();
    residues.sort_unstable();
    residues.dedup();
    residues.len()
}

/// A tuple is admissible when it misses a residue class mod every prime;
/// only primes `p <= k` can be exhausted.
pub fn is_admissible(h: &TupleSet) -> bool {
    let k = h.k() as u64;
    small_primes(k)
        .into_iter()
        .all(|p| (nu_p_unchecked(h, p) as u64) < p)
}

/// Singular series value with an exact structured prefix and a certified
/// bound on the truncated tail.
#[derive(Debug, Clone)]
pub struct SingularSeries {
    /// Floating value of the product over `p <= p_max`.
    pub value: f64,
    /// Exact product over primes up to the largest pairwise difference.
    pub exact_prefix: Rat,
    /// Bound on |log| of the omitted product over `p > p_max`; zero for
    /// inadmissible tuples.
    pub tail_log_bound: f64,
    pub p_max: u64,
}

/// Euler product for the tuple, truncated at `p_max`.
///
/// Requires `p_max >= max(largest pairwise difference, 2k)` so that the tail
/// bound `sum_(p > p_max) 2 k^2 / p^2 <= 2 k^2 / (p_max log p_max)` applies.
pub fn singular_series(h: &TupleSet, p_max: u64) -> Result<SingularSeries> {
    let primes = small_primes(p_max);
    singular_series_with_primes(h, &primes, p_max)
}

/// As `singular_series`, reusing a prime list that covers `p_max`.
pub fn singular_series_with_primes(
    h: &TupleSet,
    primes: &[u64],
    p_max: u64,
) -> Result<SingularSeries> {
    let k = h.k() as u64;
    let p_split = h.max_pairwise_diff();
    let required = p_split.max(2 * k);
    if p_max < required {
        return Err(Error::PMaxTooSmall { p_max, required });
    }
    if k == 0 {
        return Ok(SingularSeries {
            value: 1.0,
            exact_prefix: Rat::one(),
            tail_log_bound: 0.0,
            p_max,
        });
    }
    if !is_admissible(h) {
        return Ok(SingularSeries {
            value: 0.0,
            exact_prefix: Rat::zero(),
            tail_log_bound: 0.0,
            p_max,
        });
    }

    // structured factors, exactly: (1 - 1/p)^-k (1 - nu/p)
    //                            = p^(k-1) (p - nu) / (p - 1)^k
    let mut prefix = Rat::one();
    for &p in primes.iter().take_while(|&&p| p <= p_split) {
        let nu = nu_p_unchecked(h, p) as u64;
        let num = BigInt::from(p).pow(k as u32 - 1) * BigInt::from(p - nu);
        let den = BigInt::from(p - 1).pow(k as u32);
        prefix *= Rat::new(num, den);
    }

    // smooth range: nu_p = k. The log of each factor is accumulated from
    //   factor - 1 = -(sum_(j>=2) C(k,j) (-1/p)^j) / (1 - 1/p)^k,
    // whose numerator is evaluated as a polynomial in 1/p to avoid the
    // cancellation of computing (1 - k/p) - (1 - 1/p)^k directly.
    let mut log_mid = Kahan::new();
    let binoms: Vec<f64> = (2..=k)
        .map(|j| binomial_u128(k, j) as f64)
        .collect();
    for &p in primes.iter().skip_while(|&&p| p <= p_split) {
        let u = 1.0 / p as f64;
        let mut poly = 0.0;
        for &b in binoms.iter().rev() {
            poly = b - u * poly;
        }
        let numerator = -u * u * poly;
        let denominator = float::powi(1.0 - u, k as u32);
        log_mid.add(float::ln_1p(numerator / denominator));
    }

    let value = rat_to_f64(&prefix) * float::exp(log_mid.value());
    let kf = k as f64;
    let tail_log_bound = 2.0 * kf * kf / (p_max as f64 * float::ln(p_max as f64));
    Ok(SingularSeries {
        value,
        exact_prefix: prefix,
        tail_log_bound,
        p_max,
    })
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Product of all pairwise shift differences; needs `k >= 2`.
pub fn delta_product(h: &TupleSet) -> Result<BigUint> {
    if h.k() < 2 {
        return Err(Error::BadParameter("delta product needs k >= 2"));
    }
    let mut acc = BigUint::one();
    let s = h.shifts();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            acc *= BigUint::from(s[j] - s[i]);
        }
    }
    Ok(acc)
}

/// Sum of the singular series over all ordered k-tuples of distinct shifts
/// in `[1, h]`.
///
/// Tuples are grouped by their difference pattern: a class with largest
/// difference `d` occurs at `h - d` translates, and each unordered set is
/// hit by `k!` orderings. The expected size is `h^k`.
pub fn gallagher_average(k: u32, h: u64, p_max: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::BadParameter("gallagher average needs k >= 1"));
    }
    if k > 6 {
        return Err(Error::KCapExceeded { k, cap: 6 });
    }
    if h < k as u64 {
        return Err(Error::BadParameter("gallagher average needs h >= k"));
    }
    let required = (2 * k as u64).max(h.saturating_sub(1));
    if p_max < required {
        return Err(Error::PMaxTooSmall { p_max, required });
    }
    let primes = small_primes(p_max);
    let mut orderings = 1.0;
    for i in 2..=k as u64 {
        orderings *= i as f64;
    }

    // enumerate difference patterns 0 = d_1 < d_2 < ... < d_k <= h - 1
    let mut diffs: Vec<u64> = alloc::vec![0; k as usize];
    let mut total = Kahan::new();
    fn rec(
        diffs: &mut Vec<u64>,
        pos: usize,
        k: usize,
        h: u64,
        primes: &[u64],
        p_max: u64,
        total: &mut Kahan,
    ) -> Result<()> {
        if pos == k {
            let class = TupleSet {
                shifts: diffs.clone(),
            };
            let weight = (h - diffs[k - 1]) as f64;
            let s = singular_series_with_primes(&class, primes, p_max)?;
            total.add(weight * s.value);
            return Ok(());
        }
        let lo = diffs[pos - 1] + 1;
        for d in lo..=h - 1 {
            diffs[pos] = d;
            rec(diffs, pos + 1, k, h, primes, p_max, total)?;
        }
        Ok(())
    }
    if k == 1 {
        // singleton classes all have singular series 1
        return Ok(h as f64);
    }
    rec(&mut diffs, 1, k as usize, h, &primes, p_max, &mut total)?;
    Ok(orderings * total.value())
}

/// Signed subset count from the inclusion-exclusion structure of the local
/// factors: over all index subsets of size >= 2 whose shifts are pairwise
/// congruent mod p, sum `(-1)^|subset|`. Always equals `k - nu_p(H)`.
pub fn subset_parity_identity(h: &TupleSet, p: u64) -> Result<i64> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let k = h.k();
    if k >= MAX_TUPLE_LEN {
        return Err(Error::BadParameter("tuple too large for subset scan"));
    }
    let residues: Vec<u64> = h.shifts.iter().map(|x| x % p).collect();
    let mut total: i64 = 0;
    for mask in 1u32..(1 << k) {
        let size = mask.count_ones();
        if size < 2 {
            continue;
        }
        let mut iter = (0..k).filter(|i| mask >> i & 1 == 1);
        let first = residues[iter.next().unwrap()];
        if iter.all(|i| residues[i] == first) {
            total += if size % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}
