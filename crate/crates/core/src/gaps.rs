//! The detection statistic over short intervals, dense-cluster counts, and
//! the gap census, plus the fourth-moment and sieve-bound sanity checks.

use alloc::string::String;
use alloc::vec::Vec;

use crate::arith::ArithTable;
use crate::divisor::{elementary_from_powers, psi_r_weights, LambdaRWindow, K_CAP};
use crate::float;
use crate::poisson::{poisson_moment_f64, stirling2};
use crate::sum::Kahan;
use crate::tuples::{is_admissible, singular_series, TupleSet};
use crate::{Error, Result};

/// Interval length for a target `lambda`: `h = round(lambda log N)`. The
/// effective `lambda` is recomputed from the rounded length for reporting.
pub fn interval_length(n: u64, lambda: f64) -> u64 {
    float::round(lambda * float::ln(n as f64)) as u64
}

/// Kernel for the detection statistic: sum over `m` in `[lo, hi]` of
/// `(psi(m, h) - rho log N) * P_k(m)^2` with
/// `P_k = sum_l a_l psi_R^(l)(m, h) (log R)^(k - l)`.
#[allow(clippy::too_many_arguments)]
pub fn s_k_sum(
    table: &ArithTable,
    window: &LambdaRWindow,
    coeffs: &[f64],
    k: u32,
    h: u64,
    rho_log_n: f64,
    lo: u64,
    hi: u64,
) -> Result<f64> {
    if k > K_CAP {
        return Err(Error::KCapExceeded { k, cap: K_CAP });
    }
    if coeffs.len() != k as usize + 1 {
        return Err(Error::BadParameter("need k + 1 polynomial coefficients"));
    }
    if h == 0 {
        return Err(Error::BadParameter("interval length must be positive"));
    }
    table.require_range(lo + 1, hi + h)?;
    window.require_range(lo + 1, hi + h)?;
    let log_r = window.log_r();
    let weights = psi_r_weights(k, log_r);
    // scale[l] = (log R)^(k - l)
    let scale: Vec<f64> = (0..=k).map(|l| float::powi(log_r, k - l)).collect();
    let tbase = table.window_start();
    let lam = table.lambda_values();
    let wbase = window.window_start();
    let vals = window.values();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let t = (m + 1 - tbase) as usize;
        let mut interval = 0.0;
        for &x in &lam[t..t + h as usize] {
            interval += x;
        }
        let a = (m + 1 - wbase) as usize;
        let e = elementary_from_powers(&vals[a..a + h as usize], k as usize);
        let mut poly = coeffs[0] * scale[0];
        for l in 1..=k as usize {
            let row = &weights[l];
            let mut psi_l = 0.0;
            for v in 1..=l {
                psi_l += row[v] * e[v];
            }
            poly += coeffs[l] * scale[l] * psi_l;
        }
        acc.add((interval - rho_log_n) * poly * poly);
    }
    Ok(acc.value())
}

/// Normalized detection statistic over `(N, 2N]`:
/// `S_k = sum (psi(n,h) - rho log N) P_k^2 / (N (log R)^(2k+1))`.
pub fn s_k_statistic(
    table: &ArithTable,
    window: &LambdaRWindow,
    coeffs: &[f64],
    k: u32,
    n: u64,
    lambda: f64,
    rho: f64,
) -> Result<f64> {
    let h = interval_length(n, lambda);
    let log_n = float::ln(n as f64);
    let raw = s_k_sum(
        table,
        window,
        coeffs,
        k,
        h,
        rho * log_n,
        n + 1,
        2 * n,
    )?;
    Ok(s_k_normalize(raw, window.log_r(), k, n))
}

pub fn s_k_normalize(raw_sum: f64, log_r: f64, k: u32, n: u64) -> f64 {
    raw_sum / (n as f64 * float::powi(log_r, 2 * k + 1))
}

/// Count of `n` in `(N, 2N]` whose following interval of length `h` contains
/// more than `r` primes.
pub fn q_r_plus(table: &ArithTable, n: u64, h: u64, r: u32) -> Result<u64> {
    if h == 0 {
        return Ok(0);
    }
    table.require_range(n + 1, 2 * n + h)?;
    let base = table.window_start();
    let bits = table.prime_bits();
    // prime count over (m, m + h], slid one step at a time
    let mut inside = 0u32;
    for x in n + 1..=n + h {
        if bits.get((x - base) as usize) {
            inside += 1;
        }
    }
    let mut count = 0u64;
    for m in n + 1..=2 * n {
        // slide from (m-1, m-1+h] to (m, m+h]
        if bits.get((m - base) as usize) {
            inside -= 1;
        }
        if bits.get((m + h - base) as usize) {
            inside += 1;
        }
        if inside > r {
            count += 1;
        }
    }
    Ok(count)
}

/// Streaming census of prime gaps `p_(i+r) - p_i <= lambda log p_i`.
///
/// Feed primes in increasing order (possibly across several table shards);
/// `finish(N)` reports the count restricted to `p_(i+r) <= N` together with
/// the fraction of primes counted.
#[derive(Debug, Clone)]
pub struct GapCensus {
    lambda: f64,
    r: usize,
    recent: Vec<u64>,
    count: u64,
    primes_upto_n: u64,
    limit: u64,
}

impl GapCensus {
    pub fn new(limit: u64, lambda: f64, r: u32) -> Result<Self> {
        if r < 1 {
            return Err(Error::BadParameter("census needs r >= 1"));
        }
        if !(lambda >= 0.0) {
            return Err(Error::BadParameter("lambda must be non-negative"));
        }
        Ok(GapCensus {
            lambda,
            r: r as usize,
            recent: Vec::with_capacity(r as usize + 1),
            count: 0,
            primes_upto_n: 0,
            limit,
        })
    }

    /// Primes must arrive in strictly increasing order.
    pub fn push_prime(&mut self, p: u64) {
        if p <= self.limit {
            self.primes_upto_n += 1;
        }
        if self.recent.len() == self.r + 1 {
            self.recent.remove(0);
        }
        self.recent.push(p);
        if self.recent.len() == self.r + 1 && p <= self.limit {
            let first = self.recent[0];
            let gap = (p - first) as f64;
            if gap <= self.lambda * float::ln(first as f64) {
                self.count += 1;
            }
        }
    }

    pub fn feed(&mut self, table: &ArithTable) {
        for p in table.primes() {
            self.push_prime(p);
        }
    }

    /// (count, fraction of primes up to the limit)
    pub fn finish(&self) -> (u64, f64) {
        let frac = if self.primes_upto_n > 0 {
            self.count as f64 / self.primes_upto_n as f64
        } else {
            0.0
        };
        (self.count, frac)
    }
}

/// Gap census over a single table covering `[1, N]`.
pub fn gap_census(table: &ArithTable, n: u64, lambda: f64, r: u32) -> Result<(u64, f64)> {
    if table.window_start() != 1 {
        return Err(Error::BadParameter("census needs a window starting at 1"));
    }
    table.require_range(1, n)?;
    let mut census = GapCensus::new(n, lambda, r)?;
    for p in table.primes().take_while(|&p| p <= n) {
        census.push_prime(p);
    }
    Ok(census.finish())
}

/// Fourth-moment inequality report.
#[derive(Debug, Clone)]
pub struct FourthMomentReport {
    pub lambda: f64,
    /// empirical `sum psi(n,h)^4 / (N log^4 N)`
    pub m4: f64,
    /// sieve-side bound `sum_v S2(4,v) v! (2 lambda)^v`
    pub bound: f64,
    /// Poisson reference `mu_4(lambda)`
    pub poisson: f64,
    pub verdict: bool,
}

/// Check the fourth-moment bound over `(N, 2N]`.
pub fn fourth_moment_check(table: &ArithTable, n: u64, h: u64) -> Result<FourthMomentReport> {
    let log_n = float::ln(n as f64);
    let lambda = h as f64 / log_n;
    if lambda > 4.0 {
        return Err(Error::LambdaCapExceeded { lambda, cap: 4.0 });
    }
    let raw = if h == 0 {
        0.0
    } else {
        crate::correlate::power_moment_sum(table, 4, h, n + 1, 2 * n)?
    };
    let m4 = raw / (n as f64 * float::powi(log_n, 4));
    let bound = fourth_moment_bound(lambda);
    Ok(FourthMomentReport {
        lambda,
        m4,
        bound,
        poisson: poisson_moment_f64(4, lambda),
        verdict: m4 <= bound,
    })
}

/// `sum_(v=1..4) S2(4, v) v! (2 lambda)^v`; at `lambda = 1/2` this is
/// `1 + 14 + 36 + 24 = 75`.
pub fn fourth_moment_bound(lambda: f64) -> f64 {
    let x = 2.0 * lambda;
    let mut acc = 0.0;
    let mut vfact = 1.0;
    for v in 1..=4u32 {
        vfact *= v as f64;
        acc += stirling2(4, v) as f64 * vfact * float::powi(x, v);
    }
    acc
}

/// Sieve-bound report for a tuple.
#[derive(Debug, Clone)]
pub struct SieveBoundReport {
    pub empirical: f64,
    /// `empirical / (S(H) N)`; `None` for inadmissible tuples
    pub ratio: Option<f64>,
    /// `2^k k!`
    pub bound: f64,
    pub verdict: bool,
    pub admissible: bool,
}

/// Compare `sum_(n <= N) prod_i Lambda(n + h_i)` against the singular-series
/// prediction and the sieve constant `2^k k!`.
pub fn sieve_bound_check(
    table: &ArithTable,
    h: &TupleSet,
    n: u64,
    p_max: u64,
) -> Result<SieveBoundReport> {
    if h.is_empty() {
        return Err(Error::BadParameter("sieve bound needs a non-empty tuple"));
    }
    if table.window_start() != 1 {
        return Err(Error::BadParameter("sieve bound needs a window starting at 1"));
    }
    table.require_range(1, n + h.max_shift())?;
    let lam = table.lambda_values();
    let mut acc = Kahan::new();
    for m in 1..=n {
        let idx = (m - 1) as usize;
        let mut prod = 1.0;
        for &s in h.shifts() {
            prod *= lam[idx + s as usize];
        }
        if prod != 0.0 {
            acc.add(prod);
        }
    }
    let empirical = acc.value();
    let k = h.k() as u32;
    let mut bound = 1.0;
    for i in 1..=k {
        bound *= 2.0 * i as f64;
    }
    let admissible = is_admissible(h);
    if !admissible {
        return Ok(SieveBoundReport {
            empirical,
            ratio: None,
            bound,
            verdict: true, // vacuous
            admissible,
        });
    }
    let series = singular_series(h, p_max)?;
    let ratio = empirical / (series.value * n as f64);
    Ok(SieveBoundReport {
        empirical,
        ratio: Some(ratio),
        bound,
        verdict: ratio < bound,
        admissible,
    })
}

/// Everything one experiment produces, for the reporting layer.
#[derive(Debug, Clone, Default)]
pub struct GapReport {
    pub n: u64,
    pub h: u64,
    pub lambda: f64,
    pub rho: f64,
    pub theta: f64,
    pub k: u32,
    pub coefficients: Vec<f64>,
    pub s_k_value: Option<f64>,
    pub q_form_value: Option<f64>,
    pub q_r_plus: Option<u64>,
    /// per-lambda census rows: (lambda, count, fraction)
    pub census: Vec<(f64, u64, f64)>,
    /// named inequality verdicts: (name, verdict, detail)
    pub checks: Vec<(String, bool, f64)>,
}
