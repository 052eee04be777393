//! Empirical correlation sums of truncated divisor sums against sieved
//! primes, with their predicted main terms.
//!
//! All empirical sums run over the half-open range `(N, 2N]`. Each operation
//! comes as a plain-sum kernel over an explicit subrange (so callers can
//! partition across threads and merge by addition) plus a driver that fills
//! in the prediction and ratio.

use alloc::string::String;
use alloc::vec::Vec;

use crate::arith::ArithTable;
use crate::divisor::{elementary_from_powers, psi_r_weights, LambdaRWindow, K_CAP};
use crate::float;
use crate::poisson::poisson_moment_f64;
use crate::sum::Kahan;
use crate::tuples::{singular_series, TupleSet};
use crate::{Error, Result};

pub const FLAG_INADMISSIBLE: &str = "inadmissible";
pub const FLAG_NO_PREDICTION: &str = "no-prediction";
pub const FLAG_THETA_RANGE: &str = "theta-out-of-range";

/// Default Euler-product cutoff for predicted main terms.
pub const DEFAULT_P_MAX: u64 = 1_000_000;

/// Parameters echoed into every report; unused fields stay `None`.
#[derive(Debug, Clone, Default)]
pub struct CorrelationParams {
    pub kind: &'static str,
    pub h1: Option<TupleSet>,
    pub h2: Option<TupleSet>,
    pub h0: Option<u64>,
    pub i: Option<u32>,
    pub j: Option<u32>,
    pub k: Option<u32>,
    pub exponents: Option<Vec<u32>>,
    pub n: u64,
    pub h: Option<u64>,
    pub big_r: Option<f64>,
    /// log R / log N
    pub theta: Option<f64>,
    /// h / log N
    pub lambda: Option<f64>,
}

/// One experiment: empirical sum, predicted main term, and their ratio.
#[derive(Debug, Clone)]
pub struct CorrelationReport {
    pub params: CorrelationParams,
    pub empirical: f64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
    pub flag: Option<String>,
    pub runtime_seconds: f64,
}

impl CorrelationReport {
    fn new(params: CorrelationParams, empirical: f64, predicted: Option<f64>) -> Self {
        let ratio = match predicted {
            Some(p) if p != 0.0 => Some(empirical / p),
            _ => None,
        };
        CorrelationReport {
            params,
            empirical,
            predicted,
            ratio,
            flag: None,
            runtime_seconds: 0.0,
        }
    }

    fn with_flag(mut self, flag: &str) -> Self {
        self.flag = Some(String::from(flag));
        self
    }
}

#[inline]
fn theta_of(big_r: f64, n: u64) -> f64 {
    float::ln(big_r) / float::ln(n as f64)
}

fn require_window(window: &LambdaRWindow, n: u64, max_shift: u64) -> Result<()> {
    window.require_range(n + 1, 2 * n + max_shift)
}

/// Kernel: sum of `lambda_r_tuple(m, H1) * lambda_r_tuple(m, H2)` over
/// `m` in `[lo, hi]`.
pub fn pair_sum(
    window: &LambdaRWindow,
    h1: &TupleSet,
    h2: &TupleSet,
    lo: u64,
    hi: u64,
) -> Result<f64> {
    let max_shift = h1.max_shift().max(h2.max_shift());
    window.require_range(lo, hi + max_shift)?;
    let base = window.window_start();
    let vals = window.values();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let idx = (m - base) as usize;
        let mut prod = 1.0;
        for &s in h1.shifts() {
            prod *= vals[idx + s as usize];
        }
        for &s in h2.shifts() {
            prod *= vals[idx + s as usize];
        }
        acc.add(prod);
    }
    Ok(acc.value())
}

/// Pair correlation over `(N, 2N]` against the predicted
/// `N * S(H1 u H2) * (log R)^(|H1 n H2|)`.
pub fn correlation_pair(
    window: &LambdaRWindow,
    h1: &TupleSet,
    h2: &TupleSet,
    n: u64,
    p_max: u64,
) -> Result<CorrelationReport> {
    if window.big_r() >= n as f64 {
        return Err(Error::BadParameter("truncation level must satisfy R < N"));
    }
    require_window(window, n, h1.max_shift().max(h2.max_shift()))?;
    let empirical = pair_sum(window, h1, h2, n + 1, 2 * n)?;
    pair_report(h1, h2, n, window.big_r(), empirical, p_max)
}

/// Assemble the pair-correlation report from a precomputed empirical sum.
pub fn pair_report(
    h1: &TupleSet,
    h2: &TupleSet,
    n: u64,
    big_r: f64,
    empirical: f64,
    p_max: u64,
) -> Result<CorrelationReport> {
    let union = h1.union(h2);
    let r = h1.intersection_len(h2);
    let series = singular_series(&union, p_max)?;
    let predicted = n as f64 * series.value * float::powi(float::ln(big_r), r as u32);
    let params = CorrelationParams {
        kind: "pair",
        h1: Some(h1.clone()),
        h2: Some(h2.clone()),
        n,
        big_r: Some(big_r),
        theta: Some(theta_of(big_r, n)),
        ..Default::default()
    };
    let report = CorrelationReport::new(params, empirical, Some(predicted));
    if series.value == 0.0 {
        return Ok(report.with_flag(FLAG_INADMISSIBLE));
    }
    Ok(report)
}

/// Kernel: pair product times the von Mangoldt weight at `m + h0`.
/// With `primes_only`, prime powers are dropped from the weight.
pub fn with_prime_sum(
    window: &LambdaRWindow,
    table: &ArithTable,
    h1: &TupleSet,
    h2: &TupleSet,
    h0: u64,
    lo: u64,
    hi: u64,
    primes_only: bool,
) -> Result<f64> {
    let max_shift = h1.max_shift().max(h2.max_shift());
    window.require_range(lo, hi + max_shift)?;
    table.require_range(lo + h0, hi + h0)?;
    let wbase = window.window_start();
    let vals = window.values();
    let tbase = table.window_start();
    let lambda = table.lambda_values();
    let bits = table.prime_bits();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let li = (m + h0 - tbase) as usize;
        let weight = lambda[li];
        if weight == 0.0 {
            continue;
        }
        if primes_only && !bits.get(li) {
            continue;
        }
        let idx = (m - wbase) as usize;
        let mut prod = weight;
        for &s in h1.shifts() {
            prod *= vals[idx + s as usize];
        }
        for &s in h2.shifts() {
            prod *= vals[idx + s as usize];
        }
        acc.add(prod);
    }
    Ok(acc.value())
}

/// Triple correlation with a prime-counting weight at shift `h0`, against
/// `N * S(H u {h0}) * (log R)^(r0)` with `r0 = |H1 n H2| + [h0 in H]`.
pub fn correlation_with_prime(
    window: &LambdaRWindow,
    table: &ArithTable,
    h1: &TupleSet,
    h2: &TupleSet,
    h0: u64,
    n: u64,
    p_max: u64,
) -> Result<CorrelationReport> {
    correlation_with_prime_opts(window, table, h1, h2, h0, n, p_max, false)
}

pub fn correlation_with_prime_opts(
    window: &LambdaRWindow,
    table: &ArithTable,
    h1: &TupleSet,
    h2: &TupleSet,
    h0: u64,
    n: u64,
    p_max: u64,
    primes_only: bool,
) -> Result<CorrelationReport> {
    let empirical = with_prime_sum(window, table, h1, h2, h0, n + 1, 2 * n, primes_only)?;
    with_prime_report(h1, h2, h0, n, window.big_r(), empirical, p_max)
}

pub fn with_prime_report(
    h1: &TupleSet,
    h2: &TupleSet,
    h0: u64,
    n: u64,
    big_r: f64,
    empirical: f64,
    p_max: u64,
) -> Result<CorrelationReport> {
    let union = h1.union(h2);
    let r0 = h1.intersection_len(h2) + usize::from(union.contains(h0));
    let with_h0 = union.union_with_shift(h0);
    let series = singular_series(&with_h0, p_max)?;
    let predicted = n as f64 * series.value * float::powi(float::ln(big_r), r0 as u32);
    let params = CorrelationParams {
        kind: "with-prime",
        h1: Some(h1.clone()),
        h2: Some(h2.clone()),
        h0: Some(h0),
        n,
        big_r: Some(big_r),
        theta: Some(theta_of(big_r, n)),
        ..Default::default()
    };
    let report = CorrelationReport::new(params, empirical, Some(predicted));
    if series.value == 0.0 {
        return Ok(report.with_flag(FLAG_INADMISSIBLE));
    }
    Ok(report)
}

/// Kernel: sum of `psi_R^(i) * psi_R^(j)` over `m` in `[lo, hi]`, both
/// factors read from the same elementary symmetric functions.
pub fn moment_sum(
    window: &LambdaRWindow,
    i: u32,
    j: u32,
    h: u64,
    lo: u64,
    hi: u64,
) -> Result<f64> {
    check_moment_order(i, j)?;
    window.require_range(lo + 1, hi + h)?;
    let cap = i.max(j) as usize;
    let weights = psi_r_weights(i.max(j), window.log_r());
    let base = window.window_start();
    let vals = window.values();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let a = (m + 1 - base) as usize;
        let e = elementary_from_powers(&vals[a..a + h as usize], cap);
        acc.add(psi_from_elementary(&weights, i, &e) * psi_from_elementary(&weights, j, &e));
    }
    Ok(acc.value())
}

fn check_moment_order(i: u32, j: u32) -> Result<()> {
    for k in [i, j] {
        if k > K_CAP {
            return Err(Error::KCapExceeded { k, cap: K_CAP });
        }
    }
    Ok(())
}

#[inline]
fn psi_from_elementary(weights: &[Vec<f64>], l: u32, e: &[f64; K_CAP as usize + 1]) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let row = &weights[l as usize];
    let mut acc = 0.0;
    for v in 1..=l as usize {
        acc += row[v] * e[v];
    }
    acc
}

/// Approximate moment `M_ij = sum psi_R^(i) psi_R^(j) / (N (log R)^(i+j))`
/// against the Poisson moment of order `i + j` at mean `h / log R`.
pub fn moment_m(
    window: &LambdaRWindow,
    i: u32,
    j: u32,
    n: u64,
    h: u64,
) -> Result<CorrelationReport> {
    let raw = moment_sum(window, i, j, h, n + 1, 2 * n)?;
    moment_m_report(i, j, n, h, window.big_r(), raw)
}

pub fn moment_m_report(
    i: u32,
    j: u32,
    n: u64,
    h: u64,
    big_r: f64,
    raw_sum: f64,
) -> Result<CorrelationReport> {
    let k = i + j;
    let log_r = float::ln(big_r);
    let log_n = float::ln(n as f64);
    let empirical = raw_sum / (n as f64 * float::powi(log_r, k));
    let theta = log_r / log_n;
    let lambda_tilde = h as f64 / log_r;
    let supported = k == 0 || theta < 1.0 / k as f64;
    let predicted = supported.then(|| poisson_moment_f64(k, lambda_tilde));
    let params = CorrelationParams {
        kind: "moment-m",
        i: Some(i),
        j: Some(j),
        k: Some(k),
        n,
        h: Some(h),
        big_r: Some(big_r),
        theta: Some(theta),
        lambda: Some(h as f64 / log_n),
        ..Default::default()
    };
    let report = CorrelationReport::new(params, empirical, predicted);
    if !supported {
        return Ok(report.with_flag(FLAG_THETA_RANGE));
    }
    Ok(report)
}

/// Kernel: `psi_R^(i) psi_R^(j) psi(m, h)` over `[lo, hi]`.
pub fn moment_tilde_sum(
    window: &LambdaRWindow,
    table: &ArithTable,
    i: u32,
    j: u32,
    h: u64,
    lo: u64,
    hi: u64,
) -> Result<f64> {
    check_moment_order(i, j)?;
    window.require_range(lo + 1, hi + h)?;
    table.require_range(lo + 1, hi + h)?;
    let cap = i.max(j) as usize;
    let weights = psi_r_weights(i.max(j), window.log_r());
    let wbase = window.window_start();
    let vals = window.values();
    let tbase = table.window_start();
    let lam = table.lambda_values();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let a = (m + 1 - wbase) as usize;
        let t = (m + 1 - tbase) as usize;
        let mut interval = 0.0;
        for &x in &lam[t..t + h as usize] {
            interval += x;
        }
        if i == 0 && j == 0 {
            acc.add(interval);
            continue;
        }
        let e = elementary_from_powers(&vals[a..a + h as usize], cap);
        acc.add(
            psi_from_elementary(&weights, i, &e)
                * psi_from_elementary(&weights, j, &e)
                * interval,
        );
    }
    Ok(acc.value())
}

/// Mixed moment with a prime-counting factor, normalized by one extra
/// power of `log R`; its limit is the Poisson moment of order `i + j + 1`.
pub fn moment_m_tilde(
    window: &LambdaRWindow,
    table: &ArithTable,
    i: u32,
    j: u32,
    n: u64,
    h: u64,
) -> Result<CorrelationReport> {
    let raw = moment_tilde_sum(window, table, i, j, h, n + 1, 2 * n)?;
    moment_m_tilde_report(i, j, n, h, window.big_r(), raw)
}

pub fn moment_m_tilde_report(
    i: u32,
    j: u32,
    n: u64,
    h: u64,
    big_r: f64,
    raw_sum: f64,
) -> Result<CorrelationReport> {
    let k = i + j;
    let log_r = float::ln(big_r);
    let log_n = float::ln(n as f64);
    let empirical = raw_sum / (n as f64 * float::powi(log_r, k + 1));
    let theta = log_r / log_n;
    let lambda_tilde = h as f64 / log_r;
    let supported = k == 0 || theta < 1.0 / (2.0 * k as f64);
    let predicted = supported.then(|| poisson_moment_f64(k + 1, lambda_tilde));
    let params = CorrelationParams {
        kind: "moment-m-tilde",
        i: Some(i),
        j: Some(j),
        k: Some(k),
        n,
        h: Some(h),
        big_r: Some(big_r),
        theta: Some(theta),
        lambda: Some(h as f64 / log_n),
        ..Default::default()
    };
    let report = CorrelationReport::new(params, empirical, predicted);
    if !supported {
        return Ok(report.with_flag(FLAG_THETA_RANGE));
    }
    Ok(report)
}

/// Kernel: `psi(m, h)^k` over `[lo, hi]`.
pub fn power_moment_sum(table: &ArithTable, k: u32, h: u64, lo: u64, hi: u64) -> Result<f64> {
    table.require_range(lo + 1, hi + h)?;
    let tbase = table.window_start();
    let lam = table.lambda_values();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let t = (m + 1 - tbase) as usize;
        let mut interval = 0.0;
        for &x in &lam[t..t + h as usize] {
            interval += x;
        }
        acc.add(float::powi(interval, k));
    }
    Ok(acc.value())
}

/// Prime-count moment in short intervals, against the Poisson moment at
/// mean `h / log N`. Enforces the short-interval regime `lambda <= 4`.
pub fn gallagher_moment(table: &ArithTable, k: u32, n: u64, h: u64) -> Result<CorrelationReport> {
    let log_n = float::ln(n as f64);
    let lambda = h as f64 / log_n;
    if lambda > 4.0 {
        return Err(Error::LambdaCapExceeded { lambda, cap: 4.0 });
    }
    let raw = if k == 0 {
        n as f64
    } else {
        power_moment_sum(table, k, h, n + 1, 2 * n)?
    };
    gallagher_moment_report(k, n, h, raw)
}

pub fn gallagher_moment_report(k: u32, n: u64, h: u64, raw_sum: f64) -> Result<CorrelationReport> {
    let log_n = float::ln(n as f64);
    let lambda = h as f64 / log_n;
    let empirical = raw_sum / (n as f64 * float::powi(log_n, k));
    let predicted = poisson_moment_f64(k, lambda);
    let params = CorrelationParams {
        kind: "gallagher-moment",
        k: Some(k),
        n,
        h: Some(h),
        lambda: Some(lambda),
        ..Default::default()
    };
    Ok(CorrelationReport::new(params, empirical, Some(predicted)))
}

/// Kernel: products of per-shift powers `prod lambda_R(m + h_i)^(a_i)`.
pub fn generalized_sum(
    window: &LambdaRWindow,
    h: &TupleSet,
    exponents: &[u32],
    lo: u64,
    hi: u64,
) -> Result<f64> {
    if exponents.len() != h.k() || exponents.contains(&0) {
        return Err(Error::BadParameter("need one positive exponent per shift"));
    }
    window.require_range(lo, hi + h.max_shift())?;
    let base = window.window_start();
    let vals = window.values();
    let mut acc = Kahan::new();
    for m in lo..=hi {
        let idx = (m - base) as usize;
        let mut prod = 1.0;
        for (&s, &a) in h.shifts().iter().zip(exponents) {
            prod *= float::powi(vals[idx + s as usize], a);
        }
        acc.add(prod);
    }
    Ok(acc.value())
}

/// Correlation with per-shift exponents. Exponents in {1, 2} reduce to the
/// pair correlation with `H2 = {h_i : a_i = 2}`; any exponent >= 3 leaves
/// the prediction unavailable and only the empirical sum is reported.
pub fn generalized_correlation(
    window: &LambdaRWindow,
    h: &TupleSet,
    exponents: &[u32],
    n: u64,
    p_max: u64,
) -> Result<CorrelationReport> {
    let empirical = generalized_sum(window, h, exponents, n + 1, 2 * n)?;
    generalized_report(h, exponents, n, window.big_r(), empirical, p_max)
}

pub fn generalized_report(
    h: &TupleSet,
    exponents: &[u32],
    n: u64,
    big_r: f64,
    empirical: f64,
    p_max: u64,
) -> Result<CorrelationReport> {
    let params = CorrelationParams {
        kind: "generalized",
        h1: Some(h.clone()),
        exponents: Some(exponents.to_vec()),
        n,
        big_r: Some(big_r),
        theta: Some(theta_of(big_r, n)),
        ..Default::default()
    };
    if exponents.iter().all(|&a| a <= 2) {
        let squared = exponents.iter().filter(|&&a| a == 2).count();
        let series = singular_series(h, p_max)?;
        let predicted =
            n as f64 * series.value * float::powi(float::ln(big_r), squared as u32);
        let report = CorrelationReport::new(params, empirical, Some(predicted));
        if series.value == 0.0 {
            return Ok(report.with_flag(FLAG_INADMISSIBLE));
        }
        Ok(report)
    } else {
        Ok(CorrelationReport::new(params, empirical, None).with_flag(FLAG_NO_PREDICTION))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;
    use crate::divisor::build_lambda_r_window;

    fn ts(shifts: &[u64]) -> TupleSet {
        TupleSet::new(shifts.to_vec()).unwrap()
    }

    const N: u64 = 40_000;

    fn fixture(big_r: f64, extra: u64) -> (LambdaRWindow, ArithTable) {
        let window = build_lambda_r_window(N + 1, N + extra + 16, big_r).unwrap();
        let table = build_tables(N + 1, N + extra + 16).unwrap();
        (window, table)
    }

    #[test]
    fn empty_pair_is_exact() {
        let (window, _) = fixture(8.0, 0);
        let report =
            correlation_pair(&window, &TupleSet::empty(), &TupleSet::empty(), N, 10_000)
                .unwrap();
        assert_eq!(report.empirical, N as f64);
        assert_eq!(report.predicted, Some(N as f64));
        assert_eq!(report.ratio, Some(1.0));
    }

    #[test]
    fn pair_symmetry_is_exact() {
        let (window, _) = fixture(8.0, 4);
        let h1 = ts(&[0]);
        let h2 = ts(&[2]);
        let a = correlation_pair(&window, &h1, &h2, N, 10_000).unwrap();
        let b = correlation_pair(&window, &h2, &h1, N, 10_000).unwrap();
        assert_eq!(a.empirical, b.empirical);
        assert_eq!(a.predicted, b.predicted);
    }

    #[test]
    fn pair_ratio_near_one_at_small_scale() {
        // R = N^(1/5); generous tolerance at this tiny N
        let big_r = (N as f64).powf(0.2);
        let (window, _) = fixture(big_r, 4);
        let report = correlation_pair(&window, &ts(&[0]), &ts(&[0]), N, 100_000).unwrap();
        let ratio = report.ratio.unwrap();
        assert!(ratio > 0.5 && ratio < 1.5, "ratio {ratio}");
    }

    #[test]
    fn inadmissible_union_is_flagged() {
        let (window, _) = fixture(8.0, 4);
        let report = correlation_pair(&window, &ts(&[0, 2]), &ts(&[4]), N, 10_000).unwrap();
        assert_eq!(report.predicted, Some(0.0));
        assert!(report.ratio.is_none());
        assert_eq!(report.flag.as_deref(), Some(FLAG_INADMISSIBLE));
    }

    #[test]
    fn moment_m00_is_exactly_one() {
        let (window, _) = fixture(8.0, 20);
        let report = moment_m(&window, 0, 0, N, 12).unwrap();
        assert_eq!(report.empirical, 1.0);
        assert_eq!(report.predicted, Some(1.0));
    }

    #[test]
    fn moment_prediction_depends_only_on_order() {
        let (window, _) = fixture(10.0, 20);
        let a = moment_m(&window, 0, 2, N, 9).unwrap();
        let b = moment_m(&window, 1, 1, N, 9).unwrap();
        assert_eq!(a.predicted, b.predicted);
    }

    #[test]
    fn theta_out_of_range_flags_prediction() {
        // theta = log R / log N with R = N^(3/4) and i + j = 2 violates 1/k
        let big_r = (N as f64).powf(0.75);
        let window = build_lambda_r_window(N + 1, N + 40, big_r).unwrap();
        let report = moment_m(&window, 1, 1, N, 10).unwrap();
        assert!(report.predicted.is_none());
        assert_eq!(report.flag.as_deref(), Some(FLAG_THETA_RANGE));
    }

    #[test]
    fn gallagher_moment_zeroth_is_one() {
        let table = build_tables(N + 1, N + 40).unwrap();
        let report = gallagher_moment(&table, 0, N, 10).unwrap();
        assert_eq!(report.empirical, 1.0);
        assert_eq!(report.predicted, Some(1.0));
    }

    #[test]
    fn gallagher_lambda_cap() {
        let table = build_tables(N + 1, N + 200).unwrap();
        assert!(matches!(
            gallagher_moment(&table, 1, N, 100),
            Err(Error::LambdaCapExceeded { .. })
        ));
    }

    #[test]
    fn generalized_reductions() {
        let (window, _) = fixture(9.0, 8);
        let h = ts(&[0, 2]);
        // all-ones exponents reduce to the plain tuple sum
        let g = generalized_correlation(&window, &h, &[1, 1], N, 10_000).unwrap();
        let p = correlation_pair(&window, &h, &TupleSet::empty(), N, 10_000).unwrap();
        assert!((g.empirical - p.empirical).abs() < 1e-9);
        assert_eq!(g.predicted, p.predicted);
        // a square reduces to the diagonal pair correlation
        let g = generalized_correlation(&window, &ts(&[0]), &[2], N, 10_000).unwrap();
        let p = correlation_pair(&window, &ts(&[0]), &ts(&[0]), N, 10_000).unwrap();
        assert!((g.empirical - p.empirical).abs() < 1e-9);
        // cubes have no predicted constant
        let g = generalized_correlation(&window, &ts(&[0]), &[3], N, 10_000).unwrap();
        assert!(g.predicted.is_none());
        assert_eq!(g.flag.as_deref(), Some(FLAG_NO_PREDICTION));
    }

    #[test]
    fn with_prime_exponent_bookkeeping() {
        let (window, table) = fixture(8.0, 8);
        // h0 not in H: exponent r0 = r = |H1 n H2|
        let h1 = ts(&[0]);
        let r = correlation_with_prime(&window, &table, &h1, &h1, 2, N, 100_000).unwrap();
        let series = singular_series(&ts(&[0, 2]), 100_000).unwrap();
        let expect = N as f64 * series.value * 8f64.ln();
        assert!((r.predicted.unwrap() - expect).abs() < 1e-9 * expect.abs());
        // h0 in H: one more power of log R
        let r2 = correlation_with_prime(&window, &table, &h1, &h1, 0, N, 100_000).unwrap();
        let expect2 = N as f64 * 8f64.ln() * 8f64.ln();
        assert!((r2.predicted.unwrap() - expect2).abs() < 1e-9 * expect2.abs());
    }

    #[test]
    fn kernels_merge_across_subranges() {
        let (window, _) = fixture(8.0, 4);
        let h1 = ts(&[0]);
        let h2 = ts(&[2]);
        let whole = pair_sum(&window, &h1, &h2, N + 1, 2 * N).unwrap();
        let mid = N + N / 2;
        let left = pair_sum(&window, &h1, &h2, N + 1, mid).unwrap();
        let right = pair_sum(&window, &h1, &h2, mid + 1, 2 * N).unwrap();
        assert!((whole - (left + right)).abs() < 1e-9 * whole.abs().max(1.0));
    }
}
