//! Implementations behind the CLI subcommands.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use pgl_core::correlate::{self, CorrelationReport};
use pgl_core::divisor;
use pgl_core::gaps::{self, GapReport};
use pgl_core::laguerre;
use pgl_core::qform;
use pgl_core::rat::{rat_from_f64, Rat};
use pgl_core::tuples::{self, TupleSet};
use serde_json::{json, Map, Value};

use crate::parallel::sum_chunked;
use crate::report::sig12;
use crate::store::Store;

pub fn parse_shifts(s: &str) -> Result<TupleSet> {
    if s.trim().is_empty() {
        return Ok(TupleSet::empty());
    }
    let shifts: Vec<u64> = s
        .split(',')
        .map(|p| p.trim().parse::<u64>().context("shift must be an integer"))
        .collect::<Result<_>>()?;
    Ok(TupleSet::new(shifts)?)
}

/// Parse "3", "5/7", or "0.25" into an exact rational (decimals go through
/// their exact binary value).
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse()?;
        let d: i64 = den.trim().parse()?;
        if d == 0 {
            bail!("zero denominator");
        }
        return Ok(Rat::new(n.into(), d.into()));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(Rat::from_integer(n.into()));
    }
    let f: f64 = s.parse()?;
    rat_from_f64(f).context("value is not finite")
}

pub fn rat_string(r: &Rat) -> String {
    format!("{r}")
}

// ---------------------------------------------------------------- tables

pub fn tables_summary(store: &Store, start: u64, len: u64) -> Result<Value> {
    let t0 = Instant::now();
    let table = store.table(start, len)?;
    let primes = table.prime_bits().count_ones();
    Ok(json!({
        "window_start": start,
        "window_len": len,
        "prime_count": primes,
        "build_seconds": sig12(t0.elapsed().as_secs_f64()),
    }))
}

// ------------------------------------------------------- singular series

pub fn singular_series_json(shifts: &TupleSet, p_max: u64) -> Result<Value> {
    let s = tuples::singular_series(shifts, p_max)?;
    Ok(json!({
        "shifts": shifts.to_string(),
        "value": sig12(s.value),
        "exact_prefix": rat_string(&s.exact_prefix),
        "tail_log_bound": sig12(s.tail_log_bound),
        "p_max": s.p_max,
        "admissible": tuples::is_admissible(shifts),
    }))
}

// --------------------------------------------------------------- lambda-r

pub fn lambda_r_point(n: u64, big_r: f64) -> Result<Value> {
    if n < 1 || !(big_r >= 2.0) {
        bail!("need n >= 1 and R >= 2");
    }
    Ok(json!({
        "n": n,
        "R": sig12(big_r),
        "lambda_r": sig12(divisor::lambda_r(n, big_r)),
    }))
}

// -------------------------------------------------------------- correlate

#[derive(Debug, Clone, Default)]
pub struct CorrelationSpec {
    pub kind: String,
    pub h1: Option<TupleSet>,
    pub h2: Option<TupleSet>,
    pub h0: Option<u64>,
    pub i: Option<u32>,
    pub j: Option<u32>,
    pub k: Option<u32>,
    pub exponents: Option<Vec<u32>>,
    pub n: u64,
    pub theta: Option<f64>,
    pub big_r: Option<f64>,
    pub h: Option<u64>,
    pub lambda: Option<f64>,
}

impl CorrelationSpec {
    fn tuple_order(&self) -> u32 {
        self.h1.as_ref().map_or(0, |t| t.k() as u32)
            + self.h2.as_ref().map_or(0, |t| t.k() as u32)
    }

    /// Truncation level: explicit R wins, then theta, then the kind's
    /// default (the prime-weighted correlation backs off by (log N)^3).
    fn resolve_r(&self) -> Result<f64> {
        let nf = self.n as f64;
        if let Some(r) = self.big_r {
            return Ok(r);
        }
        if let Some(t) = self.theta {
            return Ok(nf.powf(t));
        }
        match self.kind.as_str() {
            "with-prime" => {
                let k = self.tuple_order().max(1);
                Ok(nf.powf(1.0 / (2.0 * k as f64)) / nf.ln().powi(3))
            }
            _ => Ok(nf.powf(0.2)),
        }
    }

    fn interval(&self) -> u64 {
        match (self.h, self.lambda) {
            (Some(h), _) => h,
            (None, Some(l)) => gaps::interval_length(self.n, l),
            (None, None) => gaps::interval_length(self.n, 1.0),
        }
    }
}

/// Run one correlation experiment, partitioning the n-sum across the
/// store's thread count.
pub fn run_correlation(store: &Store, spec: &CorrelationSpec, p_max: u64) -> Result<CorrelationReport> {
    let n = spec.n;
    if n < 100 {
        bail!("N must be at least 100");
    }
    let t0 = Instant::now();
    let threads = store.threads;
    let mut report = match spec.kind.as_str() {
        "pair" => {
            let h1 = spec.h1.clone().unwrap_or_else(TupleSet::empty);
            let h2 = spec.h2.clone().unwrap_or_else(TupleSet::empty);
            let big_r = spec.resolve_r()?;
            let max_shift = h1.max_shift().max(h2.max_shift());
            let window = store.window(n + 1, n + max_shift + 16, big_r)?;
            let empirical = sum_chunked(n + 1, 2 * n, threads, |a, b| {
                Ok(correlate::pair_sum(&window, &h1, &h2, a, b)?)
            })?;
            correlate::pair_report(&h1, &h2, n, big_r, empirical, p_max)?
        }
        "with-prime" => {
            let h1 = spec.h1.clone().unwrap_or_else(TupleSet::empty);
            let h2 = spec.h2.clone().unwrap_or_else(TupleSet::empty);
            let h0 = spec.h0.context("with-prime needs --h0")?;
            let big_r = spec.resolve_r()?;
            let max_shift = h1.max_shift().max(h2.max_shift()).max(h0);
            let window = store.window(n + 1, n + max_shift + 16, big_r)?;
            let table = store.table(n + 1, n + max_shift + 16)?;
            let empirical = sum_chunked(n + 1, 2 * n, threads, |a, b| {
                Ok(correlate::with_prime_sum(
                    &window, &table, &h1, &h2, h0, a, b, false,
                )?)
            })?;
            correlate::with_prime_report(&h1, &h2, h0, n, big_r, empirical, p_max)?
        }
        "moment" => {
            let i = spec.i.context("moment needs --i")?;
            let j = spec.j.context("moment needs --j")?;
            let h = spec.interval();
            let big_r = spec.resolve_r()?;
            let window = store.window(n + 1, n + h + 16, big_r)?;
            let raw = sum_chunked(n + 1, 2 * n, threads, |a, b| {
                Ok(correlate::moment_sum(&window, i, j, h, a, b)?)
            })?;
            correlate::moment_m_report(i, j, n, h, big_r, raw)?
        }
        "moment-tilde" => {
            let i = spec.i.context("moment-tilde needs --i")?;
            let j = spec.j.context("moment-tilde needs --j")?;
            let h = spec.interval();
            let big_r = spec.resolve_r()?;
            let window = store.window(n + 1, n + h + 16, big_r)?;
            let table = store.table(n + 1, n + h + 16)?;
            let raw = sum_chunked(n + 1, 2 * n, threads, |a, b| {
                Ok(correlate::moment_tilde_sum(&window, &table, i, j, h, a, b)?)
            })?;
            correlate::moment_m_tilde_report(i, j, n, h, big_r, raw)?
        }
        "gallagher" => {
            let k = spec.k.context("gallagher needs --k")?;
            let h = spec.interval();
            let lambda = h as f64 / (n as f64).ln();
            if lambda > 4.0 {
                bail!("lambda = {lambda:.3} beyond the short-interval cap 4");
            }
            let table = store.table(n + 1, n + h + 16)?;
            let raw = if k == 0 {
                n as f64
            } else {
                sum_chunked(n + 1, 2 * n, threads, |a, b| {
                    Ok(correlate::power_moment_sum(&table, k, h, a, b)?)
                })?
            };
            correlate::gallagher_moment_report(k, n, h, raw)?
        }
        "generalized" => {
            let h1 = spec.h1.clone().context("generalized needs --h1")?;
            let exps = spec
                .exponents
                .clone()
                .context("generalized needs --exponents")?;
            let big_r = spec.resolve_r()?;
            let window = store.window(n + 1, n + h1.max_shift() + 16, big_r)?;
            let empirical = sum_chunked(n + 1, 2 * n, threads, |a, b| {
                Ok(correlate::generalized_sum(&window, &h1, &exps, a, b)?)
            })?;
            correlate::generalized_report(&h1, &exps, n, big_r, empirical, p_max)?
        }
        other => bail!("unknown correlation kind {other:?}"),
    };
    report.runtime_seconds = t0.elapsed().as_secs_f64();
    Ok(report)
}

/// Parse a CSV parameter grid. Columns (any order, blanks allowed):
/// kind,h1,h2,h0,i,j,k,exponents,N,theta,R,h,lambda
pub fn parse_grid(path: &Path) -> Result<Vec<CorrelationSpec>> {
    let mut rdr = csv::Reader::from_path(path)
        .with_context(|| format!("opening grid {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let mut specs = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let field = |name: &str| -> Option<String> {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .and_then(|i| row.get(i))
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
        };
        let mut spec = CorrelationSpec {
            kind: field("kind").context("grid row missing kind")?,
            n: field("N")
                .context("grid row missing N")?
                .parse()
                .context("bad N")?,
            ..Default::default()
        };
        if let Some(s) = field("h1") {
            spec.h1 = Some(parse_shifts(&s)?);
        }
        if let Some(s) = field("h2") {
            spec.h2 = Some(parse_shifts(&s)?);
        }
        if let Some(s) = field("h0") {
            spec.h0 = Some(s.parse()?);
        }
        if let Some(s) = field("i") {
            spec.i = Some(s.parse()?);
        }
        if let Some(s) = field("j") {
            spec.j = Some(s.parse()?);
        }
        if let Some(s) = field("k") {
            spec.k = Some(s.parse()?);
        }
        if let Some(s) = field("exponents") {
            spec.exponents = Some(
                s.split(['+', ';'])
                    .map(|p| p.trim().parse::<u32>().context("bad exponent"))
                    .collect::<Result<_>>()?,
            );
        }
        if let Some(s) = field("theta") {
            spec.theta = Some(s.parse()?);
        }
        if let Some(s) = field("R") {
            spec.big_r = Some(s.parse()?);
        }
        if let Some(s) = field("h") {
            spec.h = Some(s.parse()?);
        }
        if let Some(s) = field("lambda") {
            spec.lambda = Some(s.parse()?);
        }
        specs.push(spec);
    }
    Ok(specs)
}

// ------------------------------------------------------------------ qform

pub fn qform_json(k: u32, lambda: &Rat, rho: &Rat) -> Result<Value> {
    use num_traits::ToPrimitive;
    let form = qform::build_moment_form(k, lambda, rho)?;
    let rats = |v: &[Rat]| -> Vec<Value> {
        v.iter()
            .map(|r| {
                json!({
                    "exact": rat_string(r),
                    "value": sig12(r.to_f64().unwrap_or(f64::NAN)),
                })
            })
            .collect()
    };
    Ok(json!({
        "k": k,
        "lambda": rat_string(lambda),
        "rho": rat_string(rho),
        "c": rats(&form.c),
        "D": rats(&form.d),
        "a": rats(&form.a),
        "Q": {
            "exact": rat_string(&form.q),
            "value": sig12(form.q_f64()),
        },
    }))
}

// -------------------------------------------------------------- threshold

pub struct ThresholdRow {
    pub k: u32,
    pub theta: f64,
    pub rho: f64,
    pub lambda_k: f64,
}

/// Per-order detection thresholds with their defaults
/// `theta = 1/(4k+1)`, `rho = 1 + 1/k`, plus the limiting constants.
pub fn threshold_rows(
    r: u32,
    k_max: u32,
    theta_override: Option<f64>,
    rho_override: Option<f64>,
) -> Result<(Vec<ThresholdRow>, f64, f64)> {
    let mut rows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let theta = theta_override.unwrap_or(1.0 / (4.0 * k as f64 + 1.0));
        let rho = rho_override.unwrap_or(r as f64 + 1.0 / k as f64);
        let lambda_k = laguerre::truncated_gap_threshold(k, r, theta, rho)?;
        rows.push(ThresholdRow {
            k,
            theta,
            rho,
            lambda_k,
        });
    }
    let limit = laguerre::unconditional_gap_threshold(r)?;
    let eh_limit = laguerre::eh_gap_threshold(r, 1.0)?;
    Ok((rows, limit, eh_limit))
}

// ------------------------------------------------------------------- gaps

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapsMode {
    Sk,
    Census,
    QrPlus,
    Checks,
}

impl std::str::FromStr for GapsMode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sk" => GapsMode::Sk,
            "census" => GapsMode::Census,
            "qrplus" => GapsMode::QrPlus,
            "checks" => GapsMode::Checks,
            other => bail!("unknown gaps mode {other:?}"),
        })
    }
}

pub struct GapsArgs {
    pub mode: GapsMode,
    pub n: u64,
    pub lambda: f64,
    pub rho: f64,
    pub k: u32,
    pub theta: Option<f64>,
    pub r: u32,
    pub p_max: u64,
}

pub fn gaps_run(store: &Store, args: &GapsArgs) -> Result<GapReport> {
    let n = args.n;
    let log_n = (n as f64).ln();
    let h = gaps::interval_length(n, args.lambda);
    let theta = args.theta.unwrap_or(1.0 / (4.0 * args.k as f64 + 1.0));
    let mut report = GapReport {
        n,
        h,
        lambda: h as f64 / log_n,
        rho: args.rho,
        theta,
        k: args.k,
        ..Default::default()
    };
    match args.mode {
        GapsMode::Sk => {
            if h == 0 {
                bail!("interval length rounds to zero; raise lambda");
            }
            let big_r = (n as f64).powf(theta);
            let window = store.window(n + 1, n + h + 16, big_r)?;
            let table = store.table(n + 1, n + h + 16)?;
            let lambda_tilde = h as f64 / window.log_r();
            let rho_tilde = args.rho / theta;
            let (coeffs, q_val) = if args.k == 0 {
                (vec![1.0], lambda_tilde - rho_tilde)
            } else {
                let form = qform::build_moment_form(
                    args.k,
                    &rat_from_f64(lambda_tilde).context("lambda not finite")?,
                    &rat_from_f64(rho_tilde).context("rho not finite")?,
                )?;
                (form.coefficients_f64(), form.q_f64())
            };
            let rho_log_n = args.rho * log_n;
            let raw = sum_chunked(n + 1, 2 * n, store.threads, |a, b| {
                Ok(gaps::s_k_sum(
                    &table, &window, &coeffs, args.k, h, rho_log_n, a, b,
                )?)
            })?;
            report.s_k_value = Some(gaps::s_k_normalize(raw, window.log_r(), args.k, n));
            report.q_form_value = Some(q_val);
            report.coefficients = coeffs;
        }
        GapsMode::Census => {
            let buckets: Vec<f64> = (1..=8).map(|i| args.lambda * i as f64 / 8.0).collect();
            report.census = census_sharded(store, n, &buckets, args.r)?;
        }
        GapsMode::QrPlus => {
            let table = store.table(n + 1, n + h + 16)?;
            report.q_r_plus = Some(gaps::q_r_plus(&table, n, h, args.r)?);
        }
        GapsMode::Checks => {
            let table = store.table(n + 1, n + h + 16)?;
            let fm = gaps::fourth_moment_check(&table, n, h)?;
            report
                .checks
                .push(("fourth-moment".into(), fm.verdict, fm.m4));
            let t1 = store.table(1, n + 8)?;
            let twin = TupleSet::new(vec![0, 2])?;
            let sb = gaps::sieve_bound_check(&t1, &twin, n, args.p_max)?;
            report
                .checks
                .push(("sieve-bound-0-2".into(), sb.verdict, sb.ratio.unwrap_or(0.0)));
        }
    }
    Ok(report)
}

/// Census across table shards sized by the store budget, one streaming
/// census per lambda bucket.
pub fn census_sharded(
    store: &Store,
    n: u64,
    lambdas: &[f64],
    r: u32,
) -> Result<Vec<(f64, u64, f64)>> {
    let mut censuses: Vec<gaps::GapCensus> = lambdas
        .iter()
        .map(|&l| gaps::GapCensus::new(n, l, r))
        .collect::<Result<Vec<_>, _>>()?;
    let shard = store.budget.min(n + 1);
    let mut start = 1u64;
    while start <= n {
        let len = shard.min(n + 1 - start);
        let table = store.table(start, len)?;
        for census in censuses.iter_mut() {
            census.feed(&table);
        }
        start += len;
    }
    Ok(lambdas
        .iter()
        .zip(&censuses)
        .map(|(&l, c)| {
            let (count, frac) = c.finish();
            (l, count, frac)
        })
        .collect())
}

// ----------------------------------------------------------------- bounds

pub struct BoundRow {
    pub name: &'static str,
    pub value: f64,
    pub kind: &'static str,
    pub note: &'static str,
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Historical record of normalized gap bounds; computed rows are derived
/// from their formulas, quoted rows carry the published constants.
pub fn bounds_rows() -> Vec<BoundRow> {
    vec![
        BoundRow {
            name: "second-moment",
            value: 0.5,
            kind: "computed",
            note: "truncated-divisor second moment",
        },
        BoundRow {
            name: "erdos-B4",
            value: 1.0 - 1.0 / 8.0,
            kind: "computed",
            note: "pair-count spreading, sieve constant B = 4",
        },
        BoundRow {
            name: "erdos-B3.5",
            value: 1.0 - 1.0 / 7.0,
            kind: "computed",
            note: "pair-count spreading, sieve constant B = 3.5",
        },
        BoundRow {
            name: "maier",
            value: (-EULER_GAMMA).exp(),
            kind: "computed",
            note: "dense short intervals, e^-gamma",
        },
        BoundRow {
            name: "huxley-B4",
            value: 0.44254,
            kind: "quoted",
            note: "weighted second moment, B = 4",
        },
        BoundRow {
            name: "huxley-B3.5",
            value: 0.43494,
            kind: "quoted",
            note: "weighted second moment, B = 3.5",
        },
        BoundRow {
            name: "maier-huxley",
            value: 0.24846,
            kind: "quoted",
            note: "product of the previous two methods",
        },
        BoundRow {
            name: "this-method",
            value: 0.25,
            kind: "computed",
            note: "(sqrt(r) - 1/2)^2 at r = 1",
        },
        BoundRow {
            name: "elliott-halberstam",
            value: 1.5 - 2f64.sqrt(),
            kind: "computed",
            note: "(sqrt(r) - sqrt(theta/2))^2 at r = 1, theta = 1",
        },
    ]
}

pub fn bounds_json() -> Value {
    let rows: Vec<Value> = bounds_rows()
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("name".into(), json!(r.name));
            m.insert("value".into(), json!(sig12(r.value)));
            m.insert("kind".into(), json!(r.kind));
            m.insert("note".into(), json!(r.note));
            Value::Object(m)
        })
        .collect();
    json!({ "bounds": rows })
}
