//! Run configuration: a flat TOML file overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown output format {other:?} (expected csv or json)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: u64,
    /// exactly one of `theta` / `big_r` may be set; the other is derived
    pub theta: Option<f64>,
    pub big_r: Option<f64>,
    pub lambda: f64,
    pub rho: f64,
    pub k: u32,
    pub p_max: u64,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
    pub format: OutputFormat,
    pub window_budget: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 10_000_000,
            theta: None,
            big_r: None,
            lambda: 1.0,
            rho: 1.05,
            k: 1,
            p_max: 1_000_000,
            cache_dir: None,
            threads: std::thread::available_parallelism().map_or(1, |p| p.get()),
            format: OutputFormat::Json,
            window_budget: pgl_core::arith::DEFAULT_WINDOW_BUDGET,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let value: toml::Value = text.parse().context("parsing config as TOML")?;
        let table = value
            .as_table()
            .context("config must be a flat key-value table")?;
        let mut cfg = RunConfig::default();
        for (key, v) in table {
            match key.as_str() {
                "N" | "n" => cfg.n = int_of(v, key)?,
                "theta" => cfg.theta = Some(float_of(v, key)?),
                "R" | "r_level" => cfg.big_r = Some(float_of(v, key)?),
                "lambda" => cfg.lambda = float_of(v, key)?,
                "rho" => cfg.rho = float_of(v, key)?,
                "k" => cfg.k = int_of(v, key)? as u32,
                "p_max" => cfg.p_max = int_of(v, key)?,
                "cache_dir" => {
                    cfg.cache_dir = Some(PathBuf::from(
                        v.as_str().context("cache_dir must be a string")?,
                    ))
                }
                "threads" => cfg.threads = int_of(v, key)? as usize,
                "format" => cfg.format = v.as_str().unwrap_or("json").parse()?,
                "window_budget" => cfg.window_budget = int_of(v, key)?,
                "tolerances" => {
                    let tols = v.as_table().context("tolerances must be a table")?;
                    for (name, tv) in tols {
                        cfg.tolerances.insert(name.clone(), float_of(tv, name)?);
                    }
                }
                other => bail!("unknown config key {other:?}"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.is_some() && self.big_r.is_some() {
            bail!("provide exactly one of theta / R, not both");
        }
        if self.threads < 1 {
            bail!("threads must be >= 1");
        }
        Ok(())
    }

    /// Resolve the truncation level and its exponent for the configured N:
    /// whichever of theta / R was given, both come back.
    pub fn resolved_r(&self, n: u64) -> (f64, f64) {
        match (self.big_r, self.theta) {
            (Some(r), None) => (r, r.ln() / (n as f64).ln()),
            (None, Some(t)) => ((n as f64).powf(t), t),
            (None, None) => {
                let t = 0.2;
                ((n as f64).powf(t), t)
            }
            (Some(r), Some(_)) => (r, r.ln() / (n as f64).ln()),
        }
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

fn int_of(v: &toml::Value, key: &str) -> Result<u64> {
    v.as_integer()
        .filter(|i| *i >= 0)
        .map(|i| i as u64)
        .with_context(|| format!("{key} must be a non-negative integer"))
}

fn float_of(v: &toml::Value, key: &str) -> Result<f64> {
    v.as_float()
        .or_else(|| v.as_integer().map(|i| i as f64))
        .with_context(|| format!("{key} must be a number"))
}
