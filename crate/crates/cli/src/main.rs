use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pgl_cli::commands::{
    bounds_json, bounds_rows, gaps_run, lambda_r_point, parse_grid, parse_rational,
    parse_shifts, qform_json, run_correlation, singular_series_json, tables_summary,
    threshold_rows, CorrelationSpec, GapsArgs, GapsMode,
};
use pgl_cli::config::{OutputFormat, RunConfig};
use pgl_cli::report::{self, csv_header, csv_row_full, sig12};
use pgl_cli::store::Store;
use pgl_cli::verify;
use serde_json::json;

/// Prime-gap laboratory: sieved tables, truncated divisor sums, correlation
/// experiments, and the exact moment-form optimizer.
#[derive(Parser)]
#[command(name = "pgl", version, about)]
struct Cli {
    /// Flat TOML config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for binary window caches
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Worker threads for range-partitioned sums
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (and cache) an arithmetic-function table window
    Tables {
        #[arg(long)]
        start: u64,
        #[arg(long)]
        len: u64,
    },
    /// Singular series of a shift tuple, with exact prefix and tail bound
    SingularSeries {
        /// Comma-separated shifts, e.g. 0,2,6
        #[arg(long)]
        shifts: String,
        #[arg(long)]
        p_max: Option<u64>,
    },
    /// Point value of the truncated divisor sum
    LambdaR {
        #[arg(long)]
        n: u64,
        #[arg(long = "R")]
        big_r: f64,
    },
    /// Correlation experiments (single run or CSV grid)
    Correlate(CorrelateArgs),
    /// Exact moment form: coefficients, Hankel determinants, optimizer, Q
    Qform {
        #[arg(long)]
        k: u32,
        /// Rational like 1, 5/7, or 0.25
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        rho: String,
    },
    /// Detection thresholds lambda_k and their limits
    Threshold {
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 40)]
        k_max: u32,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Detection statistic, cluster counts, census, and checks
    Gaps {
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value = "sk")]
        mode: String,
    },
    /// Historical table of normalized prime-gap bounds
    Bounds,
    /// Run the exact and empirical verification suites
    VerifyAll {
        /// Run only the exact-identity stage
        #[arg(long)]
        skip_empirical: bool,
        /// Write the JSON report bundle here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CorrelateArgs {
    /// pair | with-prime | moment | moment-tilde | gallagher | generalized
    #[arg(long, default_value = "pair")]
    kind: String,
    #[arg(long)]
    h1: Option<String>,
    #[arg(long)]
    h2: Option<String>,
    #[arg(long)]
    h0: Option<u64>,
    #[arg(long)]
    i: Option<u32>,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// Per-shift exponents like 1+2+1
    #[arg(long)]
    exponents: Option<String>,
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// CSV parameter grid (one experiment per row)
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Output file for grid runs (stdout otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = effective_config(&cli)?;
    let store = Store::new(cfg.cache_dir.clone(), cfg.window_budget, cfg.threads);
    let stdout = std::io::stdout();

    match cli.command {
        Command::Tables { start, len } => {
            let v = tables_summary(&store, start, len)?;
            emit_value(&cfg, &v)?;
        }
        Command::SingularSeries { shifts, p_max } => {
            let t = parse_shifts(&shifts)?;
            let v = singular_series_json(&t, p_max.unwrap_or(cfg.p_max))?;
            // this subcommand is JSON by contract
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Command::LambdaR { n, big_r } => {
            let v = lambda_r_point(n, big_r)?;
            emit_value(&cfg, &v)?;
        }
        Command::Correlate(args) => {
            let reports = if let Some(grid) = &args.grid {
                let specs = parse_grid(grid)?;
                let mut out = Vec::with_capacity(specs.len());
                for spec in specs {
                    out.push(run_correlation(&store, &spec, cfg.p_max)?);
                }
                out
            } else {
                let spec = spec_from_args(&args, &cfg)?;
                vec![run_correlation(&store, &spec, cfg.p_max)?]
            };
            match (&args.out, cfg.format) {
                (Some(path), _) => {
                    let rows: Vec<Vec<String>> = reports.iter().map(csv_row_full).collect();
                    let file = std::fs::File::create(path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    report::write_csv(file, &csv_header(), &rows)?;
                }
                (None, OutputFormat::Csv) => {
                    let rows: Vec<Vec<String>> = reports.iter().map(csv_row_full).collect();
                    report::write_csv(stdout.lock(), &csv_header(), &rows)?;
                }
                (None, OutputFormat::Json) => {
                    let items: Vec<_> = reports.iter().map(report::correlation_json).collect();
                    println!("{}", serde_json::to_string_pretty(&json!(items))?);
                }
            }
        }
        Command::Qform { k, lambda, rho } => {
            let v = qform_json(k, &parse_rational(&lambda)?, &parse_rational(&rho)?)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Command::Threshold {
            r,
            k_max,
            theta,
            rho,
        } => {
            let (rows, limit, eh_limit) = threshold_rows(r, k_max, theta, rho)?;
            // CSV by contract
            let mut w = csv::Writer::from_writer(stdout.lock());
            w.write_record(["k", "theta", "rho", "lambda_k"])?;
            for row in rows {
                w.write_record([
                    row.k.to_string(),
                    format!("{}", sig12(row.theta)),
                    format!("{}", sig12(row.rho)),
                    format!("{}", sig12(row.lambda_k)),
                ])?;
            }
            w.write_record(["limit", "", "", &format!("{}", sig12(limit))])?;
            w.write_record(["eh-limit", "", "", &format!("{}", sig12(eh_limit))])?;
            w.flush()?;
        }
        Command::Gaps {
            n,
            lambda,
            rho,
            k,
            theta,
            r,
            mode,
        } => {
            let args = GapsArgs {
                mode: mode.parse::<GapsMode>()?,
                n: n.unwrap_or(cfg.n),
                lambda: lambda.unwrap_or(cfg.lambda),
                rho: rho.unwrap_or(cfg.rho),
                k: k.unwrap_or(cfg.k),
                theta: theta.or(cfg.theta),
                r,
                p_max: cfg.p_max,
            };
            let rep = gaps_run(&store, &args)?;
            match cfg.format {
                OutputFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&report::gap_report_json(&rep))?)
                }
                OutputFormat::Csv => {
                    let mut w = csv::Writer::from_writer(stdout.lock());
                    w.write_record([
                        "N", "h", "lambda", "rho", "theta", "k", "s_k", "q_form", "q_r_plus",
                    ])?;
                    w.write_record([
                        rep.n.to_string(),
                        rep.h.to_string(),
                        format!("{}", sig12(rep.lambda)),
                        format!("{}", sig12(rep.rho)),
                        format!("{}", sig12(rep.theta)),
                        rep.k.to_string(),
                        rep.s_k_value.map_or(String::new(), |v| format!("{}", sig12(v))),
                        rep.q_form_value.map_or(String::new(), |v| format!("{}", sig12(v))),
                        rep.q_r_plus.map_or(String::new(), |v| v.to_string()),
                    ])?;
                    for (l, count, frac) in &rep.census {
                        w.write_record([
                            "census".to_string(),
                            String::new(),
                            format!("{}", sig12(*l)),
                            String::new(),
                            String::new(),
                            String::new(),
                            count.to_string(),
                            format!("{}", sig12(*frac)),
                            String::new(),
                        ])?;
                    }
                    for (name, pass, value) in &rep.checks {
                        w.write_record([
                            name.clone(),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                            String::new(),
                            pass.to_string(),
                            format!("{}", sig12(*value)),
                            String::new(),
                        ])?;
                    }
                    w.flush()?;
                }
            }
        }
        Command::Bounds => match cfg.format {
            OutputFormat::Json => {
                println!("{}", serde_json::to_string_pretty(&bounds_json())?)
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(stdout.lock());
                w.write_record(["name", "value", "kind", "note"])?;
                for row in bounds_rows() {
                    w.write_record([
                        row.name.to_string(),
                        format!("{}", sig12(row.value)),
                        row.kind.to_string(),
                        row.note.to_string(),
                    ])?;
                }
                w.flush()?;
            }
        },
        Command::VerifyAll {
            skip_empirical,
            out,
        } => {
            let mut results = verify::exact_criteria();
            if !skip_empirical {
                results.extend(verify::empirical_criteria(&store, cfg.n));
            }
            results.sort_by_key(|r| r.id);
            for r in &results {
                println!("{}", r.summary_line());
            }
            let bundle = verify::bundle_json(&results);
            if let Some(path) = out {
                let mut f = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                writeln!(f, "{}", serde_json::to_string_pretty(&bundle)?)?;
                println!("bundle written to {}", path.display());
            }
            let failed = results.iter().filter(|r| !r.passed()).count();
            if failed > 0 {
                eprintln!("{failed} criteria failed");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn spec_from_args(args: &CorrelateArgs, cfg: &RunConfig) -> Result<CorrelationSpec> {
    let mut spec = CorrelationSpec {
        kind: args.kind.clone(),
        n: args.n.unwrap_or(cfg.n),
        h0: args.h0,
        i: args.i,
        j: args.j,
        k: args.k,
        theta: args.theta.or(cfg.theta),
        big_r: args.big_r.or(cfg.big_r),
        h: args.h,
        lambda: args.lambda,
        ..Default::default()
    };
    if let Some(s) = &args.h1 {
        spec.h1 = Some(parse_shifts(s)?);
    }
    if let Some(s) = &args.h2 {
        spec.h2 = Some(parse_shifts(s)?);
    }
    if let Some(s) = &args.exponents {
        spec.exponents = Some(
            s.split(['+', ','])
                .map(|p| p.trim().parse::<u32>().context("bad exponent"))
                .collect::<Result<_>>()?,
        );
    }
    Ok(spec)
}

fn emit_value(cfg: &RunConfig, v: &serde_json::Value) -> Result<()> {
    match cfg.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(v)?),
        OutputFormat::Csv => {
            // flatten one level: keys become the header
            let obj = v.as_object().context("expected an object")?;
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            w.write_record(obj.keys())?;
            w.write_record(obj.values().map(|x| match x {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            }))?;
            w.flush()?;
        }
    }
    Ok(())
}
