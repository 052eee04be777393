//! Report formatting: 12-significant-digit numbers, JSON objects with
//! sorted keys (so a parse/re-emit round trip is byte-identical), and flat
//! CSV rows.

use anyhow::Result;
use pgl_core::correlate::CorrelationReport;
use pgl_core::gaps::GapReport;
use serde_json::{json, Map, Value};

/// Round to 12 significant decimal digits. Reports store the rounded value,
/// so serializing, parsing, and re-serializing reproduces the same bytes.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn opt_num(x: Option<f64>) -> Value {
    match x {
        Some(v) => json!(sig12(v)),
        None => Value::Null,
    }
}

/// Columns shared by every correlation-style report.
pub const REPORT_COLUMNS: [&str; 16] = [
    "kind",
    "h1",
    "h2",
    "h0",
    "i",
    "j",
    "k",
    "exponents",
    "N",
    "h",
    "R",
    "theta",
    "lambda",
    "empirical",
    "predicted",
    "ratio",
];

pub fn correlation_json(r: &CorrelationReport) -> Value {
    let p = &r.params;
    let mut map = Map::new();
    map.insert("kind".into(), json!(p.kind));
    map.insert(
        "h1".into(),
        p.h1.as_ref().map_or(Value::Null, |t| json!(t.to_string())),
    );
    map.insert(
        "h2".into(),
        p.h2.as_ref().map_or(Value::Null, |t| json!(t.to_string())),
    );
    map.insert("h0".into(), p.h0.map_or(Value::Null, |v| json!(v)));
    map.insert("i".into(), p.i.map_or(Value::Null, |v| json!(v)));
    map.insert("j".into(), p.j.map_or(Value::Null, |v| json!(v)));
    map.insert("k".into(), p.k.map_or(Value::Null, |v| json!(v)));
    map.insert(
        "exponents".into(),
        p.exponents.as_ref().map_or(Value::Null, |e| {
            json!(e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+"))
        }),
    );
    map.insert("N".into(), json!(p.n));
    map.insert("h".into(), p.h.map_or(Value::Null, |v| json!(v)));
    map.insert("R".into(), opt_num(p.big_r));
    map.insert("theta".into(), opt_num(p.theta));
    map.insert("lambda".into(), opt_num(p.lambda));
    map.insert("empirical".into(), json!(sig12(r.empirical)));
    map.insert("predicted".into(), opt_num(r.predicted));
    map.insert("ratio".into(), opt_num(r.ratio));
    map.insert(
        "flag".into(),
        r.flag.as_ref().map_or(Value::Null, |f| json!(f)),
    );
    map.insert("runtime_seconds".into(), json!(sig12(r.runtime_seconds)));
    Value::Object(map)
}

fn num_str(x: f64) -> String {
    format!("{}", sig12(x))
}

fn opt_str<T: ToString>(x: Option<T>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

pub fn correlation_csv_row(r: &CorrelationReport) -> Vec<String> {
    let p = &r.params;
    vec![
        p.kind.to_string(),
        p.h1.as_ref().map_or(String::new(), |t| t.to_string()),
        p.h2.as_ref().map_or(String::new(), |t| t.to_string()),
        opt_str(p.h0),
        opt_str(p.i),
        opt_str(p.j),
        opt_str(p.k),
        p.exponents.as_ref().map_or(String::new(), |e| {
            e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+")
        }),
        p.n.to_string(),
        opt_str(p.h),
        p.big_r.map_or(String::new(), num_str),
        p.theta.map_or(String::new(), num_str),
        p.lambda.map_or(String::new(), num_str),
        num_str(r.empirical),
        r.predicted.map_or(String::new(), num_str),
        r.ratio.map_or(String::new(), num_str),
    ]
}

/// Full CSV header: report columns plus flag and runtime.
pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = REPORT_COLUMNS.iter().map(|s| s.to_string()).collect();
    cols.push("flag".into());
    cols.push("runtime_seconds".into());
    cols
}

pub fn csv_row_full(r: &CorrelationReport) -> Vec<String> {
    let mut row = correlation_csv_row(r);
    row.push(r.flag.clone().unwrap_or_default());
    row.push(num_str(r.runtime_seconds));
    row
}

pub fn gap_report_json(g: &GapReport) -> Value {
    let mut map = Map::new();
    map.insert("N".into(), json!(g.n));
    map.insert("h".into(), json!(g.h));
    map.insert("lambda".into(), json!(sig12(g.lambda)));
    map.insert("rho".into(), json!(sig12(g.rho)));
    map.insert("theta".into(), json!(sig12(g.theta)));
    map.insert("k".into(), json!(g.k));
    map.insert(
        "coefficients".into(),
        json!(g.coefficients.iter().map(|c| sig12(*c)).collect::<Vec<_>>()),
    );
    map.insert("s_k_value".into(), opt_num(g.s_k_value));
    map.insert("q_form_value".into(), opt_num(g.q_form_value));
    map.insert("q_r_plus".into(), g.q_r_plus.map_or(Value::Null, |v| json!(v)));
    map.insert(
        "census".into(),
        json!(g
            .census
            .iter()
            .map(|(l, c, f)| json!({"lambda": sig12(*l), "count": c, "fraction": sig12(*f)}))
            .collect::<Vec<_>>()),
    );
    map.insert(
        "checks".into(),
        json!(g
            .checks
            .iter()
            .map(|(name, pass, detail)| json!({"name": name, "pass": pass, "value": sig12(*detail)}))
            .collect::<Vec<_>>()),
    );
    Value::Object(map)
}

/// Write rows as CSV to any writer.
pub fn write_csv<W: std::io::Write>(
    out: W,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounding() {
        assert_eq!(sig12(0.25), 0.25);
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(123456789012345.0), 123456789012000.0);
        assert_eq!(sig12(0.0), 0.0);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let v = json!({
            "b": sig12(1.0 / 3.0),
            "a": sig12(0.08578643762690485),
            "n": 10_000_000u64,
        });
        let s1 = serde_json::to_string(&v).unwrap();
        let parsed: Value = serde_json::from_str(&s1).unwrap();
        let s2 = serde_json::to_string(&parsed).unwrap();
        assert_eq!(s1, s2);
    }
}
