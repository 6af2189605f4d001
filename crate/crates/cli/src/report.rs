//! Serializable reports and their JSON, CSV and text renderings.

use num_rational::BigRational;
use rarebasis_core::Dyadic;
use serde::Serialize;
use serde_json::Value;

/// An exact dyadic number with a decimal rendering for display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicJson {
    pub mantissa: String,
    pub exponent: i64,
    pub decimal: String,
}

impl From<&Dyadic> for DyadicJson {
    fn from(d: &Dyadic) -> Self {
        DyadicJson { mantissa: d.mantissa().to_string(), exponent: d.exponent(), decimal: d.to_decimal_string() }
    }
}

/// An exact rational with an approximate value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalJson {
    pub exact: String,
    pub approx: f64,
}

impl RationalJson {
    pub fn new(r: &BigRational, approx: f64) -> Self {
        RationalJson { exact: r.to_string(), approx }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?} (json, csv, text)")),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Aligned `key  value` lines, flattening nested objects with dotted keys.
/// Exact dyadics are shown by their decimal rendering.
pub fn to_text<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("reports serialize");
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

fn is_dyadic(map: &serde_json::Map<String, Value>) -> bool {
    map.len() == 3 && map.contains_key("mantissa") && map.contains_key("exponent") && map.contains_key("decimal")
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) if is_dyadic(map) => {
            rows.push((prefix.to_string(), map["decimal"].as_str().unwrap_or_default().to_string()));
        }
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&join(k), inner, rows);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            for (i, inner) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), inner, rows);
            }
        }
        Value::Array(_) => rows.push((prefix.to_string(), compact(v))),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), "-".to_string())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("value serializes")
}

/// Joins CSV fields, quoting those that need it.
pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = fields
        .into_iter()
        .map(|f| {
            let f = f.as_ref();
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    out
}

/// Least-squares slope of `ln y` against `ln x` over positive points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_json_is_exact() {
        let d: Dyadic = "5/2".parse().unwrap();
        let j = DyadicJson::from(&d);
        assert_eq!(j.mantissa, "5");
        assert_eq!(j.exponent, -1);
        assert_eq!(j.decimal, "2.5");
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (2..10).map(|k| (k as f64, (k * k) as f64 * 0.3)).collect();
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn text_flattens() {
        #[derive(Serialize)]
        struct Inner {
            v: DyadicJson,
        }
        #[derive(Serialize)]
        struct Outer {
            name: &'static str,
            inner: Inner,
            list: Vec<i64>,
        }
        let t = to_text(&Outer { name: "x", inner: Inner { v: DyadicJson::from(&Dyadic::from_int(80)) }, list: vec![1, 2] });
        assert_eq!(t, "name     x\ninner.v  80\nlist     [1,2]\n");
    }

    #[test]
    fn csv_quotes() {
        assert_eq!(csv_row(["a", "b,c"]), "a,\"b,c\"\n");
    }
}
