use anyhow::Result;
use cyclotrace::ExtReal;
use serde_json::Value;

use crate::config::Format;

/// Positional notation for MPFR's `d.ddde±k` output when |k| ≤ 40, trailing zeros trimmed.
pub fn plain(s: &str) -> String {
    let Some((mant, exp)) = s.split_once(['e', 'E']) else {
        return trim(s.to_string());
    };
    let Ok(exp) = exp.parse::<i64>() else { return s.to_string() };
    if exp.abs() > 40 {
        return s.to_string();
    }
    let (sign, mant) = mant.strip_prefix('-').map(|m| ("-", m)).unwrap_or(("", mant));
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: String = format!("{int}{frac}");
    let point = int.len() as i64 + exp;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    let body = body.trim_start_matches('0');
    let body = if body.is_empty() || body.starts_with('.') { format!("0{body}") } else { body.to_string() };
    let out = trim(body);
    if out == "0" {
        out
    } else {
        format!("{sign}{out}")
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn ext(v: &ExtReal, digits: usize) -> Value {
    Value::String(plain(&v.to_decimal(digits.min((v.prec() as f64 * std::f64::consts::LOG10_2) as usize))))
}

/// Short decimal for error estimates and other double-precision numbers.
pub fn f64s(v: f64) -> Value {
    Value::String(if v == 0.0 { "0".into() } else { format!("{v:.6e}") })
}

/// Full round-trip decimal of a double.
pub fn f64_exact(v: f64) -> Value {
    Value::String(plain(&format!("{v:e}")))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn rows(v: &Value) -> Vec<Vec<(String, String)>> {
    let items: Vec<&Value> = match v {
        Value::Array(a) => a.iter().collect(),
        other => vec![other],
    };
    items
        .into_iter()
        .map(|x| {
            let mut r = vec![];
            flatten("", x, &mut r);
            r
        })
        .collect()
}

fn header(rows: &[Vec<(String, String)>]) -> Vec<String> {
    let mut h: Vec<String> = vec![];
    for r in rows {
        for (k, _) in r {
            if !h.contains(k) {
                h.push(k.clone());
            }
        }
    }
    h
}

fn cell<'a>(r: &'a [(String, String)], k: &str) -> &'a str {
    r.iter().find(|(x, _)| x == k).map(|(_, v)| v.as_str()).unwrap_or("")
}

pub fn render(v: &Value, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v)? + "\n"),
        Format::Csv => {
            let rows = rows(v);
            let h = header(&rows);
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(&h)?;
            for r in &rows {
                w.write_record(h.iter().map(|k| cell(r, k)))?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Text => {
            let rows = rows(v);
            if !v.is_array() {
                let r = &rows[0];
                let width = r.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                return Ok(r.iter().map(|(k, x)| format!("{k:<width$}  {x}\n")).collect());
            }
            let h = header(&rows);
            let widths: Vec<usize> =
                h.iter().map(|k| rows.iter().map(|r| cell(r, k).chars().count()).chain([k.chars().count()]).max().unwrap_or(0)).collect();
            let line = |cells: Vec<&str>| -> String {
                let s: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                s.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(h.iter().map(|s| s.as_str()).collect());
            for r in &rows {
                out += &line(h.iter().map(|k| cell(r, k)).collect());
            }
            Ok(out)
        }
    }
}
