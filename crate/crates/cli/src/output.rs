use std::io::Write;

use serde_json::{json, Value};

use crate::config::{CliConfig, OutputFormat};

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 || (1e-5..1e16).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Quotes a CSV field when it holds a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_u64() || n.is_i64()) => sig12(x),
            _ => n.to_string(),
        },
        Value::String(s) => csv_field(s),
        other => csv_field(&other.to_string()),
    }
}

/// Dotted-key flattening of nested objects; arrays stay as JSON text.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn csv_rows(result: &Value) -> (Vec<String>, Vec<Vec<String>>) {
    let items: Vec<&Value> = match result {
        Value::Array(a) => a.iter().collect(),
        v => vec![v],
    };
    let mut header: Vec<String> = Vec::new();
    let flat: Vec<Vec<(String, Value)>> = items
        .iter()
        .map(|v| {
            let mut f = Vec::new();
            flatten("", v, &mut f);
            if f.len() == 1 && f[0].0.is_empty() {
                f[0].0 = "value".into();
            }
            f
        })
        .collect();
    for row in &flat {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let rows = flat
        .iter()
        .map(|row| {
            header
                .iter()
                .map(|h| {
                    row.iter()
                        .find(|(k, _)| k == h)
                        .map(|(_, v)| cell(v))
                        .unwrap_or_default()
                })
                .collect()
        })
        .collect();
    (header, rows)
}

pub fn config_comment(cfg: &CliConfig) -> String {
    format!(
        "# config {}",
        serde_json::to_string(cfg).expect("config serializes")
    )
}

/// Writes `result` of `command` in the configured format, echoing the config.
pub fn emit<W: Write>(
    out: &mut W,
    cfg: &CliConfig,
    command: &str,
    result: Value,
) -> std::io::Result<()> {
    match cfg.output_format {
        OutputFormat::Json => {
            let doc = json!({ "command": command, "config": cfg, "result": result });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)
        }
        OutputFormat::Csv => {
            writeln!(out, "{}", config_comment(cfg))?;
            let (header, rows) = csv_rows(&result);
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.join(","))?;
            }
            Ok(())
        }
        OutputFormat::Plain => {
            writeln!(out, "{}", config_comment(cfg))?;
            let items = match result {
                Value::Array(a) => a,
                v => vec![v],
            };
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                let mut f = Vec::new();
                flatten("", v, &mut f);
                for (k, x) in f {
                    let text = match &x {
                        Value::String(s) => s.clone(),
                        Value::Number(_) => cell(&x),
                        _ => x.to_string(),
                    };
                    writeln!(
                        out,
                        "{} = {}",
                        if k.is_empty() { "value" } else { &k },
                        text
                    )?;
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(-1.0 / 3.0 * 1e-20), "-3.33333333333e-21");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_flattens_objects() {
        let v = json!([{ "a": 1.0, "b": { "c": "x,y" } }, { "a": 2.5, "d": true }]);
        let (h, rows) = csv_rows(&v);
        assert_eq!(h, ["a", "b.c", "d"]);
        assert_eq!(rows[0], ["1", "\"x,y\"", ""]);
        assert_eq!(rows[1], ["2.5", "", "true"]);
    }
}
