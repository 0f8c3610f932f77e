//! Record output as CSV or JSON lines with a fixed numeric precision.

use std::io::{self, Write};

use serde_json::{Map, Value};

pub const SIGNIFICANT_DIGITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One output row; keys keep insertion order.
#[derive(Debug, Clone, Default)]
pub struct Record(Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn num(self, key: &str, x: f64) -> Self {
        self.with(key, round_significant(x))
    }

    pub fn opt_num(self, key: &str, x: Option<f64>) -> Self {
        match x {
            Some(x) => self.num(key, x),
            None => self.with(key, Value::Null),
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] so JSON and CSV carry the same digits.
fn round_significant(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format_significant(x);
    serde_json::Number::from_f64(text.parse().expect("formatted float")).map_or(Value::Null, Value::Number)
}

pub fn format_significant(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::Number(n) => n.as_f64().map(format_significant).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(_) | Value::Object(_) => fix_json(v).to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn fix_json(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round_significant(n.as_f64().expect("f64")),
        Value::Array(items) => Value::Array(items.iter().map(fix_json).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), fix_json(v))).collect()),
        other => other.clone(),
    }
}

/// Writes a header row plus one line per record (CSV), or one JSON object
/// per line.
pub fn write_records(out: &mut dyn Write, records: &[Record], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            if let Some(first) = records.first() {
                let header: Vec<&str> = first.0.iter().map(|(k, _)| k.as_str()).collect();
                writeln!(out, "{}", header.join(","))?;
            }
            for r in records {
                let cells: Vec<String> = r.0.iter().map(|(_, v)| csv_cell(v)).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            for r in records {
                let obj: Map<String, Value> = r.0.iter().map(|(k, v)| (k.clone(), fix_json(v))).collect();
                writeln!(out, "{}", Value::Object(obj))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(format_significant(3.650281539872885), "3.65028154");
        assert_eq!(format_significant(15.454813220625093), "15.45481322");
        assert_eq!(format_significant(-0.18301270189221933), "-0.1830127019");
        assert_eq!(format_significant(3.0), "3");
        assert_eq!(format_significant(1e-20), "1.000000000e-20");
    }

    #[test]
    fn csv_and_json_agree() {
        let recs = vec![Record::new().with("name", "a,b").num("x", 1.0 / 3.0).with("ok", true)];
        let mut csv = Vec::new();
        write_records(&mut csv, &recs, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "name,x,ok\n\"a,b\",0.3333333333,true\n");
        let mut json = Vec::new();
        write_records(&mut json, &recs, Format::Json).unwrap();
        assert_eq!(String::from_utf8(json).unwrap(), "{\"name\":\"a,b\",\"x\":0.3333333333,\"ok\":true}\n");
    }
}
