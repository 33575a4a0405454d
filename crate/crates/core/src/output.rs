//! Two-column tables rendered as CSV or JSON.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// An output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// The first column: an integer state index or a real coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Key {
    Index(i64),
    Coord(f64),
}

/// A table with an ordered metadata header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// `(key, value)` pairs, in print order.
    pub meta: Vec<(String, String)>,
    /// Name of the first column: `index`, `x` or `r`.
    pub key_name: String,
    pub rows: Vec<(Key, f64)>,
    /// Set when the table is legitimately empty.
    pub status: Option<String>,
}

/// `v` with 15 significant digits, positional where that stays short.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        format!("{:.*}", (14 - exp) as usize, v)
    } else {
        format!("{v:.14e}")
    }
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("#");
        for (k, v) in &self.meta {
            let _ = write!(out, " {k}={v}");
        }
        out.push('\n');
        if let Some(s) = &self.status {
            let _ = writeln!(out, "# status={s}");
        }
        let _ = writeln!(out, "{},value", self.key_name);
        for (key, value) in &self.rows {
            let key = match key {
                Key::Index(i) => i.to_string(),
                Key::Coord(x) => format_number(*x),
            };
            let _ = writeln!(out, "{key},{}", format_number(*value));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta: Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        if let Some(s) = &self.status {
            meta.insert("status".into(), Value::String(s.clone()));
        }
        let data: Vec<Value> = self
            .rows
            .iter()
            .map(|(key, value)| {
                let key = match key {
                    Key::Index(i) => json!(i),
                    Key::Coord(x) => json!(x),
                };
                let mut row = Map::new();
                row.insert(self.key_name.clone(), key);
                row.insert("value".into(), json!(value));
                Value::Object(row)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "data": data }))
            .expect("table values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(format_number(-6.125), "-6.12500000000000");
        assert_eq!(format_number(-0.03125), "-0.0312500000000000");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_number(1e-9), "1.00000000000000e-9");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn csv_and_json_layout() {
        let t = Table {
            meta: vec![("family".into(), "hulthen".into())],
            key_name: "index".into(),
            rows: vec![(Key::Index(0), -6.125), (Key::Index(1), -0.5)],
            status: None,
        };
        assert_eq!(
            t.to_csv(),
            "# family=hulthen\nindex,value\n0,-6.12500000000000\n1,-0.500000000000000\n"
        );
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["meta"]["family"], "hulthen");
        assert_eq!(v["data"][1]["value"], -0.5);
    }
}
