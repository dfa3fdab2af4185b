//! Deterministic rendering of numbers and tables.
//!
//! Exact values print as `p/q`, extended-precision values as decimal strings
//! with the configured number of significant digits, and `f64` values in
//! their shortest round-trip scientific form. JSON carries every number as a
//! string so golden files never depend on binary float printing.

use serde_json::{Map, Value};

use x1jacobi::{Rational, Real};

use crate::config::OutputFormat;

pub fn rational(x: &Rational) -> String {
    x.to_string()
}

pub fn real(x: &Real, digits: usize) -> String {
    x.to_decimal_string(digits)
}

pub fn float(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0e0"
        "0e0".to_string()
    } else {
        format!("{x:e}")
    }
}

/// Rows of string cells under fixed headers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(headers: I) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Array of objects keyed by header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .headers
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned().map(Value::String))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn delimited(&self, sep: &str, header_prefix: &str) -> String {
        let mut out = format!("{header_prefix}{}\n", self.headers.join(sep));
        for row in &self.rows {
            out.push_str(&row.join(sep));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => json_string(&self.to_json()),
            OutputFormat::Csv => self.delimited(",", ""),
            OutputFormat::Tsv => self.delimited("\t", ""),
        }
    }

    /// Two-column plot data: a `#` header line, then tab separated rows.
    pub fn plot_data(&self) -> String {
        self.delimited("\t", "# ")
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use x1jacobi::Scalar;

    #[test]
    fn number_formats() {
        assert_eq!(rational(&Rational::new(-3, 4)), "-3/4");
        assert_eq!(rational(&Rational::from_int(3)), "3");
        assert_eq!(float(0.5), "5e-1");
        assert_eq!(float(-0.0), "0e0");
        assert_eq!(float(1e-300), "1e-300");
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(["x", "y"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.render(OutputFormat::Csv), "x,y\n1,2\n");
        assert_eq!(t.render(OutputFormat::Tsv), "x\ty\n1\t2\n");
        assert_eq!(t.plot_data(), "# x\ty\n1\t2\n");
        let json = t.render(OutputFormat::Json);
        let back: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0]["y"], "2");
    }
}
