//! Plain CSV output with `#` metadata lines.
//!
//! Numbers are written with 15 significant digits in the shortest of fixed
//! or exponent notation, so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::io::Write;

/// Formats `x` with 15 significant digits, `%g` style.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// An in-memory table: metadata lines, a header and numeric rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Adds a `# key=value` metadata line.
    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.meta.push(format!("{key}={value}"));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.meta {
            let _ = writeln!(out, "# {m}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.render().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.5), "-0.5");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(fmt_num(1.234e-9), "1.234e-9");
        assert_eq!(fmt_num(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_num(0.00012345), "0.00012345");
    }

    #[test]
    fn round_trip_keeps_fifteen_digits() {
        for x in [0.1234567890123456, -987.654321098765, 3.3e-200] {
            let y: f64 = fmt_num(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 1e-14);
        }
    }

    #[test]
    fn renders_metadata_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.meta("eps", 0.01);
        t.push(vec![1.0, 2.5]);
        assert_eq!(t.render(), "# eps=0.01\na,b\n1,2.5\n");
    }
}
