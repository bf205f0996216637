//! Minimal CSV emission: header row, comma separation, LF endings, numbers in
//! full-precision scientific notation.

use std::fmt::Write as _;

/// Formats a float with 17 significant digits so it round-trips exactly.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    header: Vec<String>,
    body: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), body: String::new() }
    }

    /// Appends a row of already-formatted fields.
    pub fn push_row<S: AsRef<str>>(&mut self, fields: &[S]) {
        debug_assert_eq!(fields.len(), self.header.len());
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            self.body.push_str(f.as_ref());
        }
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.body.len() + 64);
        let _ = writeln!(out, "{}", self.header.join(","));
        out.push_str(&self.body);
        out
    }
}
