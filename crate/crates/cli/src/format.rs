//! Report envelope and CSV rendering.

use serde::Serialize;

use threshold_lab_core::SCHEMA_VERSION;

use crate::args::RunConfig;

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub result: &'a T,
}

pub fn to_json<T: Serialize>(command: &str, config: &RunConfig, result: &T) -> String {
    let envelope = Envelope {
        schema: SCHEMA_VERSION,
        command,
        config,
        result,
    };
    let mut out = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    out.push('\n');
    out
}

/// `x` with six significant digits, in the style of C's `%g`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Builder for a CSV table; cells containing commas or quotes are quoted.
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Self { out: String::new() };
        csv.row(header.iter().map(|h| h.to_string()));
        csv
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().map(quote).collect();
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

fn quote(cell: String) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell
    }
}

/// Two-column `key,value` CSV.
pub fn key_values(rows: &[(&str, String)]) -> String {
    let mut csv = Csv::new(&["key", "value"]);
    for (k, v) in rows {
        csv.row([k.to_string(), v.clone()]);
    }
    csv.finish()
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}
