//! Report envelope and emission in the three formats.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const BUILD: &str = env!("EXPLICIT_SIEVE_BUILD");

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub build: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub regime: &'a str,
    pub precision_digits: u32,
    pub provenance: BTreeMap<&'static str, &'static str>,
    pub result: &'a T,
}

/// What a command hands back for emission.
pub struct Rendered<'a, T: Serialize> {
    pub command: &'a str,
    pub regime: Option<&'a str>,
    pub provenance: &'a [(&'static str, &'static str)],
    pub result: &'a T,
    pub text: String,
    /// `None` for commands without a tabular form.
    pub csv: Option<String>,
}

pub fn emit<T: Serialize>(cfg: &RunConfig, r: Rendered<'_, T>) -> Result<(), CliError> {
    let body = match cfg.format {
        Format::Text => r.text,
        Format::Csv => r
            .csv
            .ok_or_else(|| CliError::input(format!("{} has no tabular output; use --json or --text", r.command)))?,
        Format::Json => {
            let report = Report {
                tool: "explicit-sieve",
                version: env!("CARGO_PKG_VERSION"),
                build: BUILD,
                command: r.command,
                config: cfg,
                regime: r.regime.unwrap_or("n/a"),
                precision_digits: cfg.digits,
                provenance: r.provenance.iter().copied().collect(),
                result: r.result,
            };
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::input(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match &cfg.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::input(e.to_string()))
        }
    }
}

/// Simple aligned text table.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut s = line(header.to_vec());
    s.push('\n');
    s.push_str(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    s.push('\n');
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
        s.push('\n');
    }
    s
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let quote = |c: &str| {
        if c.contains([',', '"', '\n']) {
            format!("\"{}\"", c.replace('"', "\"\""))
        } else {
            c.to_string()
        }
    };
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_commas() {
        let s = csv(&["a", "b"], &[vec!["1".into(), "k^2 + 3, k".into()]]);
        assert_eq!(s, "a,b\n1,\"k^2 + 3, k\"\n");
    }

    #[test]
    fn table_aligns() {
        let s = table(&["i", "poly"], &[vec!["0".into(), "k^2 + 3".into()]]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "i  poly");
        assert_eq!(lines[1], "-  -------");
        assert_eq!(lines[2], "0  k^2 + 3");
    }
}
