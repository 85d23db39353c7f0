//! Run configuration: defaults, then the config file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use explicit_sieve::paperconst::Regime;
use explicit_sieve::par::Execution;
use explicit_sieve::rignum::XInterval;
use explicit_sieve::sievebounds::Grid;
use explicit_sieve::Ctx;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MIN_DIGITS: u32 = 15;
pub const DEFAULT_CUTOFF: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Which endpoint text output shows; JSON always carries both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RoundingPref {
    /// The endpoint that makes the reported bound safe: upper for bounds.
    Outward,
    Up,
    Down,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Working precision in significant decimal digits.
    #[arg(long, global = true, env = "EXPLICIT_SIEVE_PRECISION", value_name = "DIGITS")]
    pub precision: Option<u32>,
    /// Endpoint shown in text output.
    #[arg(long, global = true, value_enum)]
    pub rounding: Option<RoundingPref>,
    /// Use the constants conditional on the generalized Riemann hypothesis.
    #[arg(long, global = true)]
    pub grh: bool,
    /// Override the smoothing parameter lambda (decimal).
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Truncation point of the m0 series.
    #[arg(long, global = true)]
    pub k0: Option<u32>,
    /// Mantissa step of the log X grid: 0.1 or 0.01.
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    /// Euler product cutoff P.
    #[arg(long, global = true)]
    pub cutoff: Option<u64>,
    #[arg(long, global = true, conflicts_with_all = ["csv", "text"])]
    pub json: bool,
    #[arg(long, global = true, conflicts_with_all = ["json", "text"])]
    pub csv: bool,
    #[arg(long, global = true, conflicts_with_all = ["json", "csv"])]
    pub text: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// `key = value` defaults, overridden by flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub digits: u32,
    pub rounding: RoundingPref,
    pub regime: Regime,
    pub lambda: Option<String>,
    pub k0: Option<u32>,
    pub grid_step: f64,
    pub cutoff: u64,
    pub format: Format,
    pub execution: Execution,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            digits: 40,
            rounding: RoundingPref::Outward,
            regime: Regime::Unconditional,
            lambda: None,
            k0: None,
            grid_step: 0.1,
            cutoff: DEFAULT_CUTOFF,
            format: Format::Text,
            execution: Execution::Parallel,
            out: None,
        }
    }
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::input(format!("config: bad value {value:?} for {key}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn merge_file_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("config line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "precision" => self.digits = value.parse().map_err(|_| bad(key, value))?,
                "rounding" => self.rounding = RoundingPref::from_str(value, true).map_err(|_| bad(key, value))?,
                "regime" => {
                    self.regime = match value {
                        "grh" => Regime::Grh,
                        "unconditional" => Regime::Unconditional,
                        _ => return Err(bad(key, value)),
                    }
                }
                "grh" => {
                    if parse_bool(key, value)? {
                        self.regime = Regime::Grh;
                    }
                }
                "lambda" => self.lambda = Some(value.to_string()),
                "k0" => self.k0 = Some(value.parse().map_err(|_| bad(key, value))?),
                "grid_step" => self.grid_step = value.parse().map_err(|_| bad(key, value))?,
                "cutoff" => self.cutoff = value.parse().map_err(|_| bad(key, value))?,
                "format" => self.format = Format::from_str(value, true).map_err(|_| bad(key, value))?,
                "sequential" => {
                    if parse_bool(key, value)? {
                        self.execution = Execution::Sequential;
                    }
                }
                _ => return Err(CliError::input(format!("config line {}: unknown key {key:?}", n + 1))),
            }
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        self.merge_file_text(&text)
    }

    pub fn merge_flags(&mut self, g: &GlobalArgs) {
        if let Some(d) = g.precision {
            self.digits = d;
        }
        if let Some(r) = g.rounding {
            self.rounding = r;
        }
        if g.grh {
            self.regime = Regime::Grh;
        }
        if g.lambda.is_some() {
            self.lambda = g.lambda.clone();
        }
        if g.k0.is_some() {
            self.k0 = g.k0;
        }
        if let Some(s) = g.grid_step {
            self.grid_step = s;
        }
        if let Some(c) = g.cutoff {
            self.cutoff = c;
        }
        if g.json {
            self.format = Format::Json;
        } else if g.csv {
            self.format = Format::Csv;
        } else if g.text {
            self.format = Format::Text;
        }
        if g.sequential {
            self.execution = Execution::Sequential;
        }
        if g.out.is_some() {
            self.out = g.out.clone();
        }
    }

    pub fn resolve(g: &GlobalArgs) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(p) = &g.config {
            cfg.merge_file(p)?;
        }
        cfg.merge_flags(g);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.digits < MIN_DIGITS {
            return Err(CliError::input(format!("precision must be at least {MIN_DIGITS} digits")));
        }
        self.grid()?;
        if let Some(l) = &self.lambda {
            let v = XInterval::parse(l, self.ctx().prec).map_err(|e| CliError::input(format!("lambda: {e}")))?;
            if !v.is_positive() {
                return Err(CliError::input("lambda must be positive"));
            }
        }
        if self.k0 == Some(0) || self.k0 == Some(1) {
            return Err(CliError::input("k0 must be at least 2"));
        }
        Ok(())
    }

    pub fn ctx(&self) -> Ctx {
        let mut ctx = Ctx::with_digits(self.digits);
        ctx.exec = self.execution;
        ctx
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::with_step(self.grid_step).map_err(|e| CliError::input(e.to_string()))
    }

    /// Shows the endpoint that `rounding` asks for.
    pub fn show(&self, v: &XInterval, digits: usize) -> String {
        match self.rounding {
            RoundingPref::Outward | RoundingPref::Up => v.display_upper(digits),
            RoundingPref::Down => v.display_lower(digits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = RunConfig::default();
        cfg.merge_file_text("precision = 50\n# comment\nregime = grh\ncutoff=2000 # trailing\n")
            .unwrap();
        assert_eq!(cfg.digits, 50);
        assert_eq!(cfg.regime, Regime::Grh);
        assert_eq!(cfg.cutoff, 2000);
        let flags = GlobalArgs { precision: Some(60), ..GlobalArgs::default() };
        cfg.merge_flags(&flags);
        assert_eq!(cfg.digits, 60);
        assert_eq!(cfg.regime, Regime::Grh);
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = RunConfig::default();
        assert!(cfg.merge_file_text("colour = blue").is_err());
        assert!(cfg.merge_file_text("no equals sign").is_err());
        cfg.digits = 10;
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { grid_step: 0.5, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { lambda: Some("-1".into()), ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
