//! Run configuration, layered as defaults < config file < environment < flags.
//! Environment and flags arrive together through clap.

use std::fs;
use std::path::Path;

use padic_zeta::padic::{DEFAULT_LEVEL_CAP, DEFAULT_PRECISION, DEFAULT_TERM_CAP};
use padic_zeta::PadicContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Partially specified settings from one source.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub prime: Option<u64>,
    pub precision: Option<u32>,
    pub r_max: Option<u32>,
    pub term_cap: Option<usize>,
    pub output: Option<OutputFormat>,
}

impl Overrides {
    /// Values in `self` win over those in `lower`.
    fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            prime: self.prime.or(lower.prime),
            precision: self.precision.or(lower.precision),
            r_max: self.r_max.or(lower.r_max),
            term_cap: self.term_cap.or(lower.term_cap),
            output: self.output.or(lower.output),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub prime: Option<u64>,
    pub precision: u32,
    pub r_max: u32,
    pub term_cap: usize,
    pub output: OutputFormat,
}

impl RunConfig {
    pub fn resolve(file: Overrides, cli: Overrides) -> Self {
        let merged = cli.over(file);
        RunConfig {
            prime: merged.prime,
            precision: merged.precision.unwrap_or(DEFAULT_PRECISION),
            r_max: merged.r_max.unwrap_or(DEFAULT_LEVEL_CAP),
            term_cap: merged.term_cap.unwrap_or(DEFAULT_TERM_CAP),
            output: merged.output.unwrap_or(OutputFormat::Text),
        }
    }

    pub fn context(&self) -> Result<PadicContext, String> {
        let p = self
            .prime
            .ok_or("a prime is required (-p, or `prime` in the config file)")?;
        PadicContext::with_budgets(p, self.precision, self.r_max, self.term_cap)
            .map_err(|e| e.to_string())
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Overrides, String> {
    let mut out = Overrides::default();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", index + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| format!("line {}: {what} {value:?} for {key}", index + 1);
        match key {
            "prime" | "p" => out.prime = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "precision" => out.precision = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "r_max" | "rmax" => out.r_max = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "term_cap" => out.term_cap = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "output_format" => {
                out.output = Some(match value {
                    "text" => OutputFormat::Text,
                    "json" => OutputFormat::Json,
                    _ => return Err(bad("unknown format")),
                })
            }
            _ => return Err(format!("line {}: unknown key {key:?}", index + 1)),
        }
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Overrides, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}
