//! Run configuration: defaults, environment, flags and `key=value` files.
//!
//! Precedence, lowest first: built-in defaults, `X1JACOBI_PRECISION`,
//! command-line flags, `--config FILE`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use x1jacobi::scalar::{precision_digits, MIN_PRECISION_DIGITS};
use x1jacobi::{ParameterSet, Rational};

use crate::CliError;

/// Environment variable holding the default decimal precision.
pub const PRECISION_ENV: &str = "X1JACOBI_PRECISION";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Tsv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Tsv => "tsv",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(CliError::Input(format!(
                "output_format must be json, csv or tsv (got `{other}`)"
            ))),
        }
    }
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: Rational,
    pub beta: Rational,
    pub n_max: u32,
    pub rel_tol: f64,
    pub output_format: OutputFormat,
    pub precision_digits: usize,
}

impl RunConfig {
    /// Checks the invariants not enforced by the types.
    pub fn check(&self) -> Result<(), CliError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CliError::Input(format!(
                "rel_tol = {} must lie in (0, 1)",
                self.rel_tol
            )));
        }
        if self.precision_digits < MIN_PRECISION_DIGITS {
            return Err(CliError::Input(format!(
                "precision_digits = {} must be at least {MIN_PRECISION_DIGITS}",
                self.precision_digits
            )));
        }
        Ok(())
    }

    pub fn parameters(&self) -> Result<ParameterSet<Rational>, CliError> {
        x1jacobi::validate(self.alpha.clone(), self.beta.clone()).map_err(CliError::from)
    }
}

/// Default precision: `X1JACOBI_PRECISION` if set, else the library default.
pub fn default_precision() -> Result<usize, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => parse_value(PRECISION_ENV, &v),
        Err(std::env::VarError::NotPresent) => Ok(precision_digits()),
        Err(e) => Err(CliError::Input(format!("{PRECISION_ENV}: {e}"))),
    }
}

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; `-` in keys is read as `_`; repeated keys are an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Input(format!("config line {}: expected key=value, got `{line}`", i + 1))
        })?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(CliError::Input(format!("config line {}: empty key", i + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Input(format!("config line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses one configuration value, naming the key on failure.
pub fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| CliError::Input(format!("{key} = `{value}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig {
            alpha: Rational::from_int(1),
            beta: Rational::from_int(3),
            n_max: 8,
            rel_tol: 1e-12,
            output_format: OutputFormat::Json,
            precision_digits: 40,
        }
    }

    use x1jacobi::Scalar;

    #[test]
    fn config_file_syntax() {
        let map = parse_config("# comment\n\nalpha = 1/2\nn-max=4\n").unwrap();
        assert_eq!(map["alpha"], "1/2");
        assert_eq!(map["n_max"], "4");
        assert!(parse_config("alpha 1").is_err());
        assert!(parse_config("alpha=1\nalpha=2").is_err());
        assert!(parse_config("=3").is_err());
    }

    #[test]
    fn invariants() {
        assert!(cfg().check().is_ok());
        let mut c = cfg();
        c.rel_tol = 1.0;
        assert!(c.check().is_err());
        let mut c = cfg();
        c.precision_digits = 29;
        assert!(c.check().is_err());
    }

    #[test]
    fn output_formats_round_trip() {
        for f in [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Tsv] {
            assert_eq!(f.to_string().parse::<OutputFormat>().unwrap(), f);
        }
        assert!("xml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn value_errors_name_the_key() {
        let err = parse_value::<u32>("n_max", "-1").unwrap_err();
        assert!(err.to_string().contains("n_max"));
    }
}
