//! Command-line front end for the pricing library: payoff specs, curve
//! backends, report serialization, and the four subcommands.

pub mod backend;
pub mod commands;
pub mod event;
pub mod market_io;
pub mod output;
pub mod payoff_spec;
pub mod portfolio_io;

use std::fmt;

use strikespan_core::{HedgeError, MarketError, PayoffError, PriceError};

/// Exit code for pricing-validity failures (tail condition, quadrature).
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code for data and usage errors (files, specs, parameters).
pub const EXIT_DATA: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// The inputs parsed but the pricing theory rejected them.
    Validation(String),
    /// Malformed files, specs, flags, or parameters.
    Data(String),
}

impl CliError {
    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Data(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

impl From<PriceError> for CliError {
    fn from(e: PriceError) -> Self {
        match e {
            PriceError::TailConditionFailed(_) | PriceError::QuadratureNoConvergence(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PayoffError> for CliError {
    fn from(e: PayoffError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<MarketError> for CliError {
    fn from(e: MarketError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<HedgeError> for CliError {
    fn from(e: HedgeError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("bad JSON: {e}"))
    }
}

/// Splits `k=v,k=v,...` into pairs. Values may contain `:` and `|` (used by
/// node and coefficient lists); only the first `=` per item separates.
pub fn parse_kv_list(s: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',') {
        if item.is_empty() {
            continue;
        }
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::data(format!("expected key=value, got `{item}`")))?;
        if k.is_empty() || v.is_empty() {
            return Err(CliError::data(format!("expected key=value, got `{item}`")));
        }
        out.push((k.to_string(), v.to_string()));
    }
    if out.is_empty() {
        return Err(CliError::data(format!("empty parameter list `{s}`")));
    }
    Ok(out)
}

pub fn parse_f64(name: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .parse()
        .map_err(|_| CliError::data(format!("parameter `{name}`: not a number: `{v}`")))?;
    if !x.is_finite() {
        return Err(CliError::data(format!(
            "parameter `{name}`: must be finite, got {v}"
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_list_roundtrip() {
        let kv = parse_kv_list("spot=100,vol=0.2,nodes=0:5|80:1").unwrap();
        assert_eq!(kv.len(), 3);
        assert_eq!(kv[2], ("nodes".to_string(), "0:5|80:1".to_string()));
    }

    #[test]
    fn kv_list_rejects_bare_words() {
        assert!(parse_kv_list("spot").is_err());
        assert!(parse_kv_list("=5").is_err());
        assert!(parse_kv_list("spot=").is_err());
        assert!(parse_kv_list("").is_err());
    }

    #[test]
    fn error_exit_codes() {
        let v = CliError::from(PriceError::TailConditionFailed("x".into()));
        assert_eq!(v.exit_code(), EXIT_VALIDATION);
        let d = CliError::data("nope");
        assert_eq!(d.exit_code(), EXIT_DATA);
        let q = CliError::from(PriceError::QuadratureNoConvergence("budget".into()));
        assert_eq!(q.exit_code(), EXIT_VALIDATION);
    }
}
