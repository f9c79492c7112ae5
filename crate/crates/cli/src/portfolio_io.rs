//! Portfolio export: CSV with columns `instrument,strike,strike2,weight,flavor`.
//!
//! Rows are one `cash` row (strike columns empty), one `digital` row per
//! strip and jump position (`flavor` is `ge` or `gt`), and one `callspread`
//! row per cell (`strike`/`strike2` are the lower and upper strikes).

use std::path::Path;

use strikespan_core::HedgePortfolio;

use crate::output::fmt_f64;
use crate::CliError;

pub fn portfolio_rows(h: &HedgePortfolio) -> Vec<[String; 5]> {
    let mut rows = Vec::with_capacity(1 + h.digital_strip.len() + h.call_spreads.len());
    rows.push([
        "cash".to_string(),
        String::new(),
        String::new(),
        fmt_f64(h.cash),
        String::new(),
    ]);
    for d in &h.digital_strip {
        rows.push([
            "digital".to_string(),
            fmt_f64(d.strike),
            String::new(),
            fmt_f64(d.weight),
            d.flavor.as_str().to_string(),
        ]);
    }
    for s in &h.call_spreads {
        rows.push([
            "callspread".to_string(),
            fmt_f64(s.lo),
            fmt_f64(s.hi),
            fmt_f64(s.weight),
            String::new(),
        ]);
    }
    rows
}

pub fn write_portfolio_csv(h: &HedgePortfolio, path: impl AsRef<Path>) -> Result<usize, CliError> {
    let path = path.as_ref();
    let mut wtr = csv::Writer::from_path(path)
        .map_err(|e| CliError::data(format!("portfolio CSV `{}`: {e}", path.display())))?;
    wtr.write_record(["instrument", "strike", "strike2", "weight", "flavor"])?;
    let rows = portfolio_rows(h);
    for row in &rows {
        wtr.write_record(row)?;
    }
    wtr.flush()?;
    Ok(rows.len())
}
