//! Market quote CSV: header `strike,call_price` with strictly increasing
//! strikes; an optional third column `digital_ge` pins the digital curve at
//! the quoted strikes instead of the slope-implied values.

use std::path::Path;

use strikespan_core::{table_curve, table_curve_with_digitals, TableCurve};

use crate::CliError;

pub fn read_market_csv(path: impl AsRef<Path>, discount: f64) -> Result<TableCurve, CliError> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::data(format!("market CSV `{}`: {e}", path.display())))?;

    let headers = rdr
        .headers()
        .map_err(|e| CliError::data(format!("market CSV `{}`: {e}", path.display())))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    let with_digitals = match cols.as_slice() {
        ["strike", "call_price"] => false,
        ["strike", "call_price", "digital_ge"] => true,
        other => {
            return Err(CliError::data(format!(
                "market CSV `{}`: expected header `strike,call_price[,digital_ge]`, got `{}`",
                path.display(),
                other.join(",")
            )))
        }
    };

    let mut two = Vec::new();
    let mut three = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::data(format!("market CSV `{}`: {e}", path.display())))?;
        let line = i + 2;
        let field = |j: usize| -> Result<f64, CliError> {
            rec.get(j)
                .ok_or_else(|| {
                    CliError::data(format!("market CSV line {line}: missing column {j}"))
                })?
                .parse::<f64>()
                .map_err(|_| {
                    CliError::data(format!(
                        "market CSV line {line}: not a number: `{}`",
                        rec.get(j).unwrap_or("")
                    ))
                })
        };
        if with_digitals {
            three.push((field(0)?, field(1)?, field(2)?));
        } else {
            two.push((field(0)?, field(1)?));
        }
    }

    let curve = if with_digitals {
        table_curve_with_digitals(&three, discount)?
    } else {
        table_curve(&two, discount)?
    };
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("quotes.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn reads_two_column_quotes() {
        let (_d, path) = write_file("strike,call_price\n80,25\n100,12\n120,5\n");
        let c = read_market_csv(&path, 1.0).unwrap();
        use strikespan_core::CallCurve;
        assert_eq!(c.lambda(100.0), 12.0);
        assert_eq!(c.lambda(110.0), 8.5);
    }

    #[test]
    fn reads_digital_overrides() {
        let (_d, path) = write_file(
            "strike,call_price,digital_ge\n80,25,0.9\n100,12,0.6\n120,5,0.3\n",
        );
        let c = read_market_csv(&path, 1.0).unwrap();
        use strikespan_core::CallCurve;
        assert_eq!(c.digital_ge(100.0), 0.6);
    }

    #[test]
    fn rejects_wrong_header() {
        let (_d, path) = write_file("k,price\n80,25\n");
        let e = read_market_csv(&path, 1.0).unwrap_err();
        assert!(e.message().contains("expected header"), "{e}");
    }

    #[test]
    fn rejects_text_cells_with_line_number() {
        let (_d, path) = write_file("strike,call_price\n80,25\n100,abc\n");
        let e = read_market_csv(&path, 1.0).unwrap_err();
        assert!(e.message().contains("line 3"), "{e}");
    }

    #[test]
    fn convexity_violations_surface_from_the_curve_builder() {
        // Middle quote above the chord of its neighbours.
        let (_d, path) = write_file("strike,call_price\n80,25\n100,24\n120,5\n");
        let e = read_market_csv(&path, 1.0).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_DATA);
        assert!(e.message().contains("100"), "{e}");
    }
}
