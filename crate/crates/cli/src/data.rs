use std::path::Path;

use crate::error::{CliError, Result};

/// Reads one number per line. A single non-numeric first line is taken as a
/// header; blank lines are skipped.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_values(&text).map_err(|msg| CliError::invalid(format!("{}: {msg}", path.display())))
}

pub fn parse_values(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut values = Vec::new();
    let mut seen_line = false;
    for (i, line) in text.lines().enumerate() {
        let field = line.trim().trim_end_matches(',').trim();
        if field.is_empty() {
            continue;
        }
        if field.contains(',') {
            return Err(format!("line {}: expected a single column", i + 1));
        }
        let first = !seen_line;
        seen_line = true;
        match field.trim_matches('"').parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err(format!("line {}: value is not finite", i + 1)),
            Err(_) if first => continue,
            Err(_) => return Err(format!("line {}: not a number: {field:?}", i + 1)),
        }
    }
    if values.is_empty() {
        return Err("no data values".into());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_header() {
        assert_eq!(parse_values("1\n2.5\n\n-3\n").unwrap(), [1.0, 2.5, -3.0]);
        assert_eq!(parse_values("weight\n1\n2\n").unwrap(), [1.0, 2.0]);
        assert_eq!(parse_values("\"x\"\r\n4,\r\n").unwrap(), [4.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_values("").is_err());
        assert!(parse_values("header\n").is_err());
        assert!(parse_values("1\nabc\n").is_err());
        assert!(parse_values("1,2\n").is_err());
        assert!(parse_values("1\nNaN\n").is_err());
    }
}
