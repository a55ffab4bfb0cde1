//! Point-set files: CSV (one point per row, optional header) and JSON arrays.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use kcoreset_core::PointSet;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Json,
}

impl PointFormat {
    /// `.json` files are JSON; everything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => PointFormat::Json,
            _ => PointFormat::Csv,
        }
    }
}

/// Formats a coordinate with 17 significant digits, enough to round-trip
/// every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_points_csv(text: &str) -> Result<PointSet, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut dim = None;
    let mut coords = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("CSV row {}: {e}", row + 1)))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            // a non-numeric first row is a header
            Err(_) if row == 0 => continue,
            Err(_) => return Err(CliError::Input(format!("CSV row {}: non-numeric field", row + 1))),
        };
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(CliError::Input(format!(
                    "CSV row {}: expected {d} columns, found {}",
                    row + 1,
                    values.len()
                )))
            }
            _ => {}
        }
        coords.extend(values);
    }
    let dim = dim.ok_or_else(|| CliError::Input("point file has no rows".into()))?;
    Ok(PointSet::from_flat(dim, coords)?)
}

pub fn parse_points_json(text: &str) -> Result<PointSet, CliError> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("JSON points: {e}")))?;
    let dim = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| CliError::Input("point file has no rows".into()))?;
    Ok(PointSet::from_rows(dim, &rows)?)
}

pub fn points_to_csv(points: &PointSet) -> String {
    let mut out = String::new();
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|&c| fmt_f64(c)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn points_to_json(points: &PointSet) -> String {
    let rows: Vec<&[f64]> = points.iter().collect();
    serde_json::to_string(&rows).expect("finite coordinates serialize")
}

/// Reads a point file; `-` is standard input (CSV).
pub fn read_points(path: &Path) -> Result<PointSet, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
    };
    match PointFormat::from_path(path) {
        PointFormat::Csv => parse_points_csv(&text),
        PointFormat::Json => parse_points_json(&text),
    }
}

pub fn write_points(path: &Path, points: &PointSet) -> Result<(), CliError> {
    let text = match PointFormat::from_path(path) {
        PointFormat::Csv => points_to_csv(points),
        PointFormat::Json => points_to_json(points),
    };
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let ps = PointSet::from_rows(2, &[[0.1, 1.0 / 3.0], [-2.5e-300, 123456.789], [f64::MIN_POSITIVE, -0.0]]).unwrap();
        let back = parse_points_csv(&points_to_csv(&ps)).unwrap();
        assert_eq!(back, ps);
        let back = parse_points_json(&points_to_json(&ps)).unwrap();
        assert_eq!(back, ps);
    }

    #[test]
    fn csv_header_and_errors() {
        let ps = parse_points_csv("x,y\n1,2\n3, 4\n").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.point(1), &[3.0, 4.0]);
        assert!(parse_points_csv("1,2\n3\n").is_err());
        assert!(parse_points_csv("1,2\nfoo,4\n").is_err());
        assert!(parse_points_csv("x,y\n").is_err());
        assert!(parse_points_csv("1,nan\n").is_err());
        assert!(parse_points_json("[[1,2],[3]]").is_err());
    }
}
