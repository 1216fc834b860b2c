//! CSV tables and susceptibility-curve files.
//!
//! Numbers are written in Rust's shortest round-trip form, so a file written
//! here parses back to the same values and re-serializes to the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dimer_core::analysis::{CurvePoint, SusceptibilityCurve};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TEMPERATURE_COLUMN: &str = "temperature_K";
pub const CHI_COLUMN: &str = "chi_cm3_per_mol";
pub const SIGMA_COLUMN: &str = "sigma_chi";
const LABEL_TAG: &str = " label: ";

/// Plain decimal for moderate magnitudes, scientific otherwise.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Number(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn parse(s: &str) -> Option<Cell> {
        match s {
            "" => Some(Cell::Empty),
            "true" => Some(Cell::Bool(true)),
            "false" => Some(Cell::Bool(false)),
            _ => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Cell::Number),
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Number(v) => format_number(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Number)
    }
}

/// Comment lines (text after `#`), a header and typed rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Table> {
        let comments = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .map(str::to_owned)
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::input(format!("bad CSV header: {e}")))?
            .iter()
            .map(str::to_owned)
            .collect();
        if columns.iter().all(|c| c.is_empty()) {
            return Err(CliError::input("missing CSV header"));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::input(format!("bad CSV row {}: {e}", i + 1)))?;
            let row = record
                .iter()
                .map(|field| {
                    Cell::parse(field)
                        .ok_or_else(|| CliError::input(format!("row {}: cannot parse {field:?} as a number", i + 1)))
                })
                .collect::<CliResult<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table {
            comments,
            columns,
            rows,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "#{c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::input(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn curve_to_table(curve: &SusceptibilityCurve) -> Table {
    let sigma = curve.has_sigma();
    let mut columns = vec![TEMPERATURE_COLUMN, CHI_COLUMN];
    if sigma {
        columns.push(SIGMA_COLUMN);
    }
    let mut table = Table::new(columns);
    if !curve.label.is_empty() {
        table
            .comments
            .push(format!("{LABEL_TAG}{}", curve.label.replace(['\n', '\r'], " ")));
    }
    table.rows = curve
        .points()
        .iter()
        .map(|p| {
            let mut row = vec![Cell::Number(p.t), Cell::Number(p.chi)];
            if sigma {
                row.push(p.sigma.into());
            }
            row
        })
        .collect();
    table
}

pub fn curve_from_table(table: &Table) -> CliResult<SusceptibilityCurve> {
    let cols: Vec<&str> = table.columns.iter().map(String::as_str).collect();
    let has_sigma = match cols.as_slice() {
        [TEMPERATURE_COLUMN, CHI_COLUMN] => false,
        [TEMPERATURE_COLUMN, CHI_COLUMN, SIGMA_COLUMN] => true,
        _ => {
            return Err(CliError::input(format!(
                "expected header `{TEMPERATURE_COLUMN},{CHI_COLUMN}[,{SIGMA_COLUMN}]`, found `{}`",
                table.columns.join(",")
            )))
        }
    };
    let number = |row: usize, cell: &Cell, what: &str| match cell {
        Cell::Number(v) => Ok(*v),
        _ => Err(CliError::input(format!("row {}: {what} must be a number", row + 1))),
    };
    let points = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let t = number(i, &row[0], TEMPERATURE_COLUMN)?;
            let chi = number(i, &row[1], CHI_COLUMN)?;
            let sigma = match row.get(2).filter(|_| has_sigma) {
                None | Some(Cell::Empty) => None,
                Some(c) => Some(number(i, c, SIGMA_COLUMN)?),
            };
            Ok(CurvePoint { t, chi, sigma })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let label = table
        .comments
        .iter()
        .find_map(|c| c.strip_prefix(LABEL_TAG))
        .unwrap_or_default();
    Ok(SusceptibilityCurve::new(points, label)?)
}

pub fn parse_curve(text: &str) -> CliResult<SusceptibilityCurve> {
    curve_from_table(&Table::parse(text)?)
}

pub fn read_curve(path: &Path) -> CliResult<SusceptibilityCurve> {
    parse_curve(&read_text(path)?).map_err(|e| match e {
        CliError::Input(msg) => CliError::input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_curve(path: &Path, curve: &SusceptibilityCurve) -> CliResult<()> {
    write_text(path, &curve_to_table(curve).to_csv_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [
            5.0,
            2.5,
            122.5,
            5.142172602246863e-4,
            1e-5,
            -3.2e-7,
            0.0,
            1e300,
            6.02e23,
        ] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_number(5.0), "5");
        assert_eq!(format_number(1e-5), "1e-5");
    }

    #[test]
    fn parses_comments_label_and_sigma() {
        let text = "# from the magnetometer\n# label: sample A\ntemperature_K, chi_cm3_per_mol, sigma_chi\n2, 1.5e-3, 1e-5\n3,1.2E-3,\n";
        let curve = parse_curve(text).unwrap();
        assert_eq!(curve.label, "sample A");
        assert_eq!(curve.len(), 2);
        assert_eq!(curve.points()[0].sigma, Some(1e-5));
        assert_eq!(curve.points()[1].sigma, None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_curve("t,chi\n1,2\n").is_err());
        assert!(parse_curve("temperature_K,chi_cm3_per_mol\n1,abc\n").is_err());
        assert!(parse_curve("temperature_K,chi_cm3_per_mol\n1,2,3\n").is_err());
        assert!(parse_curve("temperature_K,chi_cm3_per_mol\n2,1\n1,1\n").is_err());
        assert!(parse_curve("temperature_K,chi_cm3_per_mol\n1,\"1,5\"\n").is_err());
        assert!(parse_curve("").is_err());
    }

    #[test]
    fn written_curve_round_trips_bytes() {
        let text = "# label: x\ntemperature_K,chi_cm3_per_mol\n5,7.6e-4\n7.5,0.0012345678901234567\n";
        let curve = parse_curve(text).unwrap();
        let once = curve_to_table(&curve).to_csv_string();
        let twice = curve_to_table(&parse_curve(&once).unwrap()).to_csv_string();
        assert_eq!(once, twice);
        assert_eq!(Table::parse(&once).unwrap().to_csv_string(), once);
    }
}
