//! Table output.
//!
//! Column order is fixed by [`COLUMNS`]; `wall_time_ms` is appended only
//! when timing was requested. Floats carry 12 significant digits in
//! scientific notation, empty cells (CSV) or `null` (JSON) mark values that
//! were not requested or failed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;

use spincav_core::Direction;

use crate::error::CliError;
use crate::sweep::{SweepRow, SweepVariable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

pub const COLUMNS: [&str; 16] = [
    "variable",
    "sweep_value",
    "direction",
    "detuning_kappa",
    "t_left",
    "t_right",
    "t_interference",
    "t_total",
    "g2_output_numeric",
    "g2_output_analytic",
    "g2_cavity_l_numeric",
    "g2_cavity_l_analytic",
    "g2_cavity_r_numeric",
    "solver_residual",
    "status",
    "wall_time_ms",
];

/// Number of columns written without timing.
const BASE_COLUMNS: usize = COLUMNS.len() - 1;

/// 12 significant digits, e.g. `-1.23456789012e-5`.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

enum Cell {
    Text(String),
    Number(Option<f64>),
}

fn cells(row: &SweepRow, timing: bool) -> Vec<Cell> {
    let mut out = vec![
        Cell::Text(row.variable.label().into()),
        Cell::Number(Some(row.sweep_value)),
        Cell::Text(row.direction.as_str().into()),
        Cell::Number(row.detuning),
        Cell::Number(row.t_left),
        Cell::Number(row.t_right),
        Cell::Number(row.t_interference),
        Cell::Number(row.t_total),
        Cell::Number(row.g2_output_numeric),
        Cell::Number(row.g2_output_analytic),
        Cell::Number(row.g2_cavity_l_numeric),
        Cell::Number(row.g2_cavity_l_analytic),
        Cell::Number(row.g2_cavity_r_numeric),
        Cell::Number(row.solver_residual),
        Cell::Text(row.status.clone()),
    ];
    if timing {
        out.push(Cell::Number(row.wall_time_ms));
    }
    out
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, timing: bool, out: W) -> std::io::Result<()> {
    let width = if timing { COLUMNS.len() } else { BASE_COLUMNS };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&COLUMNS[..width])?;
            for row in rows {
                let record: Vec<String> = cells(row, timing)
                    .into_iter()
                    .map(|c| match c {
                        Cell::Text(s) => s,
                        Cell::Number(v) => v.map(format_float).unwrap_or_default(),
                    })
                    .collect();
                w.write_record(&record)?;
            }
            w.flush()
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(out);
            for row in rows {
                let fields: Vec<String> = COLUMNS[..width]
                    .iter()
                    .zip(cells(row, timing))
                    .map(|(name, c)| {
                        let value = match c {
                            Cell::Text(s) => serde_json::Value::String(s).to_string(),
                            Cell::Number(Some(v)) if v.is_finite() => format_float(v),
                            Cell::Number(_) => "null".into(),
                        };
                        format!("\"{name}\":{value}")
                    })
                    .collect();
                writeln!(w, "{{{}}}", fields.join(","))?;
            }
            w.flush()
        }
    }
}

/// Writes `rows` to `path`; refuses an empty table.
pub fn emit(rows: &[SweepRow], format: Format, timing: bool, path: &Path) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Format { path: path.into(), message: "no rows to write".into() });
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_rows(rows, format, timing, file).map_err(|e| CliError::io(path, e))
}

/// Reads a table written by [`emit`], in either format.
pub fn read_rows(path: &Path, format: Format) -> Result<Vec<SweepRow>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let bad = |message: String| CliError::Format { path: path.into(), message };
    let mut rows = Vec::new();
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(file);
            let header: Vec<String> = r
                .headers()
                .map_err(|e| bad(e.to_string()))?
                .iter()
                .map(str::to_owned)
                .collect();
            for record in r.records() {
                let record = record.map_err(|e| bad(e.to_string()))?;
                let get = |name: &str| {
                    header.iter().position(|h| h == name).and_then(|i| record.get(i)).map(str::to_owned)
                };
                rows.push(parse_row(&get).map_err(bad)?);
            }
        }
        Format::Jsonl => {
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| CliError::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let value: serde_json::Value =
                    serde_json::from_str(&line).map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
                let get = |name: &str| match value.get(name) {
                    None | Some(serde_json::Value::Null) => Some(String::new()),
                    Some(serde_json::Value::String(s)) => Some(s.clone()),
                    Some(other) => Some(other.to_string()),
                };
                rows.push(parse_row(&get).map_err(|e| bad(format!("line {}: {e}", n + 1)))?);
            }
        }
    }
    Ok(rows)
}

fn parse_row(get: &dyn Fn(&str) -> Option<String>) -> Result<SweepRow, String> {
    let text = |name: &str| get(name).ok_or_else(|| format!("missing column {name}"));
    let number = |name: &str| -> Result<Option<f64>, String> {
        match get(name) {
            None => Ok(None),
            Some(s) if s.is_empty() => Ok(None),
            Some(s) => s.parse::<f64>().map(Some).map_err(|e| format!("{name} = {s}: {e}")),
        }
    };
    let variable = SweepVariable::from_label(&text("variable")?)
        .ok_or_else(|| "unknown sweep variable".to_string())?;
    let direction: Direction = text("direction")?.parse()?;
    Ok(SweepRow {
        variable,
        sweep_value: number("sweep_value")?.ok_or("missing sweep_value")?,
        direction,
        detuning: number("detuning_kappa")?,
        t_left: number("t_left")?,
        t_right: number("t_right")?,
        t_interference: number("t_interference")?,
        t_total: number("t_total")?,
        g2_output_numeric: number("g2_output_numeric")?,
        g2_output_analytic: number("g2_output_analytic")?,
        g2_cavity_l_numeric: number("g2_cavity_l_numeric")?,
        g2_cavity_l_analytic: number("g2_cavity_l_analytic")?,
        g2_cavity_r_numeric: number("g2_cavity_r_numeric")?,
        solver_residual: number("solver_residual")?,
        status: text("status")?,
        wall_time_ms: number("wall_time_ms")?,
    })
}
