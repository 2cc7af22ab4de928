//! Flat-file output: error-table CSV, verification CSV and solution slices.
//!
//! Table CSV layout:
//!
//! ```text
//! # case=example1-case1
//! # config=5c7a...
//! case,alpha,r,M,N,k,l,E,rate
//! example1-case1,0.5,1,512,200,0,1,6.6964e-03,
//! ```
//!
//! Errors carry five significant digits in scientific notation with a
//! two-digit exponent; rates carry four decimals. Emission is deterministic:
//! the same table produces the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use super::{ErrorRow, ErrorTable, TableMeta};
use crate::error::{Error, Result};
use crate::solver::SolveRecord;

/// Five-significant-digit scientific notation, `6.6964e-03` style.
pub fn sci5(x: f64) -> String {
    if x == 0.0 {
        return "0.0000e+00".to_string();
    }
    let s = format!("{x:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponential format");
    let e: i32 = exp.parse().expect("exponent parses");
    format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn fmt_grading(r: f64) -> String {
    // Compact but lossless enough for the gradings in use (ratios of small
    // integers): up to six decimals, trailing zeros trimmed.
    let mut s = format!("{r:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

pub fn render_table(table: &ErrorTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# case={}", table.meta.case_id);
    let _ = writeln!(out, "# config={}", table.meta.config_hash);
    out.push_str("case,alpha,r,M,N,k,l,E,rate\n");
    for row in &table.rows {
        let rate = row.rate.map(|r| format!("{r:.4}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.case_id,
            fmt_grading(row.alpha),
            fmt_grading(row.grading),
            row.elements,
            row.half_steps,
            row.window.0,
            row.window.1,
            sci5(row.error),
            rate
        );
    }
    out
}

/// Writes the table CSV; failures carry the path.
pub fn emit_csv(table: &ErrorTable, path: &Path) -> Result<()> {
    std::fs::write(path, render_table(table)).map_err(|e| Error::io(path, e))
}

/// Reads a table CSV produced by [`emit_csv`]. Numeric fields come back at
/// the emitted precision.
pub fn parse_csv(path: &Path) -> Result<ErrorTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text).map_err(|msg| Error::Config(format!("{}: {msg}", path.display())))
}

fn parse_table(text: &str) -> std::result::Result<ErrorTable, String> {
    let mut case_id = String::new();
    let mut config_hash = String::new();
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some(v) = rest.strip_prefix("case=") {
                case_id = v.to_string();
            } else if let Some(v) = rest.strip_prefix("config=") {
                config_hash = v.to_string();
            }
            continue;
        }
        if !saw_header {
            if line != "case,alpha,r,M,N,k,l,E,rate" {
                return Err(format!("unexpected header line: {line}"));
            }
            saw_header = true;
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(format!("expected 9 fields, got {}: {line}", fields.len()));
        }
        let num = |i: usize| -> std::result::Result<f64, String> {
            fields[i].parse().map_err(|e| format!("field {i} in {line}: {e}"))
        };
        let int = |i: usize| -> std::result::Result<usize, String> {
            fields[i].parse().map_err(|e| format!("field {i} in {line}: {e}"))
        };
        rows.push(ErrorRow {
            case_id: fields[0].to_string(),
            alpha: num(1)?,
            grading: num(2)?,
            elements: int(3)?,
            half_steps: int(4)?,
            window: (int(5)?, int(6)?),
            error: num(7)?,
            rate: if fields[8].is_empty() { None } else { Some(num(8)?) },
        });
    }
    if !saw_header {
        return Err("missing header".into());
    }
    Ok(ErrorTable { meta: TableMeta { case_id, config_hash }, rows })
}

/// Writes `(t, x, u)` rows for plotting.
///
/// Requested times snap to the nearest mesh level; positions interpolate the
/// stored piecewise linear solution. Omitting either list emits the full grid
/// (levels `0..=2KN`, all nodes).
pub fn emit_solution_slices(
    record: &SolveRecord,
    times: Option<&[f64]>,
    positions: Option<&[f64]>,
    path: &Path,
) -> Result<()> {
    let levels: Vec<i64> = match times {
        None => (0..=record.tmesh.last_level()).collect(),
        Some(ts) => ts.iter().map(|&t| nearest_level(record, t)).collect(),
    };
    let xs: Vec<f64> = match positions {
        None => record.smesh.nodes().to_vec(),
        Some(xs) => xs.to_vec(),
    };
    let mut out = String::from("t,x,u\n");
    for &level in &levels {
        let t = record.tmesh.point(level);
        for &x in &xs {
            let _ = writeln!(out, "{t},{x},{}", record.eval(level, x));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn nearest_level(record: &SolveRecord, t: f64) -> i64 {
    let mut best = 0i64;
    let mut dist = f64::INFINITY;
    for level in -(record.tmesh.history_steps() as i64)..=record.tmesh.last_level() {
        let d = (record.tmesh.point(level) - t).abs();
        if d < dist {
            dist = d;
            best = level;
        }
    }
    best
}
