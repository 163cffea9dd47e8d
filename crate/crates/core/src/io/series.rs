//! Diagnostics time series as CSV, one row per step.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

pub const SERIES_HEADER: &str = "time,e_l2,e_hs,u_diss,grad_sigma_diss,cross,lyapunov,mass,max_grad_u,young_ok,threshold_margin";

/// Renders records as CSV. Floats use 17 significant digits, so a read back
/// is exact.
pub fn format_series(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 220);
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            r.time,
            r.e_l2,
            r.e_hs,
            r.u_diss,
            r.grad_sigma_diss,
            r.cross,
            r.lyapunov,
            r.mass,
            r.max_grad_u,
            r.young_ok,
            r.threshold_margin
        );
    }
    out
}

pub fn parse_series(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SERIES_HEADER => {}
        Some(h) => return Err(Error::Series(format!("unexpected header '{h}'"))),
        None => return Err(Error::Series("empty file".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 11 {
            return Err(Error::Series(format!(
                "line {row}: expected 11 columns, found {}",
                cells.len()
            )));
        }
        let num = |j: usize| -> Result<f64> {
            cells[j]
                .parse::<f64>()
                .map_err(|_| Error::Series(format!("line {row}: bad number '{}'", cells[j])))
        };
        let young_ok = match cells[9] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Series(format!("line {row}: bad flag '{other}'")));
            }
        };
        out.push(DiagnosticsRecord {
            time: num(0)?,
            e_l2: num(1)?,
            e_hs: num(2)?,
            u_diss: num(3)?,
            grad_sigma_diss: num(4)?,
            cross: num(5)?,
            lyapunov: num(6)?,
            mass: num(7)?,
            max_grad_u: num(8)?,
            young_ok,
            threshold_margin: num(10)?,
        });
    }
    Ok(out)
}

pub fn write_series(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    std::fs::write(path, format_series(records)).map_err(|e| Error::io(path, e))
}

pub fn read_series(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_series(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            time: t,
            e_l2: 0.1 / 3.0,
            e_hs: 1e-300,
            u_diss: 2.0f64.sqrt(),
            grad_sigma_diss: 0.0,
            cross: -7.25e-9,
            lyapunov: 1.0 + f64::EPSILON,
            mass: std::f64::consts::PI,
            max_grad_u: 3.0,
            young_ok: t < 0.5,
            threshold_margin: -0.5,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let rs = vec![record(0.0), record(0.1), record(0.7)];
        let back = parse_series(&format_series(&rs)).unwrap();
        assert_eq!(back, rs);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(parse_series("").is_err());
        assert!(parse_series("time,e_l2\n").is_err());
        let bad = format!("{SERIES_HEADER}\n1,2,3\n");
        assert!(parse_series(&bad).is_err());
    }
}
