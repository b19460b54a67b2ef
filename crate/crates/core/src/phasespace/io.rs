use std::fmt::Write as _;

use super::{PhasePoint, MODULE};
use crate::error::{Error, Result};

/// Serializes points as `q,p` CSV with a header row.
pub fn write_points_csv(points: &[PhasePoint]) -> String {
    let mut out = String::from("q,p\n");
    for pt in points {
        let _ = writeln!(out, "{},{}", pt.q, pt.p);
    }
    out
}

pub fn parse_points_csv(text: &str) -> Result<Vec<PhasePoint>> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || (idx == 0 && line == "q,p") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::format(MODULE, idx + 1, format!("expected 2 columns, found {}", cols.len())));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::format(MODULE, idx + 1, format!("not a finite number: '{s}'")))
        };
        points.push(PhasePoint {
            q: parse(cols[0])?,
            p: parse(cols[1])?,
        });
    }
    Ok(points)
}
