//! Text ingestion and export for profiles and height maps.
//!
//! Profile files: optional `#` header lines (a `# units:` line, when present,
//! must say `um`), then two columns `x z` separated by whitespace or commas.
//! Height maps: a rectangular comma-separated grid, optionally preceded by a
//! `# dx=..., dy=...` header.

use std::fmt::Write as _;
use std::path::Path;

use super::{HeightMap, Profile, MODULE};
use crate::error::{Error, Result};

/// Relative tolerance on abscissa spacing uniformity.
const SPACING_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFormat {
    /// Whitespace- (or comma-) separated `x z` columns.
    TwoColumnText,
    /// Comma-separated `x,z` columns; a non-numeric header row is allowed.
    Csv,
}

impl ProfileFormat {
    /// Picks the format from the file extension (`.csv` → CSV, otherwise text).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ProfileFormat::Csv,
            _ => ProfileFormat::TwoColumnText,
        }
    }
}

fn check_units(line_no: usize, header: &str) -> Result<()> {
    if let Some(rest) = header.strip_prefix("units:") {
        let unit = rest.trim();
        if unit != "um" && unit != "µm" {
            return Err(Error::format(
                MODULE,
                line_no,
                format!("unsupported length unit '{unit}', expected um"),
            ));
        }
    }
    Ok(())
}

fn parse_number(line_no: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::format(MODULE, line_no, format!("not a number: '{token}'")))?;
    if !v.is_finite() {
        return Err(Error::format(MODULE, line_no, "missing or non-finite value"));
    }
    Ok(v)
}

pub fn parse_profile(text: &str, format: ProfileFormat) -> Result<Profile> {
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    let mut label = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let header = header.trim();
            check_units(line_no, header)?;
            if let Some(l) = header.strip_prefix("label:") {
                label = l.trim().to_string();
            }
            continue;
        }
        let tokens: Vec<&str> = match format {
            ProfileFormat::TwoColumnText => line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect(),
            ProfileFormat::Csv => line.split(',').map(str::trim).collect(),
        };
        if tokens.len() != 2 {
            return Err(Error::format(
                MODULE,
                line_no,
                format!("expected 2 columns, found {}", tokens.len()),
            ));
        }
        if format == ProfileFormat::Csv
            && xs.is_empty()
            && tokens.iter().any(|t| t.parse::<f64>().is_err())
        {
            // column-name row
            continue;
        }
        xs.push(parse_number(line_no, tokens[0])?);
        zs.push(parse_number(line_no, tokens[1])?);
    }
    if xs.len() < 3 {
        return Err(Error::invalid(
            MODULE,
            format!("a profile needs at least 3 rows, got {}", xs.len()),
        ));
    }
    let n = xs.len();
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(MODULE, "abscissae must be strictly increasing"));
    }
    let spacing = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let max_deviation = xs
        .windows(2)
        .map(|w| ((w[1] - w[0]) - spacing).abs() / spacing)
        .fold(0.0_f64, f64::max);
    if max_deviation > SPACING_TOLERANCE {
        return Err(Error::NonUniformSpacing { max_deviation });
    }
    Ok(Profile::new(zs, spacing)?.with_label(label))
}

pub fn load_profile(path: &Path, format: ProfileFormat) -> Result<Profile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(MODULE, path, e))?;
    let profile = parse_profile(&text, format)?;
    if profile.label().is_empty() {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(profile.with_label(name))
    } else {
        Ok(profile)
    }
}

/// Serializes a profile in the two-column text format. Values use the
/// shortest round-trip representation, so re-reading is lossless.
pub fn write_profile(profile: &Profile) -> String {
    let mut out = String::from("# units: um\n");
    if !profile.label().is_empty() {
        let _ = writeln!(out, "# label: {}", profile.label());
    }
    let _ = writeln!(out, "# spacing: {}", profile.spacing());
    for (i, z) in profile.ordinates().iter().enumerate() {
        let _ = writeln!(out, "{} {}", i as f64 * profile.spacing(), z);
    }
    out
}

fn parse_spacing_header(line_no: usize, header: &str) -> Result<(Option<f64>, Option<f64>)> {
    let mut dx = None;
    let mut dy = None;
    for part in header.split(',') {
        if let Some((key, value)) = part.split_once('=') {
            match key.trim() {
                "dx" => dx = Some(parse_number(line_no, value)?),
                "dy" => dy = Some(parse_number(line_no, value)?),
                _ => {}
            }
        }
    }
    Ok((dx, dy))
}

/// Parses a height-map CSV. An explicit `spacing` overrides any header.
pub fn parse_heightmap(text: &str, spacing: Option<(f64, f64)>) -> Result<HeightMap> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let (mut dx, mut dy) = (None, None);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let header = header.trim();
            check_units(line_no, header)?;
            let (hx, hy) = parse_spacing_header(line_no, header)?;
            dx = hx.or(dx);
            dy = hy.or(dy);
            continue;
        }
        let row = line
            .split(',')
            .map(|t| parse_number(line_no, t))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::RaggedGrid {
                    row: rows.len(),
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    let (dx, dy) = match (spacing, dx, dy) {
        (Some(s), _, _) => s,
        (None, Some(x), Some(y)) => (x, y),
        (None, Some(x), None) => (x, x),
        _ => {
            return Err(Error::invalid(
                MODULE,
                "height map spacing missing: pass it explicitly or add a '# dx=..., dy=...' header",
            ))
        }
    };
    HeightMap::from_rows(rows, dx, dy)
}

pub fn load_heightmap(path: &Path, spacing: Option<(f64, f64)>) -> Result<HeightMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(MODULE, path, e))?;
    parse_heightmap(&text, spacing)
}

pub fn write_heightmap(map: &HeightMap) -> String {
    let mut out = String::from("# units: um\n");
    let _ = writeln!(out, "# dx={}, dy={}", map.spacing_x(), map.spacing_y());
    for r in 0..map.ny() {
        let line: Vec<String> = map.row(r).iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_three_rows() {
        let p = parse_profile("0 0\n1 1\n2 0\n", ProfileFormat::TwoColumnText).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.spacing(), 1.0);
        assert_eq!(p.ordinates(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn non_uniform_spacing_is_rejected() {
        let err = parse_profile("0 0\n1 0\n2 0\n3.5 0\n", ProfileFormat::TwoColumnText).unwrap_err();
        match err {
            Error::NonUniformSpacing { max_deviation } => assert!(max_deviation > 0.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(parse_profile("0 0\n1 0\n", ProfileFormat::TwoColumnText).is_err());
    }

    #[test]
    fn units_header_must_be_micrometres() {
        let ok = "# units: um\n0 0\n1 1\n2 0\n";
        assert!(parse_profile(ok, ProfileFormat::TwoColumnText).is_ok());
        let bad = "# units: mm\n0 0\n1 1\n2 0\n";
        assert!(matches!(
            parse_profile(bad, ProfileFormat::TwoColumnText),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn csv_with_header_row() {
        let p = parse_profile("x,z\n0,1\n0.5,2\n1.0,3\n", ProfileFormat::Csv).unwrap();
        assert_eq!(p.spacing(), 0.5);
        assert_eq!(p.ordinates(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn nan_cells_are_rejected() {
        assert!(parse_profile("0 0\n1 NaN\n2 0\n", ProfileFormat::TwoColumnText).is_err());
        assert!(parse_heightmap("0,0,0\n0,,0\n", Some((1.0, 1.0))).is_err());
    }

    #[test]
    fn profile_text_round_trip() {
        let p = Profile::new(vec![0.125, -3.5e-3, 1.0 / 3.0, 2.0], 1.25)
            .unwrap()
            .with_label("probe");
        let back = parse_profile(&write_profile(&p), ProfileFormat::TwoColumnText).unwrap();
        assert_eq!(back.ordinates(), p.ordinates());
        assert_eq!(back.spacing(), p.spacing());
        assert_eq!(back.label(), "probe");
    }

    #[test]
    fn heightmap_flat_and_header_spacing() {
        let m = parse_heightmap("0,0\n0,0\n", Some((1.0, 1.0))).unwrap();
        assert_eq!((m.nx(), m.ny()), (2, 2));
        assert!(m.values().iter().all(|&v| v == 0.0));
        let m = parse_heightmap("# dx=1.25, dy=2.5\n1,2,3\n4,5,6\n", None).unwrap();
        assert_eq!((m.spacing_x(), m.spacing_y()), (1.25, 2.5));
        assert_eq!(m.get(1, 2), 6.0);
        assert!(parse_heightmap("1,2,3\n", None).is_err());
    }

    #[test]
    fn heightmap_ragged_and_non_numeric() {
        let err = parse_heightmap("0,0,0,0\n0,0,0,0\n0,0,0\n", Some((1.0, 1.0))).unwrap_err();
        assert!(matches!(err, Error::RaggedGrid { row: 2, .. }));
        assert!(matches!(
            parse_heightmap("0,0,0\n0,a,0\n", Some((1.0, 1.0))),
            Err(Error::Format { line: 2, .. })
        ));
    }
}
