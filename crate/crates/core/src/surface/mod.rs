//! Sampled surface types and the form-removal / band-limiting pipeline.
//!
//! Lengths are in micrometres throughout. A [`Profile`] is a single line of
//! equally spaced ordinates; a [`HeightMap`] is a row-major grid. Both carry
//! the [`EvaluationBand`] that the filters establish.

mod filter;
mod io;

pub use filter::{detrend, extract_profile, l_filter, s_filter, DetrendOrder};
pub use io::{
    load_heightmap, load_profile, parse_heightmap, parse_profile, write_heightmap, write_profile,
    ProfileFormat,
};

use crate::error::{Error, Result};

const MODULE: &str = "surface";

/// Wavelength band `[ls, lc]` retained by the S- and L-filters.
///
/// `ls` is the shortest representable wavelength, `lc` the long-wavelength
/// cutoff. A freshly ingested record starts at `(2·δr, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationBand {
    ls: f64,
    lc: f64,
}

impl EvaluationBand {
    pub fn new(ls: f64, lc: f64) -> Result<Self> {
        if !(ls.is_finite() && lc.is_finite()) || ls <= 0.0 {
            return Err(Error::invalid(MODULE, format!("band needs ls > 0, got ls={ls}, lc={lc}")));
        }
        // A three-point record has L = 2·δr exactly, so the band may be a single wavelength.
        if lc < ls {
            return Err(Error::invalid(MODULE, format!("band needs lc >= ls, got ls={ls}, lc={lc}")));
        }
        Ok(Self { ls, lc })
    }

    /// Shortest representable wavelength (µm).
    pub fn ls(&self) -> f64 {
        self.ls
    }

    /// Long-wavelength cutoff (µm).
    pub fn lc(&self) -> f64 {
        self.lc
    }
}

/// Regular sampling grid shared by profiles (`ny == 1`) and height maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

/// Anything the filters can operate on: a row-major grid of heights plus a band.
pub trait Topography: Sized {
    fn grid(&self) -> Grid;
    fn heights(&self) -> &[f64];
    fn band(&self) -> EvaluationBand;
    /// Same geometry and metadata with new heights and band.
    fn rebuild(&self, heights: Vec<f64>, band: EvaluationBand) -> Self;
}

/// A sampled profile section `ζ_0 … ζ_{N-1}` with spacing `δr`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    ordinates: Vec<f64>,
    spacing: f64,
    band: EvaluationBand,
    label: String,
}

impl Profile {
    /// Builds a profile with the native band `(2·δr, (N-1)·δr)`.
    pub fn new(ordinates: Vec<f64>, spacing: f64) -> Result<Self> {
        if ordinates.len() < 3 {
            return Err(Error::invalid(
                MODULE,
                format!("a profile needs at least 3 ordinates, got {}", ordinates.len()),
            ));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid(MODULE, format!("spacing must be > 0, got {spacing}")));
        }
        if let Some(i) = ordinates.iter().position(|z| !z.is_finite()) {
            return Err(Error::invalid(MODULE, format!("ordinate {i} is not finite")));
        }
        let length = (ordinates.len() - 1) as f64 * spacing;
        let band = EvaluationBand::new(2.0 * spacing, length)?;
        Ok(Self {
            ordinates,
            spacing,
            band,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_band(mut self, band: EvaluationBand) -> Self {
        self.band = band;
        self
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Sampling interval δr (µm).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn band(&self) -> EvaluationBand {
        self.band
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Record length `L = (N-1)·δr`.
    pub fn length(&self) -> f64 {
        (self.ordinates.len() - 1) as f64 * self.spacing
    }

    pub fn mean(&self) -> f64 {
        self.ordinates.iter().sum::<f64>() / self.ordinates.len() as f64
    }

    /// Root mean square of the raw ordinates (not mean-removed).
    pub fn rms(&self) -> f64 {
        (self.ordinates.iter().map(|z| z * z).sum::<f64>() / self.ordinates.len() as f64).sqrt()
    }

    /// Same sampling and band, ordinates replaced. Length must match.
    pub fn with_ordinates(&self, ordinates: Vec<f64>) -> Self {
        assert_eq!(ordinates.len(), self.ordinates.len(), "ordinate count changed");
        Self {
            ordinates,
            spacing: self.spacing,
            band: self.band,
            label: self.label.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_ordinates(self.ordinates.iter().map(|&z| f(z)).collect())
    }

    /// Elementwise negation; exact in floating point.
    pub fn negated(&self) -> Self {
        self.map(|z| -z)
    }

    /// Subtracts the arithmetic mean.
    pub fn centered(&self) -> Self {
        let mean = self.mean();
        self.map(|z| z - mean)
    }
}

impl Topography for Profile {
    fn grid(&self) -> Grid {
        Grid {
            nx: self.ordinates.len(),
            ny: 1,
            dx: self.spacing,
            dy: self.spacing,
        }
    }

    fn heights(&self) -> &[f64] {
        &self.ordinates
    }

    fn band(&self) -> EvaluationBand {
        self.band
    }

    fn rebuild(&self, heights: Vec<f64>, band: EvaluationBand) -> Self {
        let mut out = self.with_ordinates(heights);
        out.band = band;
        out
    }
}

/// Areal height field, `ny` rows by `nx` columns, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap {
    values: Vec<f64>,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    band: EvaluationBand,
}

impl HeightMap {
    pub fn from_row_major(values: Vec<f64>, nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        // Slope-based operations check for nx >= 3 themselves.
        if nx < 2 || ny < 1 {
            return Err(Error::invalid(
                MODULE,
                format!("a height map needs nx >= 2 and ny >= 1, got {nx}x{ny}"),
            ));
        }
        if values.len() != nx * ny {
            return Err(Error::invalid(
                MODULE,
                format!("expected {} values for {ny}x{nx} grid, got {}", nx * ny, values.len()),
            ));
        }
        for (name, d) in [("spacing_x", dx), ("spacing_y", dy)] {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::invalid(MODULE, format!("{name} must be > 0, got {d}")));
            }
        }
        if let Some(i) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::invalid(
                MODULE,
                format!("cell ({}, {}) is not finite", i / nx, i % nx),
            ));
        }
        let ls = 2.0 * if ny > 1 { dx.max(dy) } else { dx };
        let extent = ((nx - 1) as f64 * dx).max((ny - 1) as f64 * dy);
        let band = EvaluationBand::new(ls, extent.max(ls))?;
        Ok(Self {
            values,
            nx,
            ny,
            dx,
            dy,
            band,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, dx: f64, dy: f64) -> Result<Self> {
        let ny = rows.len();
        let nx = rows.first().map_or(0, Vec::len);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != nx {
                return Err(Error::RaggedGrid {
                    row,
                    expected: nx,
                    found: r.len(),
                });
            }
        }
        Self::from_row_major(rows.into_iter().flatten().collect(), nx, ny, dx, dy)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing_x(&self) -> f64 {
        self.dx
    }

    pub fn spacing_y(&self) -> f64 {
        self.dy
    }

    pub fn band(&self) -> EvaluationBand {
        self.band
    }

    /// Total number of sampled points.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.nx + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.nx..(row + 1) * self.nx]
    }

    /// Measured field `(nx·dx, ny·dy)`, each sample covering one `dx × dy` cell.
    pub fn field_size(&self) -> (f64, f64) {
        (self.nx as f64 * self.dx, self.ny as f64 * self.dy)
    }
}

impl Topography for HeightMap {
    fn grid(&self) -> Grid {
        Grid {
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
        }
    }

    fn heights(&self) -> &[f64] {
        &self.values
    }

    fn band(&self) -> EvaluationBand {
        self.band
    }

    fn rebuild(&self, heights: Vec<f64>, band: EvaluationBand) -> Self {
        assert_eq!(heights.len(), self.values.len(), "grid size changed");
        Self {
            values: heights,
            band,
            ..*self
        }
    }
}
