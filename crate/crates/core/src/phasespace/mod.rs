//! Phase-space portrait of a profile ensemble.
//!
//! Every interior sample becomes a point `(q, p)`: its mean-centred height
//! and its central-difference slope. The symplectic cell `dq × dp` comes from
//! Scott's rule on each marginal, the number of classes from the expected
//! Gaussian peak-to-valley range, and the phase-space volume from the double
//! sum over the marginal histograms.

mod io;
mod wavefunction;

pub use io::{parse_points_csv, write_points_csv};
pub use wavefunction::{fit_beta, joint_wavefunction, BetaWavefunction};

use crate::error::{Error, Result};
use crate::statistics::{central_differences, moments};
use crate::surface::Profile;

const MODULE: &str = "phasespace";

/// Scott's-rule factor for a normal density.
pub const SCOTT_EPSILON: f64 = 3.49;

/// Class width used for a marginal with zero spread.
pub const DEFAULT_RESOLUTION: f64 = 1e-6;

/// A single coordinate in phase space: height `q` (µm) and slope `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

/// Maps a zero-mean profile to its interior `(q, p)` points.
///
/// The profile must already be zero-mean (L-filtered) to within `1e-6` of its
/// rms; the residual mean is then subtracted from `q`.
pub fn to_phase_points(profile: &Profile) -> Result<Vec<PhasePoint>> {
    let mean = profile.mean();
    let rms = profile.rms();
    if mean.abs() > 1e-6 * rms {
        return Err(Error::invalid(
            MODULE,
            format!("profile mean {mean:.3e} um is not zero; apply l_filter first"),
        ));
    }
    let z = profile.ordinates();
    let slopes = central_differences(z, profile.spacing());
    Ok(z[1..z.len() - 1]
        .iter()
        .zip(slopes)
        .map(|(&zi, p)| PhasePoint { q: zi - mean, p })
        .collect())
}

/// Scott's-rule class width `ε·σ / ∛n`.
pub fn scott_width(sigma: f64, n: usize, epsilon: f64) -> f64 {
    epsilon * sigma / (n.max(1) as f64).cbrt()
}

/// Expected peak-to-valley range of `n` Gaussian samples, `2σ·√(2 ln n)`.
pub fn seewig_range(sigma: f64, n: usize) -> f64 {
    2.0 * sigma * (2.0 * (n.max(1) as f64).ln()).sqrt()
}

/// `ceil(range / cw)`, at least one class.
pub fn class_count(range: f64, cw: f64) -> Result<usize> {
    if !(cw.is_finite() && cw > 0.0) {
        return Err(Error::invalid(MODULE, format!("class width must be > 0, got {cw}")));
    }
    // The slack keeps exact multiples (range = m·cw) from rounding up to m + 1.
    let classes = (range / cw - 1e-9).ceil();
    Ok(if classes.is_finite() && classes >= 1.0 {
        classes as usize
    } else {
        1
    })
}

/// Equal-width classes along one axis, starting at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBinning {
    pub origin: f64,
    pub width: f64,
    pub classes: usize,
}

impl AxisBinning {
    /// `classes` bins of `width`, centred on `center`.
    pub fn centered(center: f64, width: f64, classes: usize) -> Self {
        Self {
            origin: center - width * classes as f64 / 2.0,
            width,
            classes,
        }
    }

    /// Class index of `v`; values outside the grid land in the edge classes.
    /// The flag reports whether clamping happened.
    pub fn index(&self, v: f64) -> (usize, bool) {
        let raw = ((v - self.origin) / self.width).floor();
        if raw < 0.0 {
            (0, true)
        } else if raw >= self.classes as f64 {
            (self.classes - 1, true)
        } else {
            (raw as usize, false)
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.classes)
            .map(|i| self.origin + (i as f64 + 0.5) * self.width)
            .collect()
    }
}

/// The q/p class grid of a portrait.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub q: AxisBinning,
    pub p: AxisBinning,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitConfig {
    pub epsilon: f64,
    /// Fallback class width for a zero-spread marginal.
    pub resolution: f64,
    /// Number of information-bearing coordinates; defaults to the point count.
    pub n_effective: Option<usize>,
}

impl Default for PortraitConfig {
    fn default() -> Self {
        Self {
            epsilon: SCOTT_EPSILON,
            resolution: DEFAULT_RESOLUTION,
            n_effective: None,
        }
    }
}

/// Binned phase-space portrait with its volume and entropy (k = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePortrait {
    pub points: Vec<PhasePoint>,
    pub binning: Binning,
    pub n_effective: usize,
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
    /// Relative class frequencies, each summing to one.
    pub hist_q: Vec<f64>,
    pub hist_p: Vec<f64>,
    /// Points that fell outside the class grid and were clamped to an edge class.
    pub clamped_q: usize,
    pub clamped_p: usize,
    pub omega: f64,
    pub entropy: f64,
    /// Every point identical: Ω rests on the fallback single cell.
    pub degenerate: bool,
}

impl PhasePortrait {
    pub fn dq(&self) -> f64 {
        self.binning.q.width
    }

    pub fn dp(&self) -> f64 {
        self.binning.p.width
    }

    pub fn n_classes_q(&self) -> usize {
        self.binning.q.classes
    }

    pub fn n_classes_p(&self) -> usize {
        self.binning.p.classes
    }
}

fn marginal_stats(values: &[f64]) -> Result<(f64, f64)> {
    let m = moments(values)?;
    Ok((m.mean, m.rms))
}

fn axis_binning(mean: f64, sigma: f64, n: usize, config: &PortraitConfig) -> Result<AxisBinning> {
    if sigma == 0.0 {
        return Ok(AxisBinning::centered(mean, config.resolution, 1));
    }
    let width = scott_width(sigma, n, config.epsilon);
    let classes = class_count(seewig_range(sigma, n), width)?;
    Ok(AxisBinning::centered(mean, width, classes))
}

fn histogram(values: impl Iterator<Item = f64>, axis: &AxisBinning) -> (Vec<f64>, usize) {
    let mut counts = vec![0usize; axis.classes];
    let mut clamped = 0;
    let mut total = 0usize;
    for v in values {
        let (i, c) = axis.index(v);
        counts[i] += 1;
        clamped += c as usize;
        total += 1;
    }
    let freq = counts.iter().map(|&c| c as f64 / total as f64).collect();
    (freq, clamped)
}

/// Builds a portrait with Scott widths and Seewig class counts derived from
/// the points themselves.
pub fn build_portrait(points: Vec<PhasePoint>, config: &PortraitConfig) -> Result<PhasePortrait> {
    if points.len() < 2 {
        return Err(Error::invalid(
            MODULE,
            format!("a portrait needs at least 2 points, got {}", points.len()),
        ));
    }
    if !(config.epsilon > 0.0 && config.resolution > 0.0) {
        return Err(Error::invalid(MODULE, "epsilon and resolution must be > 0"));
    }
    let n_effective = config.n_effective.unwrap_or(points.len());
    if n_effective < 2 {
        return Err(Error::invalid(MODULE, "n_effective must be >= 2"));
    }
    let qs: Vec<f64> = points.iter().map(|pt| pt.q).collect();
    let ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    let (mean_q, sigma_q) = marginal_stats(&qs)?;
    let (mean_p, sigma_p) = marginal_stats(&ps)?;
    let binning = Binning {
        q: axis_binning(mean_q, sigma_q, n_effective, config)?,
        p: axis_binning(mean_p, sigma_p, n_effective, config)?,
    };
    assemble(points, binning, n_effective, (mean_q, sigma_q), (mean_p, sigma_p))
}

/// Builds a portrait on an externally fixed class grid, e.g. one taken from
/// a reference surface so that two portraits share their cells.
pub fn build_portrait_with_binning(
    points: Vec<PhasePoint>,
    binning: Binning,
    n_effective: usize,
) -> Result<PhasePortrait> {
    if points.len() < 2 || n_effective < 2 {
        return Err(Error::invalid(MODULE, "a portrait needs at least 2 points"));
    }
    for axis in [binning.q, binning.p] {
        if !(axis.width > 0.0 && axis.classes >= 1) {
            return Err(Error::invalid(MODULE, "binning needs positive widths and >= 1 class"));
        }
    }
    let qs: Vec<f64> = points.iter().map(|pt| pt.q).collect();
    let ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    let q_stats = marginal_stats(&qs)?;
    let p_stats = marginal_stats(&ps)?;
    assemble(points, binning, n_effective, q_stats, p_stats)
}

fn assemble(
    points: Vec<PhasePoint>,
    binning: Binning,
    n_effective: usize,
    (mean_q, sigma_q): (f64, f64),
    (mean_p, sigma_p): (f64, f64),
) -> Result<PhasePortrait> {
    let (hist_q, clamped_q) = histogram(points.iter().map(|pt| pt.q), &binning.q);
    let (hist_p, clamped_p) = histogram(points.iter().map(|pt| pt.p), &binning.p);
    let mut portrait = PhasePortrait {
        points,
        binning,
        n_effective,
        mean_q,
        mean_p,
        sigma_q,
        sigma_p,
        hist_q,
        hist_p,
        clamped_q,
        clamped_p,
        omega: 0.0,
        entropy: 0.0,
        degenerate: sigma_q == 0.0 && sigma_p == 0.0,
    };
    portrait.omega = phase_volume(&portrait);
    portrait.entropy = entropy(portrait.omega, 1.0)?;
    Ok(portrait)
}

/// Phase-space volume `Ω = N · Σ_i Σ_j H(p_i)·H(q_j)·Δp·Δq`, evaluated term by term.
pub fn phase_volume(portrait: &PhasePortrait) -> f64 {
    let (dq, dp) = (portrait.dq(), portrait.dp());
    let mut sum = 0.0;
    for hp in &portrait.hist_p {
        for hq in &portrait.hist_q {
            sum += hp * hq * dp * dq;
        }
    }
    portrait.n_effective as f64 * sum
}

/// `S = k · ln Ω`.
pub fn entropy(omega: f64, k: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(MODULE, format!("phase volume must be > 0, got {omega}")));
    }
    Ok(k * omega.ln())
}

/// Joint-cell occupancy of a portrait.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    /// `−Σ P_cell · ln P_cell` over occupied cells.
    pub entropy: f64,
    pub occupied_cells: usize,
}

/// Bins the actual `(q, p)` points on the portrait's `dq × dp` grid.
///
/// Unlike [`phase_volume`], this depends on how the points are jointly
/// distributed, not only on the marginal spreads.
pub fn occupancy_entropy(portrait: &PhasePortrait) -> Occupancy {
    let Binning { q, p } = portrait.binning;
    let mut counts = vec![0usize; q.classes * p.classes];
    for pt in &portrait.points {
        let (iq, _) = q.index(pt.q);
        let (ip, _) = p.index(pt.p);
        counts[iq * p.classes + ip] += 1;
    }
    let total = portrait.points.len() as f64;
    let mut entropy = 0.0;
    let mut occupied_cells = 0;
    for &c in counts.iter().filter(|&&c| c > 0) {
        occupied_cells += 1;
        let prob = c as f64 / total;
        entropy -= prob * prob.ln();
    }
    Occupancy {
        entropy,
        occupied_cells,
    }
}
