//! Virtual scatterometer: facet-angle distributions and the Aq parameter.
//!
//! Every slope sample acts as a mirror facet tilted by `arctan(slope)`; the
//! detector sees the histogram of those angles over `±half_angle`.

use crate::error::{Error, Result};
use crate::statistics::central_differences;
use crate::surface::{HeightMap, Profile};

const MODULE: &str = "scatter";

/// Detector half-angle for which a rectangular distribution gives Aq ≈ 100.
pub const DEFAULT_HALF_ANGLE: f64 = 8.0;
pub const DEFAULT_BINS: usize = 65;
/// Aq calibration constant.
pub const AQ_K: f64 = 1.17;

#[derive(Debug, Clone, PartialEq)]
pub struct AngularDistribution {
    pub bin_centers: Vec<f64>,
    /// Relative frequencies summing to one.
    pub intensities: Vec<f64>,
    pub detector_half_angle: f64,
    /// Intensity-weighted mean angle M (degrees).
    pub mean_angle: f64,
    /// Fraction of facets beyond the detector range, folded into the edge bins.
    pub clipped_fraction: f64,
}

fn check_detector(n_bins: usize, half_angle: f64) -> Result<()> {
    if n_bins < 3 || n_bins.is_multiple_of(2) {
        return Err(Error::invalid(
            MODULE,
            format!("n_bins must be odd and >= 3, got {n_bins}"),
        ));
    }
    if !(half_angle.is_finite() && half_angle > 0.0 && half_angle < 90.0) {
        return Err(Error::invalid(
            MODULE,
            format!("detector half-angle must lie in (0, 90) degrees, got {half_angle}"),
        ));
    }
    Ok(())
}

/// Histogram of facet angles (degrees) on `n_bins` equal bins over `±half_angle`.
pub fn angle_distribution_from_angles(angles: &[f64], n_bins: usize, half_angle: f64) -> Result<AngularDistribution> {
    check_detector(n_bins, half_angle)?;
    if angles.is_empty() {
        return Err(Error::invalid(MODULE, "no angles to bin"));
    }
    let width = 2.0 * half_angle / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    let mut clipped = 0usize;
    for &phi in angles {
        if phi.abs() > half_angle {
            clipped += 1;
        }
        let raw = ((phi + half_angle) / width).floor();
        let idx = raw.clamp(0.0, (n_bins - 1) as f64) as usize;
        counts[idx] += 1;
    }
    let total = angles.len() as f64;
    let bin_centers: Vec<f64> = (0..n_bins)
        .map(|i| (i as f64 - (n_bins / 2) as f64) * width)
        .collect();
    let intensities: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let mean_angle = bin_centers.iter().zip(&intensities).map(|(c, i)| c * i).sum();
    Ok(AngularDistribution {
        bin_centers,
        intensities,
        detector_half_angle: half_angle,
        mean_angle,
        clipped_fraction: clipped as f64 / total,
    })
}

fn facet_angles(slopes: &[f64]) -> Vec<f64> {
    slopes.iter().map(|s| s.atan().to_degrees()).collect()
}

/// Facet-angle distribution of a profile's interior central-difference slopes.
pub fn angle_distribution(profile: &Profile, n_bins: usize, half_angle: f64) -> Result<AngularDistribution> {
    let slopes = central_differences(profile.ordinates(), profile.spacing());
    angle_distribution_from_angles(&facet_angles(&slopes), n_bins, half_angle)
}

/// `Aq = 4k·Σ I_i·(φ_i − M)²`, angles in degrees.
pub fn aq(dist: &AngularDistribution, k: f64) -> f64 {
    let m = dist.mean_angle;
    4.0 * k
        * dist
            .bin_centers
            .iter()
            .zip(&dist.intensities)
            .map(|(phi, i)| i * (phi - m).powi(2))
            .sum::<f64>()
}

/// Grid of local Aq values from a sliding spot.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMap {
    /// Row-major local Aq, `rows × cols`.
    pub aq_values: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub spot_size: f64,
    pub step: f64,
    pub detector_half_angle: f64,
    pub aqm: f64,
    /// Population standard deviation of the local values.
    pub aqs: f64,
    pub aqt: f64,
    /// Clipped fraction pooled over every spot.
    pub clipped_fraction: f64,
}

impl ScatterMap {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.aq_values[row * self.cols + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterConfig {
    pub n_bins: usize,
    pub half_angle: f64,
    pub k: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            n_bins: DEFAULT_BINS,
            half_angle: DEFAULT_HALF_ANGLE,
            k: AQ_K,
        }
    }
}

/// Slides a square spot over the map and evaluates Aq from the x-slopes of
/// every row inside it, pooled into one distribution.
pub fn scatter_map(map: &HeightMap, spot_size: f64, step: f64, config: &ScatterConfig) -> Result<ScatterMap> {
    check_detector(config.n_bins, config.half_angle)?;
    let (dx, dy) = (map.spacing_x(), map.spacing_y());
    if !(spot_size.is_finite() && spot_size >= 3.0 * dx.max(if map.ny() > 1 { dy } else { dx })) {
        return Err(Error::invalid(
            MODULE,
            format!("spot size {spot_size} um must be at least 3 sampling intervals"),
        ));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(MODULE, format!("step must be > 0, got {step}")));
    }
    if map.nx() < 3 {
        return Err(Error::invalid(MODULE, "map needs at least 3 columns for slopes"));
    }
    // Facet angles at interior columns, one row of nx − 2 per map row.
    let slope_cols = map.nx() - 2;
    let angles: Vec<Vec<f64>> = (0..map.ny())
        .map(|r| facet_angles(&central_differences(map.row(r), dx)))
        .collect();

    let w = (spot_size / dx).round() as usize;
    let h = if map.ny() == 1 { 1 } else { (spot_size / dy).round() as usize };
    if w > slope_cols || h > map.ny() {
        return Err(Error::invalid(
            MODULE,
            format!(
                "spot of {spot_size} um ({w}x{h} samples) is larger than the field ({slope_cols}x{} slope samples)",
                map.ny()
            ),
        ));
    }
    let sx = ((step / dx).round() as usize).max(1);
    let sy = if map.ny() == 1 { 1 } else { ((step / dy).round() as usize).max(1) };
    let cols = (slope_cols - w) / sx + 1;
    let rows = (map.ny() - h) / sy + 1;

    let mut aq_values = Vec::with_capacity(rows * cols);
    let mut clipped = 0.0;
    let mut buf = Vec::with_capacity(w * h);
    for gr in 0..rows {
        for gc in 0..cols {
            buf.clear();
            for row in &angles[gr * sy..gr * sy + h] {
                buf.extend_from_slice(&row[gc * sx..gc * sx + w]);
            }
            let dist = angle_distribution_from_angles(&buf, config.n_bins, config.half_angle)?;
            clipped += dist.clipped_fraction;
            aq_values.push(aq(&dist, config.k));
        }
    }
    let n = aq_values.len() as f64;
    let aqm = aq_values.iter().sum::<f64>() / n;
    let aqs = (aq_values.iter().map(|v| (v - aqm).powi(2)).sum::<f64>() / n).sqrt();
    let max = aq_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = aq_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ScatterMap {
        aq_values,
        rows,
        cols,
        spot_size,
        step,
        detector_half_angle: config.half_angle,
        aqm,
        aqs,
        aqt: max - min,
        clipped_fraction: clipped / n,
    })
}
