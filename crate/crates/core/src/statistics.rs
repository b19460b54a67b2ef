//! Gradients, moments, arc length / area, periodogram and plasticity index.
//!
//! All slope-based quantities use central differences at interior points
//! only; the two end samples of a profile never get a slope.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::surface::{HeightMap, Profile};
use crate::synthesis::SpectralModel;

const MODULE: &str = "statistics";

/// Central-difference slopes `(z[i+1] − z[i−1]) / 2δr` for `i = 1..n−1`.
pub fn central_differences(z: &[f64], spacing: f64) -> Vec<f64> {
    z.windows(3).map(|w| (w[2] - w[0]) / (2.0 * spacing)).collect()
}

/// Interior slopes of a profile plus their rms (RΔq).
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeSeries {
    values: Vec<f64>,
    spacing: f64,
    rms_slope: f64,
}

impl SlopeSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Root mean square slope RΔq (dimensionless).
    pub fn rms_slope(&self) -> f64 {
        self.rms_slope
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Facet inclination `atan(slope)` in degrees.
    pub fn angles_deg(&self) -> Vec<f64> {
        self.values.iter().map(|s| s.atan().to_degrees()).collect()
    }
}

/// Slope series of length `N − 2`.
pub fn gradient(profile: &Profile) -> SlopeSeries {
    let values = central_differences(profile.ordinates(), profile.spacing());
    let rms_slope = (values.iter().map(|s| s * s).sum::<f64>() / values.len() as f64).sqrt();
    SlopeSeries {
        values,
        spacing: profile.spacing(),
        rms_slope,
    }
}

/// Population moments of a sample.
///
/// `rms` is the standard deviation σ about the mean (Rq for a zero-mean
/// profile). Skewness and kurtosis are standardized by σ³ and σ⁴; kurtosis
/// is the raw (non-excess) value, 3 for a Gaussian. Both are `None` when the
/// sample has zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub count: usize,
    pub mean: f64,
    pub rms: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn moments(values: &[f64]) -> Result<MomentSet> {
    if values.len() < 2 {
        return Err(Error::invalid(
            MODULE,
            format!("moments need at least 2 values, got {}", values.len()),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(MODULE, "moments need finite values"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = min.abs().max(max.abs());
    let mut sigma = m2.sqrt();
    // Rounding in the mean leaves ~ε·scale of spurious spread on constant data.
    let degenerate = sigma <= 8.0 * f64::EPSILON * scale;
    if degenerate {
        sigma = 0.0;
    }
    let (skewness, kurtosis) = if degenerate {
        (None, None)
    } else {
        (Some(m3 / (sigma * m2)), Some(m4 / (m2 * m2)))
    };
    Ok(MomentSet {
        count: values.len(),
        mean,
        rms: sigma,
        skewness,
        kurtosis,
        min,
        max,
    })
}

/// Arc length of a profile over the support of its interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcLength {
    pub length: f64,
    /// Projected length of the same support, `(N − 3)·δr`.
    pub nominal: f64,
    pub excess_ratio: f64,
}

/// Surface area of a map over the support of its interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceArea {
    pub area: f64,
    pub nominal: f64,
    pub excess_ratio: f64,
}

/// Trapezoid weights on `n` equally spaced nodes, normalized to sum to 1.
fn trapezoid_weights(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let mut w = vec![1.0; n];
    w[0] = 0.5;
    w[n - 1] = 0.5;
    let total = (n - 1) as f64;
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Trapezoidal quadrature of `√(1 + ζ'²)` over the interior points.
pub fn arc_length(profile: &Profile) -> ArcLength {
    let slopes = central_differences(profile.ordinates(), profile.spacing());
    let weights = trapezoid_weights(slopes.len());
    let excess_ratio: f64 = slopes
        .iter()
        .zip(&weights)
        .map(|(s, w)| w * (1.0 + s * s).sqrt())
        .sum();
    let nominal = (slopes.len() - 1) as f64 * profile.spacing();
    ArcLength {
        length: excess_ratio * nominal,
        nominal,
        excess_ratio,
    }
}

/// Trapezoidal quadrature of `√(1 + ‖∇ζ‖²)` over the interior grid.
pub fn surface_area(map: &HeightMap) -> Result<SurfaceArea> {
    let (nx, ny) = (map.nx(), map.ny());
    if nx < 3 || ny < 3 {
        return Err(Error::invalid(
            MODULE,
            format!("surface area needs at least 3x3 samples, got {ny}x{nx}"),
        ));
    }
    let (dx, dy) = (map.spacing_x(), map.spacing_y());
    let wx = trapezoid_weights(nx - 2);
    let wy = trapezoid_weights(ny - 2);
    let mut excess_ratio = 0.0;
    for r in 1..ny - 1 {
        for c in 1..nx - 1 {
            let gx = (map.get(r, c + 1) - map.get(r, c - 1)) / (2.0 * dx);
            let gy = (map.get(r + 1, c) - map.get(r - 1, c)) / (2.0 * dy);
            excess_ratio += wy[r - 1] * wx[c - 1] * (1.0 + gx * gx + gy * gy).sqrt();
        }
    }
    let nominal = (nx - 3) as f64 * dx * (ny - 3) as f64 * dy;
    Ok(SurfaceArea {
        area: excess_ratio * nominal,
        nominal,
        excess_ratio,
    })
}

/// One-sided amplitude spectrum normalized so that `Σ A_k²/2` equals the
/// mean-removed mean square of the profile.
///
/// Bin `k` is `k` periods over the DFT period `N·δr`, which becomes the
/// model's record length.
pub fn periodogram(profile: &Profile) -> SpectralModel {
    let n = profile.len();
    let mean = profile.mean();
    let mut buf: Vec<Complex64> = profile
        .ordinates()
        .iter()
        .map(|&z| Complex64::new(z - mean, 0.0))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let amplitudes = (1..=n / 2)
        .map(|k| {
            let mag = buf[k].norm();
            if 2 * k == n {
                2f64.sqrt() * mag / nf
            } else {
                2.0 * mag / nf
            }
        })
        .collect();
    SpectralModel::new(1, amplitudes, nf * profile.spacing())
        .expect("periodogram of a valid profile is a valid model")
}

/// Greenwood-Williamson plasticity index `ψ = (E'/H)·√(σ/β)`.
///
/// `e_star` and `hardness` share a unit (GPa); `sigma` and `beta` (asperity
/// radius) share a length unit.
pub fn plasticity_index(e_star: f64, hardness: f64, sigma: f64, beta: f64) -> Result<f64> {
    for (name, v) in [("E'", e_star), ("hardness", hardness), ("sigma", sigma), ("beta", beta)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(MODULE, format!("{name} must be > 0, got {v}")));
        }
    }
    Ok(e_star / hardness * (sigma / beta).sqrt())
}
