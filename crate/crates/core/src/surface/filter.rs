//! Form removal (F-operator) and ideal spectral S/L filtering.
//!
//! The filters are brick-wall truncations in the discrete Fourier domain: the
//! record of `N` samples is treated as one period of length `N·δr`, so bin `k`
//! carries wavelength `N·δr / k`. No window is applied and nothing is
//! detrended internally; records that are not periodic over `N·δr` show the
//! usual edge leakage. Run [`detrend`] first for measured data.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{EvaluationBand, Grid, HeightMap, Profile, Topography, MODULE};
use crate::error::{Error, Result};

/// Relative slack when comparing a bin wavelength to a cutoff, so that a
/// component sitting exactly on the cutoff is treated as inside the band.
const CUTOFF_SLACK: f64 = 1e-9;

/// Polynomial order removed by [`detrend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetrendOrder {
    Linear = 1,
    Quadratic = 2,
}

impl DetrendOrder {
    pub fn from_degree(degree: u32) -> Result<Self> {
        match degree {
            1 => Ok(DetrendOrder::Linear),
            2 => Ok(DetrendOrder::Quadratic),
            d => Err(Error::invalid(MODULE, format!("detrend order must be 1 or 2, got {d}"))),
        }
    }

    pub fn degree(self) -> u32 {
        self as u32
    }
}

/// Removes the least-squares polynomial of the given order.
///
/// For maps the polynomial is fitted in both lateral coordinates over the
/// whole field (`1, x, y` or `1, x, y, x², xy, y²`).
pub fn detrend<T: Topography>(surface: &T, order: DetrendOrder) -> T {
    let grid = surface.grid();
    let residual = polynomial_residual(grid, surface.heights(), order.degree());
    surface.rebuild(residual, surface.band())
}

fn normalized_coords(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64 - 1.0).collect()
}

/// Least-squares residual after projecting out a polynomial basis.
///
/// The basis is orthonormalized over the sample points with modified
/// Gram-Schmidt (two passes), which sidesteps the conditioning problems of
/// the normal equations. Basis vectors that vanish on the grid (y-terms of a
/// single row) are dropped.
fn polynomial_residual(grid: Grid, values: &[f64], degree: u32) -> Vec<f64> {
    let xs = normalized_coords(grid.nx);
    let ys = normalized_coords(grid.ny);
    let terms: Vec<(i32, i32)> = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        .into_iter()
        .filter(|(px, py)| (px + py) as u32 <= degree)
        .collect();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(terms.len());
    for (px, py) in terms {
        let mut v: Vec<f64> = (0..grid.ny)
            .flat_map(|r| {
                let y = ys[r].powi(py);
                xs.iter().map(move |x| x.powi(px) * y)
            })
            .collect();
        let initial = norm(&v);
        if initial == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for e in &basis {
                let c = dot(&v, e);
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
            }
        }
        let n = norm(&v);
        if n <= 1e-10 * initial {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= n);
        basis.push(v);
    }

    let mut residual = values.to_vec();
    for e in &basis {
        let c = dot(&residual, e);
        residual.iter_mut().zip(e).for_each(|(a, b)| *a -= c * b);
    }
    residual
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn signed_bin(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Wavelength of DFT bin `(ky, kx)`; infinite for the mean.
fn bin_wavelength(grid: Grid, ky: usize, kx: usize) -> f64 {
    let fx = signed_bin(kx, grid.nx) / (grid.nx as f64 * grid.dx);
    let fy = if grid.ny > 1 {
        signed_bin(ky, grid.ny) / (grid.ny as f64 * grid.dy)
    } else {
        0.0
    };
    let f = fx.hypot(fy);
    if f == 0.0 {
        f64::INFINITY
    } else {
        1.0 / f
    }
}

/// Zeroes every DFT bin whose wavelength fails `keep` and transforms back.
fn spectral_truncate(grid: Grid, values: &[f64], keep: impl Fn(f64) -> bool) -> Vec<f64> {
    let Grid { nx, ny, .. } = grid;
    let mut planner = FftPlanner::<f64>::new();
    let fwd_x = planner.plan_fft_forward(nx);
    let inv_x = planner.plan_fft_inverse(nx);
    let fwd_y = planner.plan_fft_forward(ny);
    let inv_y = planner.plan_fft_inverse(ny);

    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for row in data.chunks_exact_mut(nx) {
        fwd_x.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); ny];
    if ny > 1 {
        transform_columns(&mut data, nx, ny, &mut column, |c| fwd_y.process(c));
    }

    for ky in 0..ny {
        for kx in 0..nx {
            if !keep(bin_wavelength(grid, ky, kx)) {
                data[ky * nx + kx] = Complex64::new(0.0, 0.0);
            }
        }
    }

    if ny > 1 {
        transform_columns(&mut data, nx, ny, &mut column, |c| inv_y.process(c));
    }
    for row in data.chunks_exact_mut(nx) {
        inv_x.process(row);
    }
    let scale = 1.0 / (nx * ny) as f64;
    data.iter().map(|c| c.re * scale).collect()
}

fn transform_columns(
    data: &mut [Complex64],
    nx: usize,
    ny: usize,
    column: &mut [Complex64],
    transform: impl Fn(&mut [Complex64]),
) {
    for kx in 0..nx {
        for r in 0..ny {
            column[r] = data[r * nx + kx];
        }
        transform(column);
        for r in 0..ny {
            data[r * nx + kx] = column[r];
        }
    }
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::invalid(MODULE, format!("cutoff must be > 0, got {cutoff}")));
    }
    Ok(())
}

/// Ideal low-pass: removes every component with wavelength below `cutoff`
/// and sets `band.ls = cutoff`.
pub fn s_filter<T: Topography>(surface: &T, cutoff: f64) -> Result<T> {
    check_cutoff(cutoff)?;
    let grid = surface.grid();
    let coarsest = if grid.ny > 1 { grid.dx.max(grid.dy) } else { grid.dx };
    let nyquist = 2.0 * coarsest;
    if cutoff < nyquist * (1.0 - CUTOFF_SLACK) {
        return Err(Error::invalid(
            MODULE,
            format!("S-filter cutoff {cutoff} um is below the Nyquist limit {nyquist} um"),
        ));
    }
    let band = EvaluationBand::new(cutoff, surface.band().lc()).map_err(|_| {
        Error::invalid(
            MODULE,
            format!(
                "S-filter cutoff {cutoff} um exceeds the L-cutoff {} um",
                surface.band().lc()
            ),
        )
    })?;
    let min_wavelength = cutoff * (1.0 - CUTOFF_SLACK);
    let filtered = spectral_truncate(grid, surface.heights(), |w| w >= min_wavelength);
    Ok(surface.rebuild(filtered, band))
}

/// Ideal high-pass: removes every component with wavelength above `cutoff`,
/// the mean included, and sets `band.lc = cutoff`.
pub fn l_filter<T: Topography>(surface: &T, cutoff: f64) -> Result<T> {
    check_cutoff(cutoff)?;
    let grid = surface.grid();
    let extent = ((grid.nx - 1) as f64 * grid.dx).max((grid.ny - 1) as f64 * grid.dy);
    if cutoff > extent * (1.0 + CUTOFF_SLACK) {
        return Err(Error::invalid(
            MODULE,
            format!("L-filter cutoff {cutoff} um exceeds the record length {extent} um"),
        ));
    }
    let band = EvaluationBand::new(surface.band().ls(), cutoff).map_err(|_| {
        Error::invalid(
            MODULE,
            format!(
                "L-filter cutoff {cutoff} um is below the S-cutoff {} um",
                surface.band().ls()
            ),
        )
    })?;
    let max_wavelength = cutoff * (1.0 + CUTOFF_SLACK);
    let mut filtered = spectral_truncate(grid, surface.heights(), |w| w <= max_wavelength);
    let mean = filtered.iter().sum::<f64>() / filtered.len() as f64;
    filtered.iter_mut().for_each(|v| *v -= mean);
    Ok(surface.rebuild(filtered, band))
}

/// Row `row_index` of the map as a profile with the map's band and x-spacing.
pub fn extract_profile(map: &HeightMap, row_index: usize) -> Result<Profile> {
    if row_index >= map.ny() {
        return Err(Error::invalid(
            MODULE,
            format!("row {row_index} out of range for a map with {} rows", map.ny()),
        ));
    }
    Ok(Profile::new(map.row(row_index).to_vec(), map.spacing_x())?
        .with_band(map.band())
        .with_label(format!("row {row_index}")))
}
