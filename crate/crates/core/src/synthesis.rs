//! Profile synthesis from a spectral amplitude table.
//!
//! A profile of `N` samples is assembled as
//!
//! ```text
//! ζ_i = Σ_{k=k_min}^{k_max} A_k · cos(2π·k·i/N − θ_k)
//! ```
//!
//! so that wavenumber `k` means `k` periods per record. The random phases
//! `θ_k ∈ [−π, π)` come from ChaCha20 seeded with `seed` (via
//! `SeedableRng::seed_from_u64`) on stream `k`; the first 64-bit output of
//! that stream is mapped to the phase. This makes each phase a pure function
//! of `(seed, k)` and reproducible across platforms.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::surface::Profile;

const MODULE: &str = "synthesis";

/// Amplitudes `A_k` for integer wavenumbers `k_min..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    k_min: usize,
    amplitudes: Vec<f64>,
    record_length: f64,
    hurst: Option<f64>,
    embedded_dim: u32,
}

impl SpectralModel {
    /// `amplitudes[j]` is `A_{k_min + j}`.
    pub fn new(k_min: usize, amplitudes: Vec<f64>, record_length: f64) -> Result<Self> {
        if k_min < 1 {
            return Err(Error::invalid(MODULE, "k_min must be >= 1"));
        }
        if amplitudes.is_empty() {
            return Err(Error::invalid(MODULE, "k_max must be >= k_min"));
        }
        if let Some(j) = amplitudes.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::invalid(
                MODULE,
                format!("amplitude A_{} must be finite and >= 0", k_min + j),
            ));
        }
        if !(record_length.is_finite() && record_length > 0.0) {
            return Err(Error::invalid(MODULE, format!("record length must be > 0, got {record_length}")));
        }
        Ok(Self {
            k_min,
            amplitudes,
            record_length,
            hurst: None,
            embedded_dim: 2,
        })
    }

    /// Attaches Hurst / embedding metadata.
    pub fn with_hurst(mut self, hurst: f64, embedded_dim: u32) -> Result<Self> {
        hurst_to_dimension(hurst, embedded_dim)?;
        self.hurst = Some(hurst);
        self.embedded_dim = embedded_dim;
        Ok(self)
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_min + self.amplitudes.len() - 1
    }

    pub fn record_length(&self) -> f64 {
        self.record_length
    }

    pub fn hurst(&self) -> Option<f64> {
        self.hurst
    }

    pub fn embedded_dim(&self) -> u32 {
        self.embedded_dim
    }

    /// Fractal dimension `E − H`, when a Hurst exponent is attached.
    pub fn fractal_dimension(&self) -> Option<f64> {
        self.hurst.map(|h| self.embedded_dim as f64 - h)
    }

    pub fn amplitude(&self, k: usize) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        self.amplitudes.get(k - self.k_min).copied().unwrap_or(0.0)
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// `(k, A_k)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(j, &a)| (self.k_min + j, a))
    }

    /// Height variance implied by the table, `Σ A_k² / 2`.
    pub fn variance(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>() / 2.0
    }

    /// Two-column `k,A_k` CSV with a metadata header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# units: um\n");
        let _ = write!(
            out,
            "# L={}, k_min={}, k_max={}",
            self.record_length,
            self.k_min,
            self.k_max()
        );
        if let Some(h) = self.hurst {
            let _ = write!(out, ", H={h}, E={}", self.embedded_dim);
        }
        out.push_str("\nk,A_k\n");
        for (k, a) in self.iter() {
            let _ = writeln!(out, "{k},{a}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut record_length = None;
        let mut hurst = None;
        let mut embedded_dim = 2;
        let mut rows: Vec<(usize, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for part in header.split(',') {
                    let Some((key, value)) = part.split_once('=') else { continue };
                    let value = value.trim();
                    let bad = || Error::format(MODULE, line_no, format!("bad value for {}", key.trim()));
                    match key.trim() {
                        "L" => record_length = Some(value.parse::<f64>().map_err(|_| bad())?),
                        "H" => hurst = Some(value.parse::<f64>().map_err(|_| bad())?),
                        "E" => embedded_dim = value.parse::<u32>().map_err(|_| bad())?,
                        _ => {}
                    }
                }
                continue;
            }
            let Some((k, a)) = line.split_once(',') else {
                return Err(Error::format(MODULE, line_no, "expected 'k,A_k'"));
            };
            if rows.is_empty() && k.trim().parse::<usize>().is_err() {
                continue;
            }
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::format(MODULE, line_no, format!("bad wavenumber '{k}'")))?;
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::format(MODULE, line_no, format!("bad amplitude '{a}'")))?;
            rows.push((k, a));
        }
        let Some(&(k_min, _)) = rows.first() else {
            return Err(Error::invalid(MODULE, "spectral model file has no rows"));
        };
        for (j, &(k, _)) in rows.iter().enumerate() {
            if k != k_min + j {
                return Err(Error::invalid(
                    MODULE,
                    format!("wavenumbers must be consecutive, expected {} got {k}", k_min + j),
                ));
            }
        }
        let record_length =
            record_length.ok_or_else(|| Error::invalid(MODULE, "spectral model header lacks L="))?;
        let model = Self::new(k_min, rows.into_iter().map(|(_, a)| a).collect(), record_length)?;
        match hurst {
            Some(h) => model.with_hurst(h, embedded_dim),
            None => Ok(model),
        }
    }
}

/// Fractal dimension `D = E − H` for Hurst exponent `H ∈ (0, 1)`.
pub fn hurst_to_dimension(hurst: f64, embedded_dim: u32) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::invalid(MODULE, format!("Hurst exponent must lie in (0, 1), got {hurst}")));
    }
    if !(embedded_dim == 2 || embedded_dim == 3) {
        return Err(Error::invalid(
            MODULE,
            format!("embedding dimension must be 2 or 3, got {embedded_dim}"),
        ));
    }
    Ok(embedded_dim as f64 - hurst)
}

/// Power-law table `A_k = scale · k^−(H + 1/2)`, i.e. a profile PSD `∝ k^−(1+2H)`.
pub fn powerlaw_model(
    k_min: usize,
    k_max: usize,
    record_length: f64,
    hurst: f64,
    scale: f64,
) -> Result<SpectralModel> {
    if k_min < 1 || k_max < k_min {
        return Err(Error::invalid(
            MODULE,
            format!("need 1 <= k_min <= k_max, got k_min={k_min}, k_max={k_max}"),
        ));
    }
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::invalid(MODULE, format!("scale must be >= 0, got {scale}")));
    }
    hurst_to_dimension(hurst, 2)?;
    let exponent = hurst + 0.5;
    let amplitudes = (k_min..=k_max).map(|k| scale * (k as f64).powf(-exponent)).collect();
    SpectralModel::new(k_min, amplitudes, record_length)?.with_hurst(hurst, 2)
}

/// Largest wavenumber an `n`-sample record can carry without aliasing onto
/// the Nyquist bin: `floor((n − 1) / 2)`.
pub fn max_wavenumber(n_points: usize) -> usize {
    n_points.saturating_sub(1) / 2
}

/// Phase `θ_k ∈ [−π, π)` for wavenumber `k` under `seed`.
pub fn phase(seed: u64, k: usize) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    -PI + 2.0 * PI * unit
}

/// `Σ_k A_k cos(2π k i / N − θ_k)` at every sample `i`.
fn cosine_series(n_points: usize, terms: &[(usize, f64, f64)]) -> Vec<f64> {
    let n = n_points as f64;
    (0..n_points)
        .map(|i| {
            terms
                .iter()
                .map(|&(k, a, theta)| {
                    // Reduce k·i modulo N in integers before forming the angle.
                    let cycle = (k * i) % n_points;
                    a * (2.0 * PI * cycle as f64 / n - theta).cos()
                })
                .sum()
        })
        .collect()
}

/// Synthesizes a profile of `n_points` samples over the model's record length.
///
/// The spacing is `L / (n_points − 1)`.
pub fn synthesize_profile(model: &SpectralModel, n_points: usize, seed: u64) -> Result<Profile> {
    if n_points < 2 * model.k_max() + 1 {
        return Err(Error::invalid(
            MODULE,
            format!(
                "Nyquist violation: k_max={} needs at least {} points, got {n_points}",
                model.k_max(),
                2 * model.k_max() + 1
            ),
        ));
    }
    let terms: Vec<(usize, f64, f64)> = model
        .iter()
        .filter(|&(_, a)| a != 0.0)
        .map(|(k, a)| (k, a, phase(seed, k)))
        .collect();
    let z = cosine_series(n_points, &terms);
    let spacing = model.record_length() / (n_points - 1) as f64;
    Ok(Profile::new(z, spacing)?.with_label(format!("synth seed={seed}")))
}

/// Two zero-phase profiles with identical spectra and inverted heights:
///
/// ```text
/// a(x) = d·cos((k_min − 2)·x) + Σ_{k=k_min}^{k_max} (l / k)·cos(k·x),   b = −a
/// ```
///
/// with `x = 2π·i/N` and `k_max = floor((N − 1)/2)`.
pub fn fig6_pair(
    d: f64,
    l: f64,
    k_min: usize,
    n_points: usize,
    record_length: f64,
) -> Result<(Profile, Profile)> {
    if k_min < 3 {
        return Err(Error::invalid(
            MODULE,
            format!("k_min must be >= 3 so that the (k_min - 2) mode is non-degenerate, got {k_min}"),
        ));
    }
    let k_max = max_wavenumber(n_points);
    if k_max < k_min {
        return Err(Error::invalid(
            MODULE,
            format!("{n_points} points cannot carry wavenumber {k_min}"),
        ));
    }
    if !(d.is_finite() && l.is_finite()) {
        return Err(Error::invalid(MODULE, "amplitudes must be finite"));
    }
    let mut terms = vec![(k_min - 2, d, 0.0)];
    terms.extend((k_min..=k_max).map(|k| (k, l / k as f64, 0.0)));
    let a = cosine_series(n_points, &terms);
    let b: Vec<f64> = a.iter().map(|z| -z).collect();
    let spacing = record_length / (n_points - 1) as f64;
    Ok((
        Profile::new(a, spacing)?.with_label("fig6 a"),
        Profile::new(b, spacing)?.with_label("fig6 b"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rms(v: &[f64]) -> f64 {
        (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
    }

    #[test]
    fn single_mode_rms() {
        let mut amps = vec![0.0; 10];
        amps[4] = 2.0; // k = 5
        let model = SpectralModel::new(1, amps, 100.0).unwrap();
        for seed in [0, 1, 99] {
            let p = synthesize_profile(&model, 64, seed).unwrap();
            assert!((rms(p.ordinates()) - 2f64.sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_model_is_flat() {
        let model = SpectralModel::new(1, vec![0.0; 20], 10.0).unwrap();
        let p = synthesize_profile(&model, 64, 3).unwrap();
        assert!(p.ordinates().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn powerlaw_parseval_direct_sum() {
        let amps: Vec<f64> = (8..=128).map(|k| 1.0 / k as f64).collect();
        let model = SpectralModel::new(8, amps, 511.0).unwrap();
        let p = synthesize_profile(&model, 512, 42).unwrap();
        let mut expected = 0.0;
        for k in 8..=128 {
            let a = 1.0 / k as f64;
            expected += a * a / 2.0;
        }
        let got = p.ordinates().iter().map(|z| z * z).sum::<f64>() / 512.0;
        assert!(((got - expected) / expected).abs() < 1e-6);
        assert!(p.mean().abs() < 1e-12);
    }

    #[test]
    fn nyquist_violation_rejected() {
        let model = powerlaw_model(8, 300, 100.0, 0.5, 1.0).unwrap();
        assert!(synthesize_profile(&model, 512, 0).is_err());
        let model = powerlaw_model(8, 255, 100.0, 0.5, 1.0).unwrap();
        assert!(synthesize_profile(&model, 511, 0).is_ok());
        assert!(synthesize_profile(&model, 510, 0).is_err());
    }

    #[test]
    fn spacing_follows_record_length() {
        let model = powerlaw_model(2, 10, 63.0, 0.5, 1.0).unwrap();
        let p = synthesize_profile(&model, 64, 0).unwrap();
        assert_eq!(p.spacing(), 1.0);
        assert_eq!(p.length(), 63.0);
    }

    #[test]
    fn seed_determinism_and_sensitivity() {
        let model = powerlaw_model(8, 128, 320.0, 0.8, 1.0).unwrap();
        let a = synthesize_profile(&model, 512, 7).unwrap();
        let b = synthesize_profile(&model, 512, 7).unwrap();
        let c = synthesize_profile(&model, 512, 8).unwrap();
        assert_eq!(a.ordinates(), b.ordinates());
        assert_ne!(a.ordinates(), c.ordinates());
    }

    #[test]
    fn phases_are_in_range_and_stream_dependent() {
        let thetas: Vec<f64> = (1..200).map(|k| phase(11, k)).collect();
        assert!(thetas.iter().all(|&t| (-PI..PI).contains(&t)));
        assert_ne!(phase(11, 5), phase(11, 6));
        assert_ne!(phase(11, 5), phase(12, 5));
        assert_eq!(phase(11, 5), phase(11, 5));
    }

    #[test]
    fn hurst_dimension() {
        assert_eq!(hurst_to_dimension(0.5, 2).unwrap(), 1.5);
        assert!((hurst_to_dimension(0.3, 3).unwrap() - 2.7).abs() < 1e-15);
        let near_one = hurst_to_dimension(1.0 - 1e-12, 2).unwrap();
        assert!((near_one - 1.0).abs() < 1e-11);
        assert!(hurst_to_dimension(0.0, 2).is_err());
        assert!(hurst_to_dimension(1.0, 2).is_err());
        assert!(hurst_to_dimension(0.5, 4).is_err());
    }

    #[test]
    fn powerlaw_shapes() {
        let m = powerlaw_model(8, 128, 100.0, 0.5, 1.0).unwrap();
        for (k, a) in m.iter() {
            assert!((a - 1.0 / k as f64).abs() < 1e-15);
        }
        assert!(m.amplitudes().windows(2).all(|w| w[1] < w[0]));
        assert_eq!(m.fractal_dimension(), Some(1.5));

        let zero = powerlaw_model(8, 128, 100.0, 0.5, 0.0).unwrap();
        assert!(zero.amplitudes().iter().all(|&a| a == 0.0));

        let single = powerlaw_model(10, 10, 100.0, 0.5, 1.0).unwrap();
        assert_eq!(single.amplitudes().len(), 1);
        assert!(powerlaw_model(10, 9, 100.0, 0.5, 1.0).is_err());
        assert!(powerlaw_model(1, 9, 100.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn fig6_pair_is_exactly_inverted() {
        let (a, b) = fig6_pair(1.0, 1.0, 8, 512, 511.0).unwrap();
        for (x, y) in a.ordinates().iter().zip(b.ordinates()) {
            assert_eq!(x.to_bits(), (-y).to_bits());
        }
        let (a, b) = fig6_pair(0.0, 0.0, 8, 64, 63.0).unwrap();
        assert!(a.ordinates().iter().chain(b.ordinates()).all(|&z| z == 0.0));
        assert!(fig6_pair(1.0, 1.0, 2, 64, 63.0).is_err());
    }

    #[test]
    fn model_csv_round_trip() {
        let m = powerlaw_model(4, 40, 250.0, 0.3, 2.0).unwrap();
        let back = SpectralModel::from_csv(&m.to_csv()).unwrap();
        assert_eq!(back, m);
        assert!(SpectralModel::from_csv("# L=1\nk,A_k\n1,1\n3,1\n").is_err());
    }
}
