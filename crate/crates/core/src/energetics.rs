//! Topographic energies and the running-in simulator.
//!
//! The slope field plays the role of a velocity (`q̇`), so the kinetic term is
//! `⟨K⟩ = (1/N)·Σ ½·m·q̇²`. The potential is the void volume below the highest
//! peak, scaled by a load factor `ξ`. Energies are in consistent µm-based
//! units with `m` and `ξ` as dimensionless scale factors: only ratios and
//! trajectories are meaningful, not absolute values.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phasespace::PhasePoint;
use crate::statistics::central_differences;
use crate::surface::Profile;
use crate::synthesis::SpectralModel;

const MODULE: &str = "energetics";

/// Relative tolerance of the Legendre cross-check.
const LEGENDRE_TOLERANCE: f64 = 1e-12;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(MODULE, format!("{name} must be > 0, got {v}")))
    }
}

fn check_zero_mean(profile: &Profile) -> Result<()> {
    let mean = profile.mean();
    if mean.abs() > 1e-6 * profile.rms() {
        return Err(Error::invalid(
            MODULE,
            format!("profile mean {mean:.3e} um is not zero; apply l_filter first"),
        ));
    }
    Ok(())
}

/// Mean of `½·m·slope²` over the interior points.
pub fn kinetic_energy(profile: &Profile, m: f64) -> Result<f64> {
    check_positive("mass", m)?;
    let slopes = central_differences(profile.ordinates(), profile.spacing());
    let sum: f64 = slopes.iter().map(|s| 0.5 * m * s * s).sum();
    Ok(sum / slopes.len() as f64)
}

/// Void-volume potential of a zero-mean profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoidPotential {
    /// `ξ·Σ(ζ_i − ζ_max)·δr` — non-positive.
    pub signed: f64,
    /// `|signed|`: void volume below the highest peak times `ξ`.
    pub magnitude: f64,
    pub zeta_max: f64,
}

/// `B = ξ·Σ(ζ_i − ζ_max)·δr`, summed over every ordinate so that a zero-mean
/// profile gives exactly `−ξ·N·ζ_max·δr`. Independent of the lateral order
/// of the ordinates.
pub fn void_potential(profile: &Profile, xi: f64) -> Result<VoidPotential> {
    check_positive("xi", xi)?;
    check_zero_mean(profile)?;
    // Summing in sorted order makes the result bit-identical under any
    // reordering of the ordinates.
    let mut z = profile.ordinates().to_vec();
    z.sort_by(f64::total_cmp);
    let zeta_max = z[z.len() - 1];
    let signed = xi * z.iter().map(|zi| zi - zeta_max).sum::<f64>() * profile.spacing();
    Ok(VoidPotential {
        signed,
        magnitude: -signed,
        zeta_max,
    })
}

/// Energies of one profile.
///
/// `potential` is the void-volume magnitude `|B| ≥ 0`; it is what enters
/// `L_T = K − B` and `H = K + B`, so that flattening peaks lowers `H`. The
/// literal signed value is kept in `potential_signed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub potential: f64,
    pub potential_signed: f64,
    pub lagrangian: f64,
    pub hamiltonian: f64,
    /// `⟨p·q̇⟩ − L_T` with `p = m·q̇`.
    pub hamiltonian_legendre: f64,
    pub mass: f64,
    pub omega_bar: Option<f64>,
    pub xi: f64,
    pub zeta_max: f64,
}

impl EnergyReport {
    /// Assembles `L_T = K − B` and `H = K + B` from given parts.
    pub fn from_parts(kinetic: f64, potential: f64, mass: f64, xi: f64) -> Self {
        let lagrangian = kinetic - potential;
        Self {
            kinetic,
            potential,
            potential_signed: -potential.abs(),
            lagrangian,
            hamiltonian: kinetic + potential,
            hamiltonian_legendre: 2.0 * kinetic - lagrangian,
            mass,
            omega_bar: None,
            xi,
            zeta_max: 0.0,
        }
    }

    pub fn with_omega_bar(mut self, omega_bar: f64) -> Self {
        self.omega_bar = Some(omega_bar);
        self
    }
}

/// `L_T = K − B`; the report carries every term.
pub fn lagrangian(profile: &Profile, m: f64, xi: f64) -> Result<EnergyReport> {
    let kinetic = kinetic_energy(profile, m)?;
    let b = void_potential(profile, xi)?;
    let slopes = central_differences(profile.ordinates(), profile.spacing());
    // ⟨p·q̇⟩ with the generalized momentum p = ∂L_T/∂q̇ = m·q̇.
    let p_qdot = slopes.iter().map(|s| (m * s) * s).sum::<f64>() / slopes.len() as f64;
    let lagrangian = kinetic - b.magnitude;
    Ok(EnergyReport {
        kinetic,
        potential: b.magnitude,
        potential_signed: b.signed,
        lagrangian,
        hamiltonian: kinetic + b.magnitude,
        hamiltonian_legendre: p_qdot - lagrangian,
        mass: m,
        omega_bar: None,
        xi,
        zeta_max: b.zeta_max,
    })
}

/// `H = K + B`, cross-checked against the Legendre transform `⟨p·q̇⟩ − L_T`.
pub fn hamiltonian(profile: &Profile, m: f64, xi: f64) -> Result<EnergyReport> {
    let report = lagrangian(profile, m, xi)?;
    let scale = report.hamiltonian.abs().max(report.kinetic).max(report.potential);
    if (report.hamiltonian - report.hamiltonian_legendre).abs() > LEGENDRE_TOLERANCE * scale {
        return Err(Error::Invariant {
            module: MODULE,
            reason: format!(
                "Legendre mismatch: K+B = {} but <p*qdot> - L_T = {}",
                report.hamiltonian, report.hamiltonian_legendre
            ),
        });
    }
    Ok(report)
}

/// `(1/2m)·(Σp² + 2ω²·Σq²)` over the point ensemble.
pub fn oscillator_hamiltonian(points: &[PhasePoint], m: f64, omega: f64) -> Result<f64> {
    check_positive("mass", m)?;
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::invalid(MODULE, format!("omega must be >= 0, got {omega}")));
    }
    let sp: f64 = points.iter().map(|pt| pt.p * pt.p).sum();
    let sq: f64 = points.iter().map(|pt| pt.q * pt.q).sum();
    Ok((sp + 2.0 * omega * omega * sq) / (2.0 * m))
}

/// `m = dq·dp·ω̄ / (2π·c²)`: the symplectic cell stands in for `h`.
pub fn topographic_mass(dq: f64, dp: f64, omega_bar: f64, c: f64) -> Result<f64> {
    check_positive("dq", dq)?;
    check_positive("dp", dp)?;
    check_positive("omega_bar", omega_bar)?;
    check_positive("wave speed", c)?;
    Ok(dq * dp * omega_bar / (2.0 * PI * c * c))
}

/// Power-weighted mean angular frequency `Σ(2πk/L)·A_k² / Σ A_k²` (rad/µm).
pub fn mean_frequency(model: &SpectralModel) -> Result<f64> {
    let l = model.record_length();
    let (mut num, mut den) = (0.0, 0.0);
    for (k, a) in model.iter() {
        let w = a * a;
        num += 2.0 * PI * k as f64 / l * w;
        den += w;
    }
    if den <= 0.0 {
        return Err(Error::invalid(MODULE, "spectrum has no nonzero amplitude"));
    }
    Ok(num / den)
}

/// One state of a running-in trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInStep {
    pub step: usize,
    /// Re-centred profile after truncation.
    pub profile: Profile,
    /// Cutting-plane height in the coordinates of the input profile.
    pub plane: f64,
    /// Fraction of the original ordinates lying above the plane.
    pub cut_fraction: f64,
    /// Material removed during this step, `Σ Δζ·δr` (µm²).
    pub removed_volume: f64,
    /// Mean subtracted to re-centre the truncated profile.
    pub shift: f64,
}

/// Progressive plastic truncation of the highest asperities.
///
/// `final_bearing_fraction` is the share of ordinates left at or below the
/// final cutting plane, so `1.0` removes nothing. At step `s` the plane sits
/// at the height above which a fraction `(1 − f)·s/steps` of the original
/// ordinates lie; everything above it is clamped to the plane. Step 0 is the
/// input itself. A step that clamps nothing is
/// returned without re-centring, so a schedule that never reaches any
/// ordinate reproduces the input exactly.
pub fn simulate_running_in(profile: &Profile, steps: usize, final_bearing_fraction: f64) -> Result<Vec<RunInStep>> {
    if steps < 1 {
        return Err(Error::invalid(MODULE, "running-in needs at least 1 step"));
    }
    if !(final_bearing_fraction > 0.0 && final_bearing_fraction <= 1.0) {
        return Err(Error::invalid(
            MODULE,
            format!("final bearing fraction must lie in (0, 1], got {final_bearing_fraction}"),
        ));
    }
    check_zero_mean(profile)?;
    let original = profile.ordinates();
    let n = original.len();
    let mut sorted = original.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut out = vec![RunInStep {
        step: 0,
        profile: profile.clone(),
        plane: sorted[0],
        cut_fraction: 0.0,
        removed_volume: 0.0,
        shift: 0.0,
    }];
    let mut current = original.to_vec();
    for s in 1..=steps {
        let target = (1.0 - final_bearing_fraction) * s as f64 / steps as f64;
        let above = ((target * n as f64) + 1e-9).floor() as usize;
        let plane = sorted[above.min(n - 1)];
        let mut removed = 0.0;
        for z in current.iter_mut() {
            if *z > plane {
                removed += *z - plane;
                *z = plane;
            }
        }
        let cut_fraction = original.iter().filter(|&&z| z > plane).count() as f64 / n as f64;
        let (profile_s, shift) = if removed > 0.0 {
            let shift = current.iter().sum::<f64>() / n as f64;
            (profile.with_ordinates(current.iter().map(|z| z - shift).collect()), shift)
        } else {
            (out[s - 1].profile.clone(), 0.0)
        };
        out.push(RunInStep {
            step: s,
            profile: profile_s,
            plane,
            cut_fraction,
            removed_volume: removed * profile.spacing(),
            shift,
        });
    }
    Ok(out)
}
