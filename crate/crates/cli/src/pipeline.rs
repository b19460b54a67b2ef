//! The evaluation chain shared by `analyze`, `runin` and `compare`:
//! form removal → S-filter → L-filter → statistics → portrait → energies → Aq.

use clap::Args;
use serde_json::{json, Value};

use topophase::energetics::{hamiltonian, mean_frequency, oscillator_hamiltonian, topographic_mass, EnergyReport};
use topophase::phasespace::{
    build_portrait, build_portrait_with_binning, fit_beta, occupancy_entropy, to_phase_points, Binning, Occupancy,
    PhasePoint, PhasePortrait, PortraitConfig, SCOTT_EPSILON,
};
use topophase::scatter::{angle_distribution, aq, AngularDistribution, AQ_K};
use topophase::statistics::{arc_length, gradient, moments, periodogram, ArcLength, MomentSet};
use topophase::surface::{detrend, l_filter, s_filter, DetrendOrder, Profile};

use crate::error::{CliError, CliResult};
use crate::output::{num, opt};

/// Default S-filter cutoff (µm).
pub const DEFAULT_S_CUT: f64 = 2.5;

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    /// Polynomial order removed before filtering (1 or 2).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub detrend: u32,
    /// S-filter cutoff in µm [default: 2.5, raised to 2·spacing when coarser].
    #[arg(long = "s-cut")]
    pub s_cut: Option<f64>,
    /// L-filter cutoff in µm; without it only the mean is removed.
    #[arg(long = "l-cut")]
    pub l_cut: Option<f64>,
    /// Load scale factor ξ of the void potential.
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    /// Topographic mass; defaults to 1 unless --wave-speed is given.
    #[arg(long, conflicts_with = "wave_speed")]
    pub mass: Option<f64>,
    /// Acoustic wave speed c (µm per time unit); derives the mass from dq·dp·ω̄/(2πc²).
    #[arg(long = "wave-speed")]
    pub wave_speed: Option<f64>,
    /// Information-bearing point count used for binning [default: number of points].
    #[arg(long = "n-effective")]
    pub n_effective: Option<usize>,
    /// Detector half-angle in degrees.
    #[arg(long = "half-angle", default_value_t = topophase::scatter::DEFAULT_HALF_ANGLE)]
    pub half_angle: f64,
    /// Number of angle bins (odd).
    #[arg(long, default_value_t = topophase::scatter::DEFAULT_BINS)]
    pub bins: usize,
}

impl PipelineArgs {
    pub fn s_cut_for(&self, spacing: f64) -> f64 {
        self.s_cut.unwrap_or(DEFAULT_S_CUT.max(2.0 * spacing))
    }

    pub fn echo(&self, spacing: f64) -> CliResult<Value> {
        Ok(json!({
            "detrend": self.detrend,
            "s_cut": num(self.s_cut_for(spacing))?,
            "l_cut": opt(self.l_cut)?,
            "xi": num(self.xi)?,
            "mass": opt(self.mass)?,
            "wave_speed": opt(self.wave_speed)?,
            "n_effective": self.n_effective,
            "half_angle": num(self.half_angle)?,
            "bins": self.bins,
            "epsilon": num(SCOTT_EPSILON)?,
            "aq_k": num(AQ_K)?,
        }))
    }
}

/// Form removal and band limitation of a raw profile.
pub fn prepare(raw: &Profile, args: &PipelineArgs) -> CliResult<Profile> {
    let order = DetrendOrder::from_degree(args.detrend)?;
    let formed = detrend(raw, order);
    let band_limited = s_filter(&formed, args.s_cut_for(raw.spacing()))?;
    Ok(match args.l_cut {
        Some(cut) => l_filter(&band_limited, cut)?,
        None => band_limited.centered(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BetaFit {
    pub alpha: f64,
    pub beta: f64,
    pub support: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub profile: Profile,
    pub heights: MomentSet,
    pub slopes: MomentSet,
    pub rms_slope: f64,
    pub arc: ArcLength,
    pub portrait: PhasePortrait,
    pub occupancy: Occupancy,
    pub energy: EnergyReport,
    pub mass_source: &'static str,
    pub oscillator: Option<f64>,
    pub beta_q: Option<BetaFit>,
    pub beta_p: Option<BetaFit>,
    pub angles: AngularDistribution,
    pub aq: f64,
}

fn beta_fit(values: impl Iterator<Item = f64>) -> Option<BetaFit> {
    let v: Vec<f64> = values.collect();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (alpha, beta) = fit_beta(&v, (lo, hi)).ok()?;
    Some(BetaFit {
        alpha,
        beta,
        support: (lo, hi),
    })
}

pub fn portrait_config(args: &PipelineArgs) -> PortraitConfig {
    PortraitConfig {
        n_effective: args.n_effective,
        ..PortraitConfig::default()
    }
}

/// Portrait of a point set, optionally on a fixed class grid.
pub fn portrait_of(points: Vec<PhasePoint>, args: &PipelineArgs, binning: Option<Binning>) -> CliResult<PhasePortrait> {
    Ok(match binning {
        Some(b) => {
            let n = args.n_effective.unwrap_or(points.len());
            build_portrait_with_binning(points, b, n)?
        }
        None => build_portrait(points, &portrait_config(args))?,
    })
}

/// Analyses an already band-limited, zero-mean profile.
pub fn analyze(profile: &Profile, args: &PipelineArgs) -> CliResult<Analysis> {
    if let Some(m) = args.mass {
        if !(m.is_finite() && m > 0.0) {
            return Err(CliError::validation(format!("--mass must be > 0, got {m}")));
        }
    }
    let heights = moments(profile.ordinates())?;
    let slope_series = gradient(profile);
    let slopes = moments(slope_series.values())?;
    let arc = arc_length(profile);
    let portrait = portrait_of(to_phase_points(profile)?, args, None)?;
    let occupancy = occupancy_entropy(&portrait);

    let omega_bar = mean_frequency(&periodogram(profile)).ok();
    let (mass, mass_source) = match (args.mass, args.wave_speed) {
        (Some(m), _) => (m, "flag"),
        (None, Some(c)) => {
            let w = omega_bar.ok_or_else(|| {
                CliError::validation("--wave-speed needs a non-zero spectrum to derive the mean frequency")
            })?;
            (topographic_mass(portrait.dq(), portrait.dp(), w, c)?, "wave-speed")
        }
        (None, None) => (1.0, "default"),
    };
    let mut energy = hamiltonian(profile, mass, args.xi)?;
    energy.omega_bar = omega_bar;
    let oscillator = match omega_bar {
        Some(w) => Some(oscillator_hamiltonian(&portrait.points, mass, w)?),
        None => None,
    };

    let angles = angle_distribution(profile, args.bins, args.half_angle)?;
    let aq_value = aq(&angles, AQ_K);
    Ok(Analysis {
        profile: profile.clone(),
        heights,
        slopes,
        rms_slope: slope_series.rms_slope(),
        arc,
        beta_q: beta_fit(portrait.points.iter().map(|pt| pt.q)),
        beta_p: beta_fit(portrait.points.iter().map(|pt| pt.p)),
        portrait,
        occupancy,
        energy,
        mass_source,
        oscillator,
        angles,
        aq: aq_value,
    })
}

pub fn moments_json(m: &MomentSet) -> CliResult<Value> {
    Ok(json!({
        "count": m.count,
        "mean": num(m.mean)?,
        "rms": num(m.rms)?,
        "skewness": opt(m.skewness)?,
        "kurtosis_raw": opt(m.kurtosis)?,
        "min": num(m.min)?,
        "max": num(m.max)?,
    }))
}

fn beta_json(fit: Option<BetaFit>) -> CliResult<Value> {
    match fit {
        None => Ok(Value::Null),
        Some(f) => Ok(json!({
            "alpha": num(f.alpha)?,
            "beta": num(f.beta)?,
            "support": [num(f.support.0)?, num(f.support.1)?],
        })),
    }
}

pub fn portrait_json(p: &PhasePortrait, occ: &Occupancy) -> CliResult<Value> {
    Ok(json!({
        "n_effective": p.n_effective,
        "points": p.points.len(),
        "dq": num(p.dq())?,
        "dp": num(p.dp())?,
        "n_classes_q": p.n_classes_q(),
        "n_classes_p": p.n_classes_p(),
        "mean_q": num(p.mean_q)?,
        "mean_p": num(p.mean_p)?,
        "sigma_q": num(p.sigma_q)?,
        "sigma_p": num(p.sigma_p)?,
        "omega": num(p.omega)?,
        "entropy": num(p.entropy)?,
        "degenerate": p.degenerate,
        "clamped_q": p.clamped_q,
        "clamped_p": p.clamped_p,
        "occupied_cells": occ.occupied_cells,
        "occupancy_entropy": num(occ.entropy)?,
    }))
}

pub fn energy_json(e: &EnergyReport, mass_source: &str, oscillator: Option<f64>) -> CliResult<Value> {
    Ok(json!({
        "kinetic": num(e.kinetic)?,
        "potential": num(e.potential)?,
        "potential_signed": num(e.potential_signed)?,
        "lagrangian": num(e.lagrangian)?,
        "hamiltonian": num(e.hamiltonian)?,
        "hamiltonian_legendre": num(e.hamiltonian_legendre)?,
        "mass": num(e.mass)?,
        "mass_source": mass_source,
        "omega_bar": opt(e.omega_bar)?,
        "oscillator_hamiltonian": opt(oscillator)?,
        "xi": num(e.xi)?,
        "zeta_max": num(e.zeta_max)?,
    }))
}

/// The per-profile body of a report.
pub fn analysis_json(a: &Analysis) -> CliResult<Value> {
    let band = a.profile.band();
    Ok(json!({
        "band": {"ls": num(band.ls())?, "lc": num(band.lc())?},
        "heights": moments_json(&a.heights)?,
        "slopes": {
            "moments": moments_json(&a.slopes)?,
            "rms_slope": num(a.rms_slope)?,
        },
        "arc_length": {
            "length": num(a.arc.length)?,
            "nominal": num(a.arc.nominal)?,
            "excess_ratio": num(a.arc.excess_ratio)?,
        },
        "portrait": portrait_json(&a.portrait, &a.occupancy)?,
        "energy": energy_json(&a.energy, a.mass_source, a.oscillator)?,
        "beta": {"q": beta_json(a.beta_q)?, "p": beta_json(a.beta_p)?},
        "scatter": {
            "aq": num(a.aq)?,
            "aq_identity": num(4.0 * AQ_K * a.rms_slope.to_degrees().powi(2))?,
            "mean_angle": num(a.angles.mean_angle)?,
            "clipped_fraction": num(a.angles.clipped_fraction)?,
            "half_angle": num(a.angles.detector_half_angle)?,
            "bins": a.angles.bin_centers.len(),
        },
    }))
}
