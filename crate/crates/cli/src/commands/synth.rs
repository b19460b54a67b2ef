use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use topophase::statistics::moments;
use topophase::surface::{write_profile, Profile};
use topophase::synthesis::{fig6_pair, powerlaw_model, synthesize_profile, SpectralModel};

use crate::error::{CliError, CliResult};
use crate::output::{display, num, opt, sibling_json, to_canonical_string, tool, write};
use crate::pipeline::moments_json;

/// Sampling interval assumed when no record length is given (µm).
pub const DEFAULT_SPACING: f64 = 1.25;

/// A power-law synthesis recipe.
#[derive(Args, Debug, Clone)]
pub struct Recipe {
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Lowest wavenumber (cycles per record).
    #[arg(long)]
    pub kmin: Option<usize>,
    /// Highest wavenumber; must not exceed (n − 1)/2.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Hurst exponent in (0, 1).
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Amplitude scale of A_k = scale·k^−(H+½) (µm).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record length in µm [default: (n − 1)·1.25].
    #[arg(long)]
    pub length: Option<f64>,
}

impl Recipe {
    pub fn n(&self) -> CliResult<usize> {
        self.n.ok_or_else(|| CliError::validation("--n is required"))
    }

    pub fn length(&self) -> CliResult<f64> {
        let n = self.n()?;
        Ok(self.length.unwrap_or((n.max(2) - 1) as f64 * DEFAULT_SPACING))
    }

    pub fn model(&self) -> CliResult<SpectralModel> {
        let kmin = self.kmin.ok_or_else(|| CliError::validation("--kmin is required"))?;
        let kmax = self.kmax.ok_or_else(|| CliError::validation("--kmax is required"))?;
        let hurst = self
            .hurst
            .ok_or_else(|| CliError::validation("--hurst (or --psd-file) is required"))?;
        Ok(powerlaw_model(kmin, kmax, self.length()?, hurst, self.scale)?)
    }

    pub fn profile(&self) -> CliResult<Profile> {
        Ok(synthesize_profile(&self.model()?, self.n()?, self.seed)?)
    }

    pub fn echo(&self) -> CliResult<Value> {
        Ok(json!({
            "n": self.n,
            "kmin": self.kmin,
            "kmax": self.kmax,
            "hurst": opt(self.hurst)?,
            "scale": num(self.scale)?,
            "seed": self.seed,
            "length": opt(self.n.map(|_| self.length()).transpose()?)?,
        }))
    }
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub recipe: Recipe,
    /// Amplitude table (`k,A_k` CSV) instead of a power law.
    #[arg(long = "psd-file", conflicts_with_all = ["hurst", "kmin", "kmax", "length"])]
    pub psd_file: Option<PathBuf>,
    /// Generate the inverted-amplitude pair instead of a single profile.
    #[arg(long, conflicts_with_all = ["psd_file", "hurst", "kmax"])]
    pub fig6: bool,
    /// Amplitude of the (kmin − 2) mode of the pair.
    #[arg(long, default_value_t = 1.0, requires = "fig6")]
    pub d: f64,
    /// Amplitude scale of the 1/k series of the pair.
    #[arg(long, default_value_t = 1.0, requires = "fig6")]
    pub l: f64,
    /// Output profile path; with --fig6 a prefix for `a.txt`, `b.txt`, `report.json`.
    #[arg(long)]
    pub out: PathBuf,
}

fn profile_json(p: &Profile) -> CliResult<Value> {
    Ok(json!({
        "label": p.label(),
        "points": p.len(),
        "spacing": num(p.spacing())?,
        "heights": moments_json(&moments(p.ordinates())?)?,
    }))
}

fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    if args.fig6 {
        return run_fig6(args);
    }
    let (model, source) = match &args.psd_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            (SpectralModel::from_csv(&text)?, json!({"psd_file": display(path)}))
        }
        None => (args.recipe.model()?, args.recipe.echo()?),
    };
    let n = args.recipe.n()?;
    let profile = synthesize_profile(&model, n, args.recipe.seed)?;
    write(&args.out, &write_profile(&profile))?;
    let report = json!({
        "command": "synth",
        "tool": tool(),
        "config": {
            "recipe": source,
            "n": n,
            "seed": args.recipe.seed,
        },
        "model": {
            "k_min": model.k_min(),
            "k_max": model.k_max(),
            "record_length": num(model.record_length())?,
            "hurst": opt(model.hurst())?,
            "fractal_dimension": opt(model.fractal_dimension())?,
            "variance": num(model.variance())?,
        },
        "outputs": {"profile": display(&args.out)},
        "profile": profile_json(&profile)?,
    });
    write(&sibling_json(&args.out), &to_canonical_string(&report))
}

fn run_fig6(args: &SynthArgs) -> CliResult<()> {
    let n = args.recipe.n()?;
    let kmin = args
        .recipe
        .kmin
        .ok_or_else(|| CliError::validation("--kmin is required"))?;
    let length = args.recipe.length()?;
    let (a, b) = fig6_pair(args.d, args.l, kmin, n, length)?;
    let path_a = with_suffix(&args.out, "a.txt");
    let path_b = with_suffix(&args.out, "b.txt");
    write(&path_a, &write_profile(&a))?;
    write(&path_b, &write_profile(&b))?;
    let negated = a.ordinates().iter().zip(b.ordinates()).all(|(x, y)| *y == -*x);
    let report = json!({
        "command": "synth",
        "tool": tool(),
        "config": {
            "fig6": true,
            "n": n,
            "kmin": kmin,
            "d": num(args.d)?,
            "l": num(args.l)?,
            "length": num(length)?,
        },
        "outputs": {"a": display(&path_a), "b": display(&path_b)},
        "a": profile_json(&a)?,
        "b": profile_json(&b)?,
        "b_is_negated_a": negated,
    });
    write(&with_suffix(&args.out, "report.json"), &to_canonical_string(&report))
}
