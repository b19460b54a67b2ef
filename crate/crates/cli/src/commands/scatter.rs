use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use topophase::scatter::{scatter_map, ScatterConfig, AQ_K, DEFAULT_BINS, DEFAULT_HALF_ANGLE};
use topophase::surface::{detrend, load_heightmap, DetrendOrder};

use crate::error::CliResult;
use crate::output::{cell, display, num, opt, sibling_json, to_canonical_string, tool, write};

#[derive(Args, Debug)]
pub struct ScatterArgs {
    /// Height-map CSV.
    pub input: PathBuf,
    /// Spacing along x (µm), overriding the file header.
    #[arg(long, requires = "dy")]
    pub dx: Option<f64>,
    /// Spacing along y (µm), overriding the file header.
    #[arg(long, requires = "dx")]
    pub dy: Option<f64>,
    /// Polynomial form removed from the whole field first (1 or 2).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub detrend: Option<u32>,
    /// Spot size (µm).
    #[arg(long, default_value_t = 30.0)]
    pub spot: f64,
    /// Spot stride (µm) [default: the spot size].
    #[arg(long)]
    pub step: Option<f64>,
    /// Detector half-angle in degrees.
    #[arg(long = "half-angle", default_value_t = DEFAULT_HALF_ANGLE)]
    pub half_angle: f64,
    /// Number of angle bins (odd).
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Local-Aq grid CSV path; statistics go to the sibling `.json`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ScatterArgs) -> CliResult<()> {
    let mut map = load_heightmap(&args.input, args.dx.zip(args.dy))?;
    if let Some(order) = args.detrend {
        map = detrend(&map, DetrendOrder::from_degree(order)?);
    }
    let step = args.step.unwrap_or(args.spot);
    let config = ScatterConfig {
        n_bins: args.bins,
        half_angle: args.half_angle,
        k: AQ_K,
    };
    let result = scatter_map(&map, args.spot, step, &config)?;

    let mut csv = String::new();
    for r in 0..result.rows {
        let line: Vec<String> = (0..result.cols).map(|c| cell(result.get(r, c))).collect();
        let _ = writeln!(csv, "{}", line.join(","));
    }
    write(&args.out, &csv)?;

    let report = json!({
        "command": "scatter",
        "tool": tool(),
        "input": {
            "path": display(&args.input),
            "nx": map.nx(),
            "ny": map.ny(),
            "dx": num(map.spacing_x())?,
            "dy": num(map.spacing_y())?,
        },
        "config": {
            "spot_size": num(args.spot)?,
            "step": num(step)?,
            "detrend": args.detrend,
            "half_angle": num(args.half_angle)?,
            "bins": args.bins,
            "aq_k": num(AQ_K)?,
            "dx_override": opt(args.dx)?,
            "dy_override": opt(args.dy)?,
        },
        "outputs": {"grid": display(&args.out)},
        "map": {
            "rows": result.rows,
            "cols": result.cols,
            "aqm": num(result.aqm)?,
            "aqs": num(result.aqs)?,
            "aqt": num(result.aqt)?,
            "spot_size": num(result.spot_size)?,
            "step": num(result.step)?,
            "detector_half_angle": num(result.detector_half_angle)?,
            "clipped_fraction": num(result.clipped_fraction)?,
        },
    });
    write(&sibling_json(&args.out), &to_canonical_string(&report))
}
