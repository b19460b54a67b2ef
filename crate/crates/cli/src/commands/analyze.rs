use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};

use topophase::phasespace::{occupancy_entropy, parse_points_csv, write_points_csv, AxisBinning};
use topophase::surface::{extract_profile, load_heightmap, load_profile, Profile, ProfileFormat};

use crate::error::{CliError, CliResult};
use crate::output::{cell, display, num, to_canonical_string, tool, write};
use crate::pipeline::{analysis_json, analyze, portrait_json, portrait_of, prepare, PipelineArgs};

/// Where a profile comes from.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Profile file (`x z` text or `.csv`), or a height map with --map.
    pub input: PathBuf,
    /// Treat the input as a height-map CSV and analyse one row of it.
    #[arg(long)]
    pub map: bool,
    /// Row of the height map to extract.
    #[arg(long, default_value_t = 0, requires = "map")]
    pub row: usize,
    /// Height-map spacing along x (µm), overriding the file header.
    #[arg(long, requires_all = ["map", "dy"])]
    pub dx: Option<f64>,
    /// Height-map spacing along y (µm), overriding the file header.
    #[arg(long, requires_all = ["map", "dx"])]
    pub dy: Option<f64>,
}

impl InputArgs {
    pub fn load(&self) -> CliResult<Profile> {
        load_input(&self.input, self.map, self.row, self.dx.zip(self.dy))
    }

    pub fn echo(&self) -> Value {
        json!({
            "path": display(&self.input),
            "kind": if self.map { "map-row" } else { "profile" },
            "row": if self.map { Some(self.row) } else { None },
        })
    }
}

pub fn load_input(path: &Path, map: bool, row: usize, spacing: Option<(f64, f64)>) -> CliResult<Profile> {
    if map {
        let m = load_heightmap(path, spacing)?;
        Ok(extract_profile(&m, row)?)
    } else {
        Ok(load_profile(path, ProfileFormat::from_path(path))?)
    }
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// The input is a `q,p` point CSV (as written by --emit-points); only the portrait is evaluated.
    #[arg(long, conflicts_with = "map")]
    pub points: bool,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the phase-space points as `q,p` CSV.
    #[arg(long = "emit-points")]
    pub emit_points: Option<PathBuf>,
    /// Write the marginal histograms to `<prefix>q.csv` and `<prefix>p.csv`.
    #[arg(long = "emit-histograms")]
    pub emit_histograms: Option<String>,
}

fn histogram_csv(axis: &AxisBinning, freq: &[f64]) -> String {
    let mut out = String::from("center,frequency\n");
    for (c, f) in axis.centers().iter().zip(freq) {
        let _ = writeln!(out, "{},{}", cell(*c), cell(*f));
    }
    out
}

fn emit(report: &Value, out: Option<&Path>) -> CliResult<()> {
    let text = to_canonical_string(report);
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(args: &AnalyzeArgs) -> CliResult<()> {
    if args.points {
        return run_points(args);
    }
    let raw = args.input.load()?;
    let roughness = prepare(&raw, &args.pipeline)?;
    let analysis = analyze(&roughness, &args.pipeline)?;

    if let Some(path) = &args.emit_points {
        write(path, &write_points_csv(&analysis.portrait.points))?;
    }
    if let Some(prefix) = &args.emit_histograms {
        let p = &analysis.portrait;
        write(Path::new(&format!("{prefix}q.csv")), &histogram_csv(&p.binning.q, &p.hist_q))?;
        write(Path::new(&format!("{prefix}p.csv")), &histogram_csv(&p.binning.p, &p.hist_p))?;
    }

    let mut input = args.input.echo();
    input["points"] = json!(raw.len());
    input["spacing"] = num(raw.spacing())?;
    input["label"] = json!(raw.label());
    let mut report = json!({
        "command": "analyze",
        "tool": tool(),
        "input": input,
        "config": args.pipeline.echo(raw.spacing())?,
    });
    merge(&mut report, analysis_json(&analysis)?);
    emit(&report, args.out.as_deref())
}

fn run_points(args: &AnalyzeArgs) -> CliResult<()> {
    let path = &args.input.input;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let points = parse_points_csv(&text)?;
    let portrait = portrait_of(points, &args.pipeline, None)?;
    let occ = occupancy_entropy(&portrait);
    let report = json!({
        "command": "analyze",
        "tool": tool(),
        "input": {"path": display(path), "kind": "points"},
        "config": {"n_effective": args.pipeline.n_effective},
        "portrait": portrait_json(&portrait, &occ)?,
    });
    emit(&report, args.out.as_deref())
}

/// Copies every key of `extra` into `base` (both objects).
pub fn merge(base: &mut Value, extra: Value) {
    if let (Value::Object(b), Value::Object(e)) = (base, extra) {
        b.extend(e);
    }
}
