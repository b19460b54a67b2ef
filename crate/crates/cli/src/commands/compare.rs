use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use topophase::phasespace::{occupancy_entropy, to_phase_points, PhasePortrait};

use crate::commands::analyze::load_input;
use crate::error::{CliError, CliResult};
use crate::output::{display, num, opt, to_canonical_string, tool, write};
use crate::pipeline::{analysis_json, analyze, portrait_of, prepare, Analysis, PipelineArgs};

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Reference profile; its class grid is shared with the second input.
    pub first: PathBuf,
    /// Profile compared against the reference.
    pub second: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn delta(a: f64, b: f64) -> CliResult<Value> {
    num(b - a)
}

fn shared_json(p: &PhasePortrait) -> CliResult<Value> {
    let occ = occupancy_entropy(p);
    Ok(json!({
        "omega": num(p.omega)?,
        "entropy": num(p.entropy)?,
        "occupied_cells": occ.occupied_cells,
        "occupancy_entropy": num(occ.entropy)?,
        "clamped_q": p.clamped_q,
        "clamped_p": p.clamped_p,
    }))
}

fn deltas(a: &Analysis, b: &Analysis) -> CliResult<Value> {
    let skew = match (a.heights.skewness, b.heights.skewness) {
        (Some(x), Some(y)) => Some(y - x),
        _ => None,
    };
    Ok(json!({
        "sigma": delta(a.heights.rms, b.heights.rms)?,
        "skewness": opt(skew)?,
        "rdq": delta(a.rms_slope, b.rms_slope)?,
        "omega": delta(a.portrait.omega, b.portrait.omega)?,
        "entropy": delta(a.portrait.entropy, b.portrait.entropy)?,
        "kinetic": delta(a.energy.kinetic, b.energy.kinetic)?,
        "potential": delta(a.energy.potential, b.energy.potential)?,
        "lagrangian": delta(a.energy.lagrangian, b.energy.lagrangian)?,
        "hamiltonian": delta(a.energy.hamiltonian, b.energy.hamiltonian)?,
        "aq": delta(a.aq, b.aq)?,
    }))
}

pub fn run(args: &CompareArgs) -> CliResult<()> {
    let raw_a = load_input(&args.first, false, 0, None)?;
    let raw_b = load_input(&args.second, false, 0, None)?;
    let (da, db) = (raw_a.spacing(), raw_b.spacing());
    if (da - db).abs() > 1e-9 * da.max(db) {
        return Err(CliError::validation(format!(
            "incompatible spacings: {da} um vs {db} um"
        )));
    }
    let a = analyze(&prepare(&raw_a, &args.pipeline)?, &args.pipeline)?;
    let b = analyze(&prepare(&raw_b, &args.pipeline)?, &args.pipeline)?;
    let binning = a.portrait.binning;
    let shared_a = portrait_of(to_phase_points(&a.profile)?, &args.pipeline, Some(binning))?;
    let shared_b = portrait_of(to_phase_points(&b.profile)?, &args.pipeline, Some(binning))?;
    let occ_delta = occupancy_entropy(&shared_b).entropy - occupancy_entropy(&shared_a).entropy;

    let report = json!({
        "command": "compare",
        "tool": tool(),
        "input": {"first": display(&args.first), "second": display(&args.second)},
        "config": args.pipeline.echo(da)?,
        "first": analysis_json(&a)?,
        "second": analysis_json(&b)?,
        "deltas": deltas(&a, &b)?,
        "shared_binning": {
            "dq": num(binning.q.width)?,
            "dp": num(binning.p.width)?,
            "n_classes_q": binning.q.classes,
            "n_classes_p": binning.p.classes,
            "first": shared_json(&shared_a)?,
            "second": shared_json(&shared_b)?,
            "occupancy_entropy_delta": num(occ_delta)?,
        },
    });
    let text = to_canonical_string(&report);
    match &args.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
