use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use topophase::energetics::simulate_running_in;
use topophase::phasespace::{occupancy_entropy, to_phase_points};

use crate::commands::analyze::load_input;
use crate::commands::synth::Recipe;
use crate::error::CliResult;
use crate::output::{cell, display, num, opt, sibling_json, to_canonical_string, tool, write};
use crate::pipeline::{analysis_json, analyze, portrait_of, prepare, Analysis, PipelineArgs};

#[derive(Args, Debug)]
pub struct RuninArgs {
    /// Profile file; omit to synthesize one from the recipe flags.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub recipe: Recipe,
    /// Number of truncation steps.
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    /// Share of ordinates left at or below the final cutting plane (1 = no truncation).
    #[arg(long = "bearing-fraction", default_value_t = 0.6)]
    pub bearing_fraction: f64,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Trajectory CSV path; per-step reports go to the sibling `.json`.
    #[arg(long)]
    pub out: PathBuf,
}

const COLUMNS: &str = "step,cut_fraction,removed_volume,sigma,skew,rdq,K,B,H,omega,S,S_occ,occupied_cells,Aq";

struct Row {
    analysis: Analysis,
    s_occ: f64,
    cells: usize,
    cut_fraction: f64,
    removed_volume: f64,
}

/// Names of the trajectory quantities that failed to be non-increasing.
fn violations(rows: &[Row]) -> Vec<&'static str> {
    type Getter = fn(&Row) -> f64;
    let checks: [(&str, Getter); 6] = [
        ("sigma", |r| r.analysis.heights.rms),
        ("rdq", |r| r.analysis.rms_slope),
        ("omega", |r| r.analysis.portrait.omega),
        ("S", |r| r.analysis.portrait.entropy),
        ("S_occ", |r| r.s_occ),
        ("H", |r| r.analysis.energy.hamiltonian),
    ];
    let mut bad: Vec<&'static str> = checks
        .iter()
        .filter(|(_, get)| rows.windows(2).any(|w| get(&w[1]) > get(&w[0])))
        .map(|(name, _)| *name)
        .collect();
    let removed: f64 = rows.iter().map(|r| r.removed_volume).sum();
    if removed > 0.0 {
        let first = rows[0].analysis.heights.skewness;
        let last = rows[rows.len() - 1].analysis.heights.skewness;
        if let (Some(a), Some(b)) = (first, last) {
            if b >= a {
                bad.push("skewness");
            }
        }
    }
    bad
}

pub fn run(args: &RuninArgs) -> CliResult<()> {
    let (raw, source) = match &args.input {
        Some(path) => (load_input(path, false, 0, None)?, json!({"path": display(path)})),
        None => (args.recipe.profile()?, json!({"recipe": args.recipe.echo()?})),
    };
    let roughness = prepare(&raw, &args.pipeline)?;
    let steps = simulate_running_in(&roughness, args.steps, args.bearing_fraction)?;

    let mut rows: Vec<Row> = Vec::with_capacity(steps.len());
    for s in &steps {
        let analysis = analyze(&s.profile, &args.pipeline)?;
        // Occupancy on the class grid of the initial surface, so cells are comparable.
        let reference = rows.first().map(|r| r.analysis.portrait.binning);
        let (s_occ, cells) = match reference {
            None => (analysis.occupancy.entropy, analysis.occupancy.occupied_cells),
            Some(binning) => {
                let shared = portrait_of(to_phase_points(&s.profile)?, &args.pipeline, Some(binning))?;
                let occ = occupancy_entropy(&shared);
                (occ.entropy, occ.occupied_cells)
            }
        };
        rows.push(Row {
            analysis,
            s_occ,
            cells,
            cut_fraction: s.cut_fraction,
            removed_volume: s.removed_volume,
        });
    }

    let mut csv = format!("{COLUMNS}\n");
    for (s, r) in steps.iter().zip(&rows) {
        let a = &r.analysis;
        let skew = a.heights.skewness.map(cell).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.step,
            cell(r.cut_fraction),
            cell(r.removed_volume),
            cell(a.heights.rms),
            skew,
            cell(a.rms_slope),
            cell(a.energy.kinetic),
            cell(a.energy.potential),
            cell(a.energy.hamiltonian),
            cell(a.portrait.omega),
            cell(a.portrait.entropy),
            cell(r.s_occ),
            r.cells,
            cell(a.aq),
        );
    }
    write(&args.out, &csv)?;

    let bad = violations(&rows);
    let step_reports = steps
        .iter()
        .zip(&rows)
        .map(|(s, r)| -> CliResult<Value> {
            Ok(json!({
                "step": s.step,
                "plane": num(s.plane)?,
                "shift": num(s.shift)?,
                "cut_fraction": num(r.cut_fraction)?,
                "removed_volume": num(r.removed_volume)?,
                "shared_binning": {
                    "occupancy_entropy": num(r.s_occ)?,
                    "occupied_cells": r.cells,
                },
                "analysis": analysis_json(&r.analysis)?,
            }))
        })
        .collect::<CliResult<Vec<Value>>>()?;
    let report = json!({
        "command": "runin",
        "tool": tool(),
        "input": source,
        "config": {
            "steps": args.steps,
            "bearing_fraction": num(args.bearing_fraction)?,
            "pipeline": args.pipeline.echo(raw.spacing())?,
        },
        "outputs": {"trajectory": display(&args.out)},
        "monotone": bad.is_empty(),
        "violations": bad,
        "initial_skewness": opt(rows[0].analysis.heights.skewness)?,
        "final_skewness": opt(rows[rows.len() - 1].analysis.heights.skewness)?,
        "steps": step_reports,
    });
    write(&sibling_json(&args.out), &to_canonical_string(&report))?;

    if bad.is_empty() {
        println!("verdict: PASS sigma, rdq, omega, S, S_occ and H non-increasing over {} steps", args.steps);
    } else {
        println!("verdict: FAIL non-monotone: {}", bad.join(", "));
    }
    Ok(())
}

