//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Set `UPDATE_GOLDEN=1` to regenerate the determinism fixtures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Beta, Distribution};

use topophase::energetics::{hamiltonian, kinetic_energy, simulate_running_in, void_potential};
use topophase::phasespace::{
    build_portrait, build_portrait_with_binning, class_count, fit_beta, joint_wavefunction,
    occupancy_entropy, phase_volume, scott_width, seewig_range, to_phase_points, BetaWavefunction,
    PortraitConfig, SCOTT_EPSILON,
};
use topophase::scatter::{angle_distribution, angle_distribution_from_angles, aq, AQ_K};
use topophase::statistics::{arc_length, gradient, moments, periodogram};
use topophase::surface::{parse_heightmap, Profile};
use topophase::synthesis::{fig6_pair, powerlaw_model, synthesize_profile};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let elapsed = start.elapsed();
    check(
        elapsed < limit,
        format!(
            "{out}; {:.3} s (limit {} s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn ac1_binning() -> Outcome {
    let (sigma, n) = (0.38, 3200);
    let cw = scott_width(sigma, n, SCOTT_EPSILON);
    let range = seewig_range(sigma, n);
    let classes = class_count(range, cw).map_err(|e| e.to_string())?;
    check(
        (cw - 0.090).abs() <= 0.001 && rel(range, 3.04) <= 0.015 && classes.abs_diff(34) <= 1,
        format!("class width {cw:.5} um, range {range:.4} um, {classes} classes"),
    )
}

fn ac2_field() -> Outcome {
    let n = (320.0f64 / 1.25).round() as usize;
    let mut text = String::from("# dx=1.25, dy=1.25\n");
    for r in 0..n {
        let row: Vec<String> = (0..n).map(|c| ((r * 7 + c * 3) % 11).to_string()).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let map = parse_heightmap(&text, None).map_err(|e| e.to_string())?;
    let (wx, wy) = map.field_size();
    check(
        map.len() == 65_536 && wx == 320.0 && wy == 320.0,
        format!(
            "{}x{} = {} points over {wx} x {wy} um",
            map.nx(),
            map.ny(),
            map.len()
        ),
    )
}

fn ac3_parseval() -> Outcome {
    timed(Duration::from_secs(1), || {
        let hursts = [0.3, 0.5, 0.8];
        let mut worst: f64 = 0.0;
        for seed in 0..50u64 {
            let h = hursts[seed as usize % 3];
            let model = powerlaw_model(8, 128, 640.0, h, 1.0).map_err(|e| e.to_string())?;
            let p = synthesize_profile(&model, 512, seed).map_err(|e| e.to_string())?;
            let z = p.ordinates();
            let mean_square = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
            let expected: f64 = model.amplitudes().iter().map(|a| a * a / 2.0).sum();
            worst = worst.max(rel(mean_square, expected));
        }
        check(
            worst <= 1e-6,
            format!("50 syntheses, worst relative error {worst:.2e}"),
        )
    })
}

fn ac4_pair() -> Outcome {
    timed(Duration::from_secs(1), || {
        let (a, b) = fig6_pair(1.0, 1.0, 8, 1024, 1278.75).map_err(|e| e.to_string())?;
        let e = |r: topophase::Result<f64>| r.map_err(|e| e.to_string());
        let negated = a
            .ordinates()
            .iter()
            .zip(b.ordinates())
            .all(|(x, y)| x.to_bits() == (-y).to_bits());
        let (pa, pb) = (periodogram(&a), periodogram(&b));
        let spectrum = pa
            .amplitudes()
            .iter()
            .zip(pb.amplitudes())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let arc = rel(arc_length(&a).length, arc_length(&b).length);
        let ma = moments(a.ordinates()).map_err(|e| e.to_string())?;
        let mb = moments(b.ordinates()).map_err(|e| e.to_string())?;
        let (sa, sb) = (ma.skewness.unwrap_or(0.0), mb.skewness.unwrap_or(0.0));
        let (ka, kb) = (e(kinetic_energy(&a, 1.0))?, e(kinetic_energy(&b, 1.0))?);
        let ba = void_potential(&a, 1.0)
            .map_err(|e| e.to_string())?
            .magnitude;
        let bb = void_potential(&b, 1.0)
            .map_err(|e| e.to_string())?
            .magnitude;
        check(
            negated
                && pa.amplitudes().len() == pb.amplitudes().len()
                && spectrum <= 1e-10
                && arc <= 1e-12
                && (sa + sb).abs() <= 1e-12
                && sa != 0.0
                && rel(ka, kb) <= 1e-12
                && rel(ba, bb) > 1e-3,
            format!(
                "negated={negated}, spectrum diff {spectrum:.1e}, arc diff {arc:.1e}, skew {sa:.4}/{sb:.4}, \
                 K {ka:.6e}/{kb:.6e}, B {ba:.6e}/{bb:.6e}"
            ),
        )
    })
}

fn ac5_legendre() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let hurst = 0.2 + 0.6 * (seed % 7) as f64 / 6.0;
        let model = powerlaw_model(2 + seed as usize % 5, 100, 500.0, hurst, 0.5)
            .map_err(|e| e.to_string())?;
        let p = synthesize_profile(&model, 512, seed)
            .map_err(|e| e.to_string())?
            .centered();
        let (m, xi) = (0.5 + (seed % 4) as f64, 1.0 + (seed % 3) as f64 * 0.25);
        let r = hamiltonian(&p, m, xi).map_err(|e| e.to_string())?;
        worst = worst.max(rel(r.kinetic + r.potential, r.hamiltonian_legendre));
    }
    check(
        worst <= 1e-12,
        format!("100 profiles, worst relative mismatch {worst:.2e}"),
    )
}

fn ac6_running_in() -> Outcome {
    timed(Duration::from_secs(5), || {
        let model = powerlaw_model(8, 128, 400.0, 0.6, 1.0).map_err(|e| e.to_string())?;
        let config = PortraitConfig::default();
        let mut failures = Vec::new();
        for seed in 0..20u64 {
            let p = synthesize_profile(&model, 1024, seed)
                .map_err(|e| e.to_string())?
                .centered();
            let steps = simulate_running_in(&p, 5, 0.7).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            let mut reference = None;
            for s in &steps {
                let pts = to_phase_points(&s.profile).map_err(|e| e.to_string())?;
                let own = build_portrait(pts.clone(), &config).map_err(|e| e.to_string())?;
                let (binning, n_eff) = *reference.get_or_insert((own.binning, own.n_effective));
                let shared =
                    build_portrait_with_binning(pts, binning, n_eff).map_err(|e| e.to_string())?;
                let m = moments(s.profile.ordinates()).map_err(|e| e.to_string())?;
                let h = hamiltonian(&s.profile, 1.0, 1.0)
                    .map_err(|e| e.to_string())?
                    .hamiltonian;
                rows.push((
                    [
                        m.rms,
                        gradient(&s.profile).rms_slope(),
                        own.omega,
                        own.entropy,
                        occupancy_entropy(&shared).entropy,
                        h,
                    ],
                    m.skewness.unwrap_or(0.0),
                ));
            }
            let names = ["sigma", "rdq", "omega", "S", "S_occ", "H"];
            for (i, name) in names.iter().enumerate() {
                if rows.windows(2).any(|w| w[1].0[i] > w[0].0[i]) {
                    failures.push(format!("seed {seed}: {name}"));
                }
            }
            if rows[rows.len() - 1].1 >= rows[0].1 {
                failures.push(format!("seed {seed}: skewness"));
            }
        }
        check(
            failures.is_empty(),
            if failures.is_empty() {
                "20 surfaces x 5 steps non-increasing; skewness falls on every surface".to_string()
            } else {
                format!("violations: {}", failures.join(", "))
            },
        )
    })
}

fn ac7_aq() -> Outcome {
    let n = 200_000;
    let uniform: Vec<f64> = (0..n)
        .map(|i| -8.0 + 16.0 * (i as f64 + 0.5) / n as f64)
        .collect();
    let dist = angle_distribution_from_angles(&uniform, 65, 8.0).map_err(|e| e.to_string())?;
    let calibration = aq(&dist, AQ_K);
    let mut worst: f64 = 0.0;
    let mut max_rdq: f64 = 0.0;
    for seed in 0..20u64 {
        let model = powerlaw_model(8, 128, 640.0, 0.7, 0.9).map_err(|e| e.to_string())?;
        let p = synthesize_profile(&model, 1024, seed).map_err(|e| e.to_string())?;
        let rdq = gradient(&p).rms_slope();
        max_rdq = max_rdq.max(rdq);
        let histogram = aq(
            &angle_distribution(&p, 65, 8.0).map_err(|e| e.to_string())?,
            AQ_K,
        );
        let identity = 4.0 * AQ_K * rdq.to_degrees().powi(2);
        worst = worst.max(rel(histogram, identity));
    }
    check(
        (calibration - 100.0).abs() <= 0.5 && max_rdq < 0.1 && worst <= 0.05,
        format!("uniform +-8 deg gives Aq = {calibration:.3}; 20 surfaces (max rdq {max_rdq:.4}) worst deviation {:.2}%", worst * 100.0),
    )
}

fn ac8_phase_volume() -> Outcome {
    let config = PortraitConfig::default();
    let mut worst: f64 = 0.0;
    let mut decreasing = true;
    let mut count = 0;
    for seed in 0..30u64 {
        let hurst = [0.3, 0.5, 0.8][seed as usize % 3];
        let model = powerlaw_model(4, 200, 1000.0, hurst, 1.0).map_err(|e| e.to_string())?;
        let p = synthesize_profile(&model, 1024, seed)
            .map_err(|e| e.to_string())?
            .centered();
        for scale in [1.0, 0.9, 0.5] {
            let scaled: Profile = p.map(|z| z * scale);
            let portrait = build_portrait(
                to_phase_points(&scaled).map_err(|e| e.to_string())?,
                &config,
            )
            .map_err(|e| e.to_string())?;
            let n = portrait.n_effective as f64;
            let closed = SCOTT_EPSILON.powi(2) * portrait.sigma_q * portrait.sigma_p * n.cbrt();
            worst = worst.max(rel(phase_volume(&portrait), closed));
            count += 1;
        }
        // Shrinking heights shrinks slopes too, so both marginal spreads fall.
        let s = |k: f64| -> Result<f64, String> {
            let pts = to_phase_points(&p.map(|z| z * k)).map_err(|e| e.to_string())?;
            Ok(build_portrait(pts, &config)
                .map_err(|e| e.to_string())?
                .entropy)
        };
        let (s0, s1, s2) = (s(1.0)?, s(0.9)?, s(0.5)?);
        decreasing &= s1 < s0 && s2 < s1;
    }
    check(
        worst <= 1e-9 && decreasing,
        format!("{count} portraits, worst closed-form mismatch {worst:.2e}; entropy falls with both spreads: {decreasing}"),
    )
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

fn ac9_beta() -> Outcome {
    let shapes = [(1.0, 1.0), (2.0, 2.0), (2.0, 5.0)];
    let (sp, sq) = ((-0.4, 0.6), (-1.5, 2.5));
    let n = 201;
    let grid = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let (gp, gq) = (grid(sp), grid(sq));
    let (hp, hq) = (
        (sp.1 - sp.0) / (n - 1) as f64,
        (sq.1 - sq.0) / (n - 1) as f64,
    );
    let mut worst_integral: f64 = 0.0;
    for &shape_p in &shapes {
        for &shape_q in &shapes {
            let w = BetaWavefunction::new(shape_p, shape_q, sp, sq).map_err(|e| e.to_string())?;
            let psi = joint_wavefunction(&w, &gp, &gq).map_err(|e| e.to_string())?;
            let mut total = 0.0;
            for (i, row) in psi.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    total += trapezoid_weight(i, psi.len()) * trapezoid_weight(j, row.len()) * v;
                }
            }
            worst_integral = worst_integral.max((total * hp * hq - 1.0).abs());
        }
    }
    let mut worst_fit: f64 = 0.0;
    for (i, &(a, b)) in shapes.iter().enumerate() {
        let mut rng = ChaCha20Rng::seed_from_u64(100 + i as u64);
        let dist = Beta::new(a, b).map_err(|e| e.to_string())?;
        let samples: Vec<f64> = (0..100_000)
            .map(|_| sq.0 + (sq.1 - sq.0) * dist.sample(&mut rng))
            .collect();
        let (fa, fb) = fit_beta(&samples, sq).map_err(|e| e.to_string())?;
        worst_fit = worst_fit.max(rel(fa, a)).max(rel(fb, b));
    }
    check(
        worst_integral <= 1e-3 && worst_fit <= 0.05,
        format!(
            "9 shape pairs integrate to 1 within {worst_integral:.2e}; fits at n = 1e5 within {:.2}%",
            worst_fit * 100.0
        ),
    )
}

struct Run {
    args: Vec<&'static str>,
    outputs: Vec<&'static str>,
}

fn determinism_runs() -> Vec<Run> {
    let synth = "synth --n 1024 --kmin 8 --kmax 128 --hurst 0.6 --seed 7 --out s.txt";
    [
        (synth, vec!["s.txt", "s.json"]),
        ("synth --fig6 --n 1024 --kmin 8 --out pair_", vec!["pair_a.txt", "pair_b.txt", "pair_report.json"]),
        (
            "analyze s.txt --l-cut 250 --out analyze.json --emit-points points.csv --emit-histograms hist_",
            vec!["analyze.json", "points.csv", "hist_q.csv", "hist_p.csv"],
        ),
        ("runin s.txt --steps 5 --bearing-fraction 0.6 --out runin.csv", vec!["runin.csv", "runin.json"]),
        ("compare pair_a.txt pair_b.txt --out compare.json", vec!["compare.json"]),
        ("scatter map.csv --spot 10 --step 5 --out scatter.csv", vec!["scatter.csv", "scatter.json"]),
    ]
    .into_iter()
    .map(|(line, outputs)| Run { args: line.split(' ').collect(), outputs })
    .collect()
}

fn write_map(dir: &Path) -> std::io::Result<()> {
    let mut text = String::from("# dx=1.25, dy=1.25\n");
    for r in 0..48 {
        let row: Vec<String> = (0..48)
            .map(|c| {
                let a = if c < 24 { 0.02 } else { 0.3 };
                (a * ((c as f64 * 0.9).sin() + (r as f64 * 0.7 + c as f64 * 0.3).cos())).to_string()
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(dir.join("map.csv"), text)
}

fn run_all(dir: &Path) -> Result<(), String> {
    write_map(dir).map_err(|e| e.to_string())?;
    for run in determinism_runs() {
        let out = Command::new(env!("CARGO_BIN_EXE_topophase"))
            .current_dir(dir)
            .env_remove("TOPOPHASE_OUT_DIR")
            .args(&run.args)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "{:?} failed: {}",
                run.args,
                String::from_utf8_lossy(&out.stderr).trim()
            ));
        }
    }
    Ok(())
}

fn ac10_determinism() -> Outcome {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_all(first.path())?;
    run_all(second.path())?;
    let mut problems = Vec::new();
    let mut files = 0;
    if update {
        fs::create_dir_all(&golden).map_err(|e| e.to_string())?;
    }
    for run in determinism_runs() {
        for name in run.outputs {
            files += 1;
            let a = fs::read(first.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
            let b = fs::read(second.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
            if a != b {
                problems.push(format!("{name} differs between runs"));
            }
            let reference = golden.join(name);
            if update {
                fs::write(&reference, &a).map_err(|e| e.to_string())?;
            } else {
                match fs::read(&reference) {
                    Ok(g) if g == a => {}
                    Ok(_) => problems.push(format!("{name} differs from golden")),
                    Err(_) => problems.push(format!("{name} has no golden file")),
                }
            }
        }
    }
    let mode = if update {
        "golden files rewritten"
    } else {
        "matched golden files"
    };
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!("{files} output files byte-identical across runs; {mode}")
        } else {
            problems.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("binning reproduction", ac1_binning),
        ("field arithmetic", ac2_field),
        ("Parseval", ac3_parseval),
        ("inverted pair", ac4_pair),
        ("Legendre identity", ac5_legendre),
        ("running-in monotonicity", ac6_running_in),
        ("Aq calibration and identity", ac7_aq),
        ("phase-volume closed form", ac8_phase_volume),
        ("Beta wavefunction", ac9_beta),
        ("determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("AC{} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
