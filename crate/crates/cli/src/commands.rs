//! Subcommand implementations.

use std::fs;
use std::path::Path;

use cohsteer::coherence::CoherenceMeasure;
use cohsteer::dataset::{theory_dataset, SigeurRow, SweepDataset, REFERENCE_THETAS_DEG};
use cohsteer::expsim::optics::{check_tables, ColumnCheck};
use cohsteer::expsim::{
    run_virtual_experiment, run_with_convention, select_convention, simulate_sigeur,
    ExperimentConfig,
};
use cohsteer::states::{bell_like, random_two_qubit_state, DensityMatrix};
use cohsteer::steering::{exceeds, sigeur_bound, sigeur_lhs, Assemblage};
use serde::{Deserialize, Serialize};

use crate::args::{
    parse_measures, parse_thetas, ReportArgs, SigeurArgs, SimulateArgs, TheoryArgs, VerifyArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{self, exceeds_printed, falls_below_printed, fmt4};

/// Reads a JSON experiment configuration; unknown keys are rejected.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::InvalidConfig(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn config_with_overrides(
    path: Option<&Path>,
    thetas: Option<&str>,
    seed: Option<u64>,
) -> CliResult<ExperimentConfig> {
    let mut config = match path {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = thetas {
        config.thetas = parse_thetas(t)?;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn print_rows(dataset: &SweepDataset) {
    println!(
        "{:>8} {:>4} {:>10} {:>10} {:>10} {:>18} {:>7} {:>5} {:>5}",
        "theta", "q", "S0", "S12/2", "S012/3", "S12/2 sim", "bound", "two", "one"
    );
    for r in &dataset.rows {
        let sim = r
            .sim
            .map(|s| format!("{}±{}", fmt4(s.s12_half.value), fmt4(s.s12_half.err)))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>8} {:>4} {:>10} {:>10} {:>10} {:>18} {:>7} {:>5} {:>5}",
            fmt4(r.theta_deg),
            r.measure,
            fmt4(r.theory.s0),
            fmt4(r.theory.s12_half),
            fmt4(r.theory.s012_third),
            sim,
            fmt4(r.bound),
            r.violates_two_setting,
            r.violates_one_setting
        );
    }
}

fn print_sigeur(rows: &[SigeurRow]) {
    println!(
        "{:>8} {:>8} {:>18} {:>7} {:>8}",
        "theta", "theory", "sim", "bound", "violated"
    );
    for r in rows {
        let sim = r
            .sim
            .map(|s| format!("{}±{}", fmt4(s.value), fmt4(s.err)))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>8} {:>8} {:>18} {:>7} {:>8}",
            fmt4(r.theta_deg),
            fmt4(r.theory),
            sim,
            fmt4(r.bound),
            r.violated
        );
    }
}

/// Exact values of the pure Bell-like states.
pub fn cmd_theory(thetas: &[f64], measures: &[CoherenceMeasure]) -> CliResult<SweepDataset> {
    Ok(theory_dataset(thetas, measures)?)
}

pub fn theory(args: &TheoryArgs) -> CliResult<()> {
    let thetas = parse_thetas(&args.thetas)?;
    let measures = parse_measures(&args.measures)?;
    let dataset = cmd_theory(&thetas, &measures)?;
    print_rows(&dataset);
    if let Some(dir) = &args.out {
        output::write_all(dir, "theory", &dataset, &measures)?;
    }
    Ok(())
}

/// Simulated sweep restricted to `measures`.
pub fn cmd_simulate(
    config: &ExperimentConfig,
    measures: &[CoherenceMeasure],
) -> CliResult<SweepDataset> {
    let mut dataset = run_virtual_experiment(config)?;
    dataset.retain_measures(measures);
    Ok(dataset)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let config = config_with_overrides(args.config.as_deref(), args.thetas.as_deref(), args.seed)?;
    let measures = parse_measures(&args.measures)?;
    let dataset = cmd_simulate(&config, &measures)?;
    print_rows(&dataset);
    print_sigeur(&dataset.sigeur);
    if let Some(conv) = dataset.convention {
        println!("wave-plate convention: {conv}");
    }
    if let Some(f) = dataset.mean_fidelity() {
        println!("mean two-qubit reconstruction fidelity: {}", fmt4(f));
    }
    println!(
        "conditional-state tomographies: {}",
        dataset.tomography_count()
    );
    output::write_all(&args.out, "simulate", &dataset, &measures)
}

/// Theory and simulated entropic-test rows of order `n`.
pub fn cmd_sigeur(config: &ExperimentConfig, n: f64) -> CliResult<Vec<SigeurRow>> {
    if !(n > 0.0 && n <= 2.0) {
        return Err(CliError::InvalidConfig(format!(
            "entropic order {n} outside (0, 2]"
        )));
    }
    Ok(simulate_sigeur(config, n)?)
}

pub fn sigeur(args: &SigeurArgs) -> CliResult<()> {
    let config = config_with_overrides(args.config.as_deref(), Some(&args.thetas), args.seed)?;
    let rows = cmd_sigeur(&config, args.n)?;
    print_sigeur(&rows);
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        output::write_sigeur_csv(&dir.join("sigeur.csv"), &rows)?;
    }
    Ok(())
}

/// One line of the verification summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|x| **x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

fn closed_form_defect(theta_deg: f64) -> CliResult<f64> {
    let t = theta_deg.to_radians();
    let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
    let a = Assemblage::from_state(&bell_like(t))?;
    let mut worst: f64 = 0.0;
    for q in CoherenceMeasure::ALL {
        let v = a.criteria(q)?;
        let (s0, s12) = match q {
            CoherenceMeasure::L1c => (2.0 * c2.abs(), 2.0 + s2.abs()),
            CoherenceMeasure::Rec => (
                2.0 * binary_entropy((1.0 + s2) / 2.0),
                2.0 + binary_entropy(t.cos().powi(2)),
            ),
            CoherenceMeasure::Sic => (2.0 * c2 * c2, 2.0 + s2 * s2),
        };
        worst = worst.max((v.s0 - s0).abs()).max((v.s12_half - s12).abs());
    }
    let sig = sigeur_lhs(&bell_like(t), 2.0)?;
    Ok(worst.max((sig - c2 * c2).abs()))
}

/// Counts (three-setting bound violations, complementarity violations).
fn bound_violations(
    states: impl Iterator<Item = DensityMatrix>,
) -> CliResult<(usize, usize, usize)> {
    let (mut n, mut bound, mut both) = (0, 0, 0);
    for rho in states {
        let a = Assemblage::from_state(&rho)?;
        for q in CoherenceMeasure::ALL {
            let v = a.criteria(q)?;
            if v.s012_third > q.bound() + 1e-9 {
                bound += 1;
            }
            if exceeds(v.s12_half, q.bound()) && exceeds(v.s0, q.bound()) {
                both += 1;
            }
        }
        n += 1;
    }
    Ok((n, bound, both))
}

fn table_check(checks: &[ColumnCheck]) -> Check {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "table {} {} realised {}",
                c.table,
                c.label,
                c.realised.as_deref().unwrap_or("no Pauli projector")
            )
        })
        .collect();
    Check {
        name: "settings tables".into(),
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!(
                "{}/{} columns reproduce their labels",
                checks.len(),
                checks.len()
            )
        } else {
            failed.join("; ")
        },
    }
}

/// Runs every verification check.
pub fn cmd_verify(samples: u64, seed: u64, flip_convention: bool) -> CliResult<Vec<Check>> {
    let selected = select_convention()?;
    let convention = if flip_convention {
        selected.flipped()
    } else {
        selected
    };
    let mut out = vec![table_check(&check_tables(&convention))];

    let mut worst: f64 = 0.0;
    for &t in &REFERENCE_THETAS_DEG {
        worst = worst.max(closed_form_defect(t)?);
    }
    out.push(Check {
        name: "closed forms".into(),
        passed: worst <= 1e-9,
        detail: format!("max deviation {worst:.2e} over 11 angles"),
    });

    let grid = (0..=90).map(|d| bell_like((d as f64).to_radians()));
    let random = (0..samples).map(|k| {
        random_two_qubit_state(seed.wrapping_add(k), 1 + (k % 4) as usize).expect("valid rank")
    });
    let (n, bound, both) = bound_violations(grid.chain(random))?;
    out.push(Check {
        name: "three-setting bound".into(),
        passed: bound == 0,
        detail: format!("{bound} violations over {n} states x 3 measures"),
    });
    out.push(Check {
        name: "complementarity".into(),
        passed: both == 0,
        detail: format!("{both} states violate both one- and two-setting criteria"),
    });

    let exact = ExperimentConfig {
        counts_per_setting: 1_000_000,
        visibility: 1.0,
        dephasing: 0.0,
        bootstrap_resamples: 1,
        exact_counts: true,
        ..ExperimentConfig::default()
    };
    let d = run_with_convention(&exact, convention)?;
    let mut dev: f64 = 0.0;
    for r in &d.rows {
        let s = r.sim.expect("simulated rows").values();
        dev = dev
            .max((s.s0 - r.theory.s0).abs())
            .max((s.s12_half - r.theory.s12_half).abs())
            .max((s.s012_third - r.theory.s012_third).abs());
    }
    out.push(Check {
        name: "infinite-count pipeline".into(),
        passed: dev <= 1e-6,
        detail: format!("max deviation from theory {dev:.2e}"),
    });

    let b = sigeur_bound(2.0, 3, 2)?;
    out.push(Check {
        name: "entropic bound".into(),
        passed: (b - 1.0).abs() < 1e-12,
        detail: format!("C_B(n=2, m=3, d=2) = {b}"),
    });
    Ok(out)
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    let checks = cmd_verify(args.samples, args.seed, args.flip_convention)?;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Verification(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

#[derive(Debug, Deserialize)]
struct TableLine {
    theta_deg: f64,
    measure: String,
    s0_theory: f64,
    s12half_theory: f64,
    #[allow(dead_code)]
    s012third_theory: f64,
    s0_sim: Option<f64>,
    #[allow(dead_code)]
    s0_err: Option<f64>,
    s12half_sim: Option<f64>,
    #[allow(dead_code)]
    s12half_err: Option<f64>,
    #[allow(dead_code)]
    s012third_sim: Option<f64>,
    #[allow(dead_code)]
    s012third_err: Option<f64>,
    bound: f64,
    violates_two_setting: bool,
    violates_one_setting: bool,
}

#[derive(Debug, Deserialize)]
struct SigeurLine {
    theta_deg: f64,
    theory: f64,
    sim: Option<f64>,
    bound: f64,
    violated: bool,
}

/// Merged view of the files in an output directory.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub two_setting_violations: Vec<(f64, String)>,
    pub one_setting_violations: Vec<(f64, String)>,
    pub sigeur_violations: Vec<f64>,
    /// Rows whose verdict columns disagree with their printed values.
    pub inconsistent_verdicts: usize,
    pub convention: Option<serde_json::Value>,
    pub mean_fidelity: Option<serde_json::Value>,
    pub config: Option<serde_json::Value>,
}

pub fn cmd_report(dir: &Path) -> CliResult<Summary> {
    let mut summary = Summary {
        rows: 0,
        two_setting_violations: Vec::new(),
        one_setting_violations: Vec::new(),
        sigeur_violations: Vec::new(),
        inconsistent_verdicts: 0,
        convention: None,
        mean_fidelity: None,
        config: None,
    };
    let tables = dir.join("tables.csv");
    for line in csv::Reader::from_path(&tables)?.deserialize() {
        let line: TableLine = line?;
        summary.rows += 1;
        let s0 = line.s0_sim.unwrap_or(line.s0_theory);
        let s12 = line.s12half_sim.unwrap_or(line.s12half_theory);
        let two = exceeds_printed(s12, line.bound);
        let one = exceeds_printed(s0, line.bound);
        if two != line.violates_two_setting || one != line.violates_one_setting {
            summary.inconsistent_verdicts += 1;
        }
        if two {
            summary
                .two_setting_violations
                .push((line.theta_deg, line.measure.clone()));
        }
        if one {
            summary
                .one_setting_violations
                .push((line.theta_deg, line.measure));
        }
    }
    let sigeur_path = dir.join("sigeur.csv");
    if sigeur_path.exists() {
        for line in csv::Reader::from_path(&sigeur_path)?.deserialize() {
            let line: SigeurLine = line?;
            let violated = falls_below_printed(line.sim.unwrap_or(line.theory), line.bound);
            if violated != line.violated {
                summary.inconsistent_verdicts += 1;
            }
            if violated {
                summary.sigeur_violations.push(line.theta_deg);
            }
        }
    }
    let report_path = dir.join("report.json");
    if report_path.exists() {
        let text = fs::read_to_string(&report_path).map_err(|e| CliError::io(&report_path, e))?;
        let v: serde_json::Value = serde_json::from_str(&text)?;
        summary.convention = v.get("convention").filter(|c| !c.is_null()).cloned();
        summary.mean_fidelity = v.get("mean_fidelity").filter(|c| !c.is_null()).cloned();
        summary.config = v
            .pointer("/dataset/config")
            .filter(|c| !c.is_null())
            .cloned();
    }
    Ok(summary)
}

pub fn report(args: &ReportArgs) -> CliResult<()> {
    let summary = cmd_report(&args.out)?;
    println!("rows: {}", summary.rows);
    let fmt_pairs = |v: &[(f64, String)]| {
        v.iter()
            .map(|(t, q)| format!("{q}@{}", fmt4(*t)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!(
        "two-setting violations: {}",
        fmt_pairs(&summary.two_setting_violations)
    );
    println!(
        "one-setting violations: {}",
        fmt_pairs(&summary.one_setting_violations)
    );
    println!(
        "entropic-test violations: {}",
        summary
            .sigeur_violations
            .iter()
            .map(|t| fmt4(*t))
            .collect::<Vec<_>>()
            .join(" ")
    );
    if let Some(c) = &summary.convention {
        println!("wave-plate convention: {c}");
    }
    if let Some(f) = &summary.mean_fidelity {
        println!("mean fidelity: {f}");
    }
    let path = args.out.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    if summary.inconsistent_verdicts > 0 {
        return Err(CliError::Verification(format!(
            "{} rows carry verdicts that do not follow from their values",
            summary.inconsistent_verdicts
        )));
    }
    Ok(())
}
