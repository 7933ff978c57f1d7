//! CSV and JSON artefacts.
//!
//! CSV numbers carry four decimals. Verdict columns are derived from the
//! printed value and bound strings, so a reader can recompute every verdict
//! from the file alone.

use std::fs;
use std::path::Path;

use cohsteer::coherence::CoherenceMeasure;
use cohsteer::dataset::{CriterionRow, SigeurRow, SweepDataset};
use cohsteer::states::bell_like;
use cohsteer::steering::{sigeur_bound, sigeur_lhs, Assemblage, SIGEUR_ORDER};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TABLE_HEADER: [&str; 14] = [
    "theta_deg",
    "measure",
    "s0_theory",
    "s12half_theory",
    "s012third_theory",
    "s0_sim",
    "s0_err",
    "s12half_sim",
    "s12half_err",
    "s012third_sim",
    "s012third_err",
    "bound",
    "violates_two_setting",
    "violates_one_setting",
];

pub const SIGEUR_HEADER: [&str; 7] = [
    "theta_deg",
    "order",
    "theory",
    "sim",
    "sim_err",
    "bound",
    "violated",
];

/// Four decimals, without a sign on zero.
pub fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn printed(x: f64) -> f64 {
    fmt4(x).parse().expect("formatted float")
}

/// Upper-bound violation judged on the printed strings.
pub fn exceeds_printed(value: f64, bound: f64) -> bool {
    printed(value) > printed(bound)
}

/// Lower-bound violation judged on the printed strings.
pub fn falls_below_printed(value: f64, bound: f64) -> bool {
    printed(value) < printed(bound)
}

pub fn table_record(row: &CriterionRow) -> [String; 14] {
    let (sim_cells, judged) = match row.sim {
        Some(s) => (
            [
                fmt4(s.s0.value),
                fmt4(s.s0.err),
                fmt4(s.s12_half.value),
                fmt4(s.s12_half.err),
                fmt4(s.s012_third.value),
                fmt4(s.s012_third.err),
            ],
            s.values(),
        ),
        None => (Default::default(), row.theory),
    };
    let [a, b, c, d, e, f] = sim_cells;
    [
        fmt4(row.theta_deg),
        row.measure.label().to_string(),
        fmt4(row.theory.s0),
        fmt4(row.theory.s12_half),
        fmt4(row.theory.s012_third),
        a,
        b,
        c,
        d,
        e,
        f,
        fmt4(row.bound),
        exceeds_printed(judged.s12_half, row.bound).to_string(),
        exceeds_printed(judged.s0, row.bound).to_string(),
    ]
}

pub fn sigeur_record(row: &SigeurRow) -> [String; 7] {
    let judged = row.sim.map(|s| s.value).unwrap_or(row.theory);
    [
        fmt4(row.theta_deg),
        fmt4(row.order),
        fmt4(row.theory),
        row.sim.map(|s| fmt4(s.value)).unwrap_or_default(),
        row.sim.map(|s| fmt4(s.err)).unwrap_or_default(),
        fmt4(row.bound),
        falls_below_printed(judged, row.bound).to_string(),
    ]
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_csv<const N: usize>(
    path: &Path,
    header: [&str; N],
    records: impl Iterator<Item = [String; N]>,
) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in records {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_tables_csv(path: &Path, rows: &[CriterionRow]) -> CliResult<()> {
    write_csv(path, TABLE_HEADER, rows.iter().map(table_record))
}

pub fn write_sigeur_csv(path: &Path, rows: &[SigeurRow]) -> CliResult<()> {
    write_csv(path, SIGEUR_HEADER, rows.iter().map(sigeur_record))
}

/// Theory curves on a 1° grid over [0°, 90°], one file per measure plus the
/// entropic test.
pub fn write_plotdata(dir: &Path, measures: &[CoherenceMeasure]) -> CliResult<()> {
    ensure_dir(dir)?;
    let grid: Vec<f64> = (0..=90).map(f64::from).collect();
    for &q in measures {
        let records = grid
            .iter()
            .map(|&t| {
                let v = Assemblage::from_state(&bell_like(t.to_radians()))?.criteria(q)?;
                Ok([
                    fmt4(t),
                    fmt4(v.s0),
                    fmt4(v.s12_half),
                    fmt4(v.s012_third),
                    fmt4(q.bound()),
                ])
            })
            .collect::<CliResult<Vec<_>>>()?;
        write_csv(
            &dir.join(format!("{}.csv", q.label())),
            ["theta_deg", "s0", "s12half", "s012third", "bound"],
            records.into_iter(),
        )?;
    }
    let bound = sigeur_bound(SIGEUR_ORDER, 3, 2)?;
    let records = grid
        .iter()
        .map(|&t| {
            Ok([
                fmt4(t),
                fmt4(sigeur_lhs(&bell_like(t.to_radians()), SIGEUR_ORDER)?),
                fmt4(bound),
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    write_csv(
        &dir.join("sigeur.csv"),
        ["theta_deg", "lhs", "bound"],
        records.into_iter(),
    )
}

/// Full-precision run record.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub command: &'a str,
    pub version: &'a str,
    /// Wave-plate convention in words, next to its structured form in `dataset`.
    pub convention: Option<String>,
    pub mean_fidelity: Option<f64>,
    pub conditional_tomographies: usize,
    pub dataset: &'a SweepDataset,
}

pub fn write_report_json(path: &Path, command: &str, dataset: &SweepDataset) -> CliResult<()> {
    let report = RunReport {
        command,
        version: env!("CARGO_PKG_VERSION"),
        convention: dataset.convention.map(|c| c.to_string()),
        mean_fidelity: dataset.mean_fidelity(),
        conditional_tomographies: dataset.tomography_count(),
        dataset,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes tables.csv, sigeur.csv, report.json and plotdata/ under `dir`.
pub fn write_all(
    dir: &Path,
    command: &str,
    dataset: &SweepDataset,
    measures: &[CoherenceMeasure],
) -> CliResult<()> {
    ensure_dir(dir)?;
    write_tables_csv(&dir.join("tables.csv"), &dataset.rows)?;
    write_sigeur_csv(&dir.join("sigeur.csv"), &dataset.sigeur)?;
    write_report_json(&dir.join("report.json"), command, dataset)?;
    write_plotdata(&dir.join("plotdata"), measures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cohsteer::dataset::theory_dataset;

    #[test]
    fn four_decimal_formatting() {
        assert_eq!(fmt4(6f64.sqrt()), "2.4495");
        assert_eq!(fmt4(-0.00001), "0.0000");
        assert_eq!(fmt4(-0.5), "-0.5000");
        assert_eq!(fmt4(10.0), "10.0000");
    }

    #[test]
    fn verdicts_follow_printed_values() {
        assert!(!exceeds_printed(2.0 + 1e-12, 2.0));
        assert!(!exceeds_printed(2.44952, 6f64.sqrt()));
        assert!(exceeds_printed(2.1170, 2.0));
        assert!(falls_below_printed(0.883, 1.0));
    }

    #[test]
    fn theory_record_layout() {
        let d = theory_dataset(&[45.0], &[CoherenceMeasure::L1c]).unwrap();
        let r = table_record(&d.rows[0]);
        assert_eq!(r[0], "45.0000");
        assert_eq!(r[1], "l1c");
        assert_eq!(&r[2..5], ["0.0000", "3.0000", "2.0000"]);
        assert!(r[5..11].iter().all(String::is_empty));
        assert_eq!(r[11], "2.4495");
        assert_eq!(&r[12..], ["true", "false"]);
    }
}
