//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cohsteer::CoherenceMeasure;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "cohsteer",
    version,
    about = "Coherence steering criteria: theory, simulation and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact criterion values of the Bell-like states.
    Theory(TheoryArgs),
    /// Simulated photonic sweep with bootstrap error bars.
    Simulate(SimulateArgs),
    /// Entropic steering test: theory and simulation.
    Sigeur(SigeurArgs),
    /// Settings tables, closed forms, bound and complementarity checks.
    Verify(VerifyArgs),
    /// Summarise the outputs previously written to a directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Comma-separated angles in degrees.
    #[arg(long, default_value = "0,10,20,30,40,45,50,60,70,80,90")]
    pub thetas: String,
    /// Comma-separated subset of l1c, rec, sic.
    #[arg(long, default_value = "l1c,rec,sic")]
    pub measures: String,
    /// Output directory; nothing is written when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON experiment configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured angles (degrees).
    #[arg(long)]
    pub thetas: Option<String>,
    #[arg(long, default_value = "l1c,rec,sic")]
    pub measures: String,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SigeurArgs {
    #[arg(long, default_value = "10,80")]
    pub thetas: String,
    /// Entropic order, in (0, 2].
    #[arg(long, default_value_t = 2.0)]
    pub n: f64,
    /// JSON experiment configuration for the simulated column.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for sigeur.csv; nothing is written when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of random two-qubit states in the bound sample.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate the settings tables under the other QWP dial reference.
    #[arg(long)]
    pub flip_convention: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding tables.csv, sigeur.csv and report.json.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Parses `"0,10,45"` into degrees; an empty list is rejected.
pub fn parse_thetas(s: &str) -> CliResult<Vec<f64>> {
    let thetas = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::InvalidConfig(format!("bad angle {t:?}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if thetas.is_empty() {
        return Err(CliError::InvalidConfig("theta list is empty".into()));
    }
    Ok(thetas)
}

/// Parses `"l1c,rec"`; duplicates are dropped, order is kept.
pub fn parse_measures(s: &str) -> CliResult<Vec<CoherenceMeasure>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let q: CoherenceMeasure = part
            .parse()
            .map_err(|_| CliError::InvalidConfig(format!("unknown measure {part:?}")))?;
        if !out.contains(&q) {
            out.push(q);
        }
    }
    if out.is_empty() {
        return Err(CliError::InvalidConfig("measure list is empty".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_lists() {
        assert_eq!(parse_thetas("0, 22.5,90").unwrap(), vec![0.0, 22.5, 90.0]);
        assert!(matches!(parse_thetas(""), Err(CliError::InvalidConfig(_))));
        assert!(parse_thetas("10,x").is_err());
        assert!(parse_thetas("nan").is_err());
    }

    #[test]
    fn measure_lists() {
        assert_eq!(
            parse_measures("sic,l1c,sic").unwrap(),
            vec![CoherenceMeasure::Sic, CoherenceMeasure::L1c]
        );
        assert!(parse_measures("l2").is_err());
        assert!(parse_measures(",").is_err());
    }
}
