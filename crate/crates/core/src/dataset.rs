//! Sweep results: one row per (θ, measure) plus per-θ entropic-test rows.

use serde::Serialize;

use crate::coherence::CoherenceMeasure;
use crate::error::{Error, Result};
use crate::expsim::experiment::ExperimentConfig;
use crate::expsim::optics::JonesConvention;
use crate::states::bell_like;
use crate::steering::{
    exceeds, falls_below, sigeur_bound, sigeur_lhs, Assemblage, CriterionValues, REC_MARGIN,
    SIGEUR_ORDER,
};

/// The eleven state angles of the reference sweep, in degrees.
pub const REFERENCE_THETAS_DEG: [f64; 11] = [
    0.0, 10.0, 20.0, 30.0, 40.0, 45.0, 50.0, 60.0, 70.0, 80.0, 90.0,
];

/// A point estimate with its bootstrap standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulatedValues {
    pub s0: Estimate,
    pub s12_half: Estimate,
    pub s012_third: Estimate,
}

impl SimulatedValues {
    pub fn values(&self) -> CriterionValues {
        CriterionValues {
            s0: self.s0.value,
            s12_half: self.s12_half.value,
            s012_third: self.s012_third.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionRow {
    pub theta_deg: f64,
    pub measure: CoherenceMeasure,
    /// Pure Bell-like state.
    pub theory: CriterionValues,
    /// Exact values of the noisy state fed to the simulation.
    pub model: Option<CriterionValues>,
    pub sim: Option<SimulatedValues>,
    pub bound: f64,
    pub violates_two_setting: bool,
    pub violates_one_setting: bool,
    pub marginal: bool,
}

impl CriterionRow {
    /// Verdicts are taken from the simulated values when present.
    pub fn new(
        theta_deg: f64,
        measure: CoherenceMeasure,
        theory: CriterionValues,
        model: Option<CriterionValues>,
        sim: Option<SimulatedValues>,
    ) -> Self {
        let bound = measure.bound();
        let judged = sim.map(|s| s.values()).unwrap_or(theory);
        let marginal = measure == CoherenceMeasure::Rec
            && [judged.s0, judged.s12_half]
                .iter()
                .any(|v| (v - bound).abs() <= REC_MARGIN);
        Self {
            theta_deg,
            measure,
            theory,
            model,
            sim,
            bound,
            violates_two_setting: exceeds(judged.s12_half, bound),
            violates_one_setting: exceeds(judged.s0, bound),
            marginal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigeurRow {
    pub theta_deg: f64,
    pub order: f64,
    pub theory: f64,
    pub model: Option<f64>,
    pub sim: Option<Estimate>,
    pub bound: f64,
    pub violated: bool,
}

impl SigeurRow {
    pub fn new(
        theta_deg: f64,
        order: f64,
        theory: f64,
        model: Option<f64>,
        sim: Option<Estimate>,
    ) -> Result<Self> {
        let bound = sigeur_bound(order, 3, 2)?;
        let judged = sim.map(|s| s.value).unwrap_or(theory);
        Ok(Self {
            theta_deg,
            order,
            theory,
            model,
            sim,
            bound,
            violated: falls_below(judged, bound),
        })
    }
}

/// Per-θ reconstruction diagnostics of a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDiagnostics {
    pub theta_deg: f64,
    /// Fidelity of the two-qubit reconstruction to the ideal Bell-like state.
    pub fidelity: f64,
    pub conditional_tomographies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDataset {
    pub convention: Option<JonesConvention>,
    pub config: Option<ExperimentConfig>,
    pub rows: Vec<CriterionRow>,
    pub sigeur: Vec<SigeurRow>,
    pub diagnostics: Vec<PointDiagnostics>,
}

impl SweepDataset {
    pub fn row(&self, theta_deg: f64, measure: CoherenceMeasure) -> Option<&CriterionRow> {
        self.rows
            .iter()
            .find(|r| r.measure == measure && (r.theta_deg - theta_deg).abs() < 1e-9)
    }

    pub fn sigeur_row(&self, theta_deg: f64) -> Option<&SigeurRow> {
        self.sigeur
            .iter()
            .find(|r| (r.theta_deg - theta_deg).abs() < 1e-9)
    }

    pub fn tomography_count(&self) -> usize {
        self.diagnostics
            .iter()
            .map(|d| d.conditional_tomographies)
            .sum()
    }

    pub fn mean_fidelity(&self) -> Option<f64> {
        if self.diagnostics.is_empty() {
            return None;
        }
        Some(
            self.diagnostics.iter().map(|d| d.fidelity).sum::<f64>()
                / self.diagnostics.len() as f64,
        )
    }

    /// Keeps only rows of the given measures, in the given order per θ.
    pub fn retain_measures(&mut self, measures: &[CoherenceMeasure]) {
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut thetas: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !thetas.contains(&r.theta_deg) {
                thetas.push(r.theta_deg);
            }
        }
        for t in thetas {
            for &m in measures {
                if let Some(r) = self
                    .rows
                    .iter()
                    .find(|r| r.theta_deg == t && r.measure == m)
                {
                    rows.push(*r);
                }
            }
        }
        self.rows = rows;
    }
}

pub(crate) fn check_thetas(thetas_deg: &[f64]) -> Result<()> {
    if thetas_deg.is_empty() {
        return Err(Error::InvalidConfig("theta list is empty".into()));
    }
    if let Some(t) = thetas_deg.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidConfig(format!("theta {t} is not finite")));
    }
    Ok(())
}

/// Exact criterion values of the pure Bell-like states.
pub fn theory_dataset(thetas_deg: &[f64], measures: &[CoherenceMeasure]) -> Result<SweepDataset> {
    check_thetas(thetas_deg)?;
    let mut rows = Vec::with_capacity(thetas_deg.len() * measures.len());
    let mut sigeur = Vec::with_capacity(thetas_deg.len());
    for &t in thetas_deg {
        let rho = bell_like(t.to_radians());
        let assemblage = Assemblage::from_state(&rho)?;
        for &m in measures {
            rows.push(CriterionRow::new(t, m, assemblage.criteria(m)?, None, None));
        }
        sigeur.push(SigeurRow::new(
            t,
            SIGEUR_ORDER,
            sigeur_lhs(&rho, SIGEUR_ORDER)?,
            None,
            None,
        )?);
    }
    Ok(SweepDataset {
        convention: None,
        config: None,
        rows,
        sigeur,
        diagnostics: Vec::new(),
    })
}
