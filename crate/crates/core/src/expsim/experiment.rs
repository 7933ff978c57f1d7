//! The θ sweep: noisy state preparation, counting, reconstruction, errors.
//!
//! Per θ the simulated bench records two count sets. The steering run counts
//! all 36 coincidence cells `M_a^i ⊗ M_b^j` (Alice via the measurement module,
//! Bob via the tomography module); Alice's outcome probabilities and Bob's six
//! conditional states are estimated from them. The entropic run counts the
//! 12 cells `M_a^i ⊗ M_b^i` with both photons in the tomography module.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::bootstrap_many_with;
use super::counts::poisson;
use super::optics::{select_convention, JonesConvention};
use super::tomography::{qubit_from_bloch_estimate, tomo_2q, JointCounts};
use crate::coherence::{CoherenceMeasure, PauliAxis};
use crate::dataset::{
    check_thetas, CriterionRow, Estimate, PointDiagnostics, SigeurRow, SimulatedValues,
    SweepDataset, REFERENCE_THETAS_DEG,
};
use crate::error::{Error, Result};
use crate::matcore::{tensor, ComplexMatrix};
use crate::states::{apply_bob_dephasing, apply_white_noise, bell_like, fidelity, DensityMatrix};
use crate::steering::{
    sigeur_from_joint, sigeur_lhs, Assemblage, ConditionalEnsemble, CriterionValues,
    JointProbabilities, SIGEUR_ORDER,
};

const STREAM_JOINT: u64 = 0;
const STREAM_SIGEUR: u64 = 1;
const STREAM_JOINT_BOOTSTRAP: u64 = 2;
const STREAM_SIGEUR_BOOTSTRAP: u64 = 3;
const STREAMS_PER_POINT: u64 = 4;

const JOINT_CELLS: usize = 36;
const SIGEUR_CELLS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// State angles in degrees.
    pub thetas: Vec<f64>,
    /// Expected coincidences per setting (summed over its four outcomes).
    pub counts_per_setting: u64,
    pub visibility: f64,
    /// Bob-side z dephasing probability.
    pub dephasing: f64,
    pub bootstrap_resamples: usize,
    pub seed: u64,
    /// Use expected counts instead of Poisson draws (infinite-statistics limit).
    pub exact_counts: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            thetas: REFERENCE_THETAS_DEG.to_vec(),
            counts_per_setting: 5000,
            visibility: 0.995,
            dephasing: 0.005,
            bootstrap_resamples: 200,
            seed: 2024,
            exact_counts: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_thetas(&self.thetas)?;
        if self.counts_per_setting == 0 {
            return Err(Error::InvalidConfig(
                "counts_per_setting must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidConfig(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if !(0.0..=1.0).contains(&self.dephasing) {
            return Err(Error::InvalidConfig(format!(
                "dephasing {} outside [0, 1]",
                self.dephasing
            )));
        }
        if self.bootstrap_resamples == 0 {
            return Err(Error::InvalidConfig(
                "bootstrap_resamples must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The noisy state prepared for angle `theta_deg`.
    pub fn prepared_state(&self, theta_deg: f64) -> Result<DensityMatrix> {
        let ideal = bell_like(theta_deg.to_radians());
        apply_bob_dephasing(&apply_white_noise(&ideal, self.visibility)?, self.dephasing)
    }

    fn rng(&self, point: usize, purpose: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(point as u64 * STREAMS_PER_POINT + purpose);
        rng
    }

    fn draw(&self, rng: &mut ChaCha8Rng, mean: f64) -> f64 {
        if self.exact_counts {
            mean
        } else {
            poisson(rng, mean)
        }
    }
}

type Projectors = [[ComplexMatrix; 2]; 3];

fn joint_cell(i: usize, j: usize, a: usize, b: usize) -> usize {
    12 * i + 4 * j + 2 * a + b
}

fn expected_joint(
    rho: &DensityMatrix,
    alice: &Projectors,
    bob: &Projectors,
    n: f64,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; JOINT_CELLS];
    for i in 0..3 {
        for j in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    let p = tensor(&alice[i][a], &bob[j][b])?;
                    out[joint_cell(i, j, a, b)] = n * rho.expectation(&p).max(0.0);
                }
            }
        }
    }
    Ok(out)
}

fn expected_sigeur(rho: &DensityMatrix, proj: &Projectors, n: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; SIGEUR_CELLS];
    for i in 0..3 {
        for a in 0..2 {
            for b in 0..2 {
                let p = tensor(&proj[i][a], &proj[i][b])?;
                out[4 * i + 2 * a + b] = n * rho.expectation(&p).max(0.0);
            }
        }
    }
    Ok(out)
}

fn to_joint_counts(flat: &[f64]) -> JointCounts {
    let mut out = [[[0.0; 4]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j].copy_from_slice(&flat[12 * i + 4 * j..12 * i + 4 * j + 4]);
        }
    }
    out
}

/// Bob's state after Alice's outcome `a` on axis `i`, by linear inversion of
/// the conditioned counts. An empty Bob basis contributes a zero Bloch
/// component; a fully empty branch yields `None`.
fn conditional_state(counts: &JointCounts, i: usize, a: usize) -> Result<Option<DensityMatrix>> {
    let mut r = [0.0; 3];
    let mut seen = false;
    for j in 0..3 {
        let (n0, n1) = (counts[i][j][2 * a], counts[i][j][2 * a + 1]);
        if n0 + n1 > 0.0 {
            r[j] = (n0 - n1) / (n0 + n1);
            seen = true;
        }
    }
    if !seen {
        return Ok(None);
    }
    qubit_from_bloch_estimate(r).map(Some)
}

/// Assemblage estimated from the 36 coincidence cells.
pub fn assemblage_from_counts(counts: &JointCounts) -> Result<Assemblage> {
    let mut ensembles = Vec::with_capacity(3);
    for axis in PauliAxis::ALL {
        let i = axis.index();
        let per_outcome: [f64; 2] = [0, 1].map(|a| {
            (0..3)
                .map(|j| counts[i][j][2 * a] + counts[i][j][2 * a + 1])
                .sum()
        });
        let total = per_outcome[0] + per_outcome[1];
        if !(total > 0.0) {
            return Err(Error::InsufficientData(format!(
                "no coincidences for Alice axis {axis}"
            )));
        }
        let mut parts = Vec::with_capacity(2);
        for a in 0..2 {
            let p = per_outcome[a] / total;
            let state = match conditional_state(counts, i, a)? {
                Some(s) => s,
                None => DensityMatrix::maximally_mixed(2)?,
            };
            parts.push((p, state));
        }
        let [p0, p1]: [(f64, DensityMatrix); 2] = parts.try_into().expect("two outcomes");
        ensembles.push(ConditionalEnsemble::new(axis, [p0, p1])?);
    }
    let ensembles: [ConditionalEnsemble; 3] = ensembles.try_into().expect("three axes");
    Assemblage::new(ensembles)
}

fn criteria_vector(flat: &[f64]) -> Result<Vec<f64>> {
    let assemblage = assemblage_from_counts(&to_joint_counts(flat))?;
    let mut out = Vec::with_capacity(9);
    for q in CoherenceMeasure::ALL {
        let c = assemblage.criteria(q)?;
        out.extend([c.s0, c.s12_half, c.s012_third]);
    }
    Ok(out)
}

fn sigeur_value(flat: &[f64], order: f64) -> Result<f64> {
    let mut joint: JointProbabilities = [[0.0; 4]; 3];
    for i in 0..3 {
        joint[i].copy_from_slice(&flat[4 * i..4 * i + 4]);
    }
    sigeur_from_joint(&joint, order)
}

fn sigeur_point(
    config: &ExperimentConfig,
    point: usize,
    theta_deg: f64,
    order: f64,
    proj: &Projectors,
) -> Result<SigeurRow> {
    let rho = config.prepared_state(theta_deg)?;
    let n = config.counts_per_setting as f64;
    let mut rng = config.rng(point, STREAM_SIGEUR);
    let counts: Vec<f64> = expected_sigeur(&rho, proj, n)?
        .into_iter()
        .map(|mu| config.draw(&mut rng, mu))
        .collect();
    let value = sigeur_value(&counts, order)?;
    let mut boot_rng = config.rng(point, STREAM_SIGEUR_BOOTSTRAP);
    let spread = bootstrap_many_with(
        &mut boot_rng,
        &counts,
        |c| Ok(vec![sigeur_value(c, order)?]),
        config.bootstrap_resamples,
    )?;
    let theory = sigeur_lhs(&bell_like(theta_deg.to_radians()), order)?;
    SigeurRow::new(
        theta_deg,
        order,
        theory,
        Some(sigeur_lhs(&rho, order)?),
        Some(Estimate {
            value,
            err: spread[0].1,
        }),
    )
}

struct PointResult {
    rows: Vec<CriterionRow>,
    sigeur: SigeurRow,
    diagnostics: PointDiagnostics,
}

fn simulate_point(
    config: &ExperimentConfig,
    point: usize,
    theta_deg: f64,
    alice: &Projectors,
    bob: &Projectors,
) -> Result<PointResult> {
    let ideal = bell_like(theta_deg.to_radians());
    let rho = config.prepared_state(theta_deg)?;
    let n = config.counts_per_setting as f64;

    let mut rng = config.rng(point, STREAM_JOINT);
    let counts: Vec<f64> = expected_joint(&rho, alice, bob, n)?
        .into_iter()
        .map(|mu| config.draw(&mut rng, mu))
        .collect();
    let point_values = criteria_vector(&counts)?;
    let mut boot_rng = config.rng(point, STREAM_JOINT_BOOTSTRAP);
    let spread = bootstrap_many_with(
        &mut boot_rng,
        &counts,
        criteria_vector,
        config.bootstrap_resamples,
    )?;

    let theory = Assemblage::from_state(&ideal)?;
    let model = Assemblage::from_state(&rho)?;
    let mut rows = Vec::with_capacity(3);
    for (k, q) in CoherenceMeasure::ALL.into_iter().enumerate() {
        let est = |m: usize| Estimate {
            value: point_values[3 * k + m],
            err: spread[3 * k + m].1,
        };
        let sim = SimulatedValues {
            s0: est(0),
            s12_half: est(1),
            s012_third: est(2),
        };
        rows.push(CriterionRow::new(
            theta_deg,
            q,
            theory.criteria(q)?,
            Some(model.criteria(q)?),
            Some(sim),
        ));
    }

    let reconstructed = tomo_2q(&to_joint_counts(&counts))?;
    let diagnostics = PointDiagnostics {
        theta_deg,
        fidelity: fidelity(&reconstructed, &ideal)?,
        conditional_tomographies: 6,
    };
    let sigeur = sigeur_point(config, point, theta_deg, SIGEUR_ORDER, bob)?;
    Ok(PointResult {
        rows,
        sigeur,
        diagnostics,
    })
}

/// Runs the full simulated sweep with the wave-plate convention selected
/// from the settings tables.
pub fn run_virtual_experiment(config: &ExperimentConfig) -> Result<SweepDataset> {
    run_with_convention(config, select_convention()?)
}

/// Runs the sweep under an explicit wave-plate convention.
pub fn run_with_convention(
    config: &ExperimentConfig,
    convention: JonesConvention,
) -> Result<SweepDataset> {
    config.validate()?;
    let alice = convention.pmo_projectors();
    let bob = convention.tomography_projectors();
    let points = config
        .thetas
        .par_iter()
        .enumerate()
        .map(|(k, &t)| simulate_point(config, k, t, &alice, &bob))
        .collect::<Result<Vec<_>>>()?;

    let mut dataset = SweepDataset {
        convention: Some(convention),
        config: Some(config.clone()),
        rows: Vec::with_capacity(points.len() * 3),
        sigeur: Vec::with_capacity(points.len()),
        diagnostics: Vec::with_capacity(points.len()),
    };
    for p in points {
        dataset.rows.extend(p.rows);
        dataset.sigeur.push(p.sigeur);
        dataset.diagnostics.push(p.diagnostics);
    }
    Ok(dataset)
}

/// Entropic steering test alone, of order `order`, at the angles of `config`.
pub fn simulate_sigeur(config: &ExperimentConfig, order: f64) -> Result<Vec<SigeurRow>> {
    config.validate()?;
    let proj = select_convention()?.tomography_projectors();
    config
        .thetas
        .par_iter()
        .enumerate()
        .map(|(k, &t)| sigeur_point(config, k, t, order, &proj))
        .collect()
}

/// Criterion values of the pure state at `theta_deg`, for every measure.
pub fn theory_values(theta_deg: f64) -> Result<Vec<(CoherenceMeasure, CriterionValues)>> {
    let a = Assemblage::from_state(&bell_like(theta_deg.to_radians()))?;
    CoherenceMeasure::ALL
        .iter()
        .map(|&q| Ok((q, a.criteria(q)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless_exact(thetas: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig {
            thetas,
            counts_per_setting: 1_000_000,
            visibility: 1.0,
            dephasing: 0.0,
            bootstrap_resamples: 2,
            seed: 1,
            exact_counts: true,
        }
    }

    #[test]
    fn infinite_statistics_reproduce_theory() {
        let d = run_virtual_experiment(&noiseless_exact(REFERENCE_THETAS_DEG.to_vec())).unwrap();
        for row in &d.rows {
            let sim = row.sim.unwrap().values();
            for (s, t) in [
                (sim.s0, row.theory.s0),
                (sim.s12_half, row.theory.s12_half),
                (sim.s012_third, row.theory.s012_third),
            ] {
                assert!(
                    (s - t).abs() < 1e-6,
                    "{} {}: {s} vs {t}",
                    row.theta_deg,
                    row.measure
                );
            }
        }
        for s in &d.sigeur {
            assert!((s.sim.unwrap().value - s.theory).abs() < 1e-6);
        }
        for diag in &d.diagnostics {
            assert!(1.0 - diag.fidelity < 1e-9);
        }
    }

    #[test]
    fn reference_grid_reconstructs_66_conditional_states() {
        let cfg = ExperimentConfig {
            bootstrap_resamples: 2,
            ..ExperimentConfig::default()
        };
        let d = run_virtual_experiment(&cfg).unwrap();
        assert_eq!(d.rows.len(), 33);
        assert_eq!(d.sigeur.len(), 11);
        assert_eq!(d.tomography_count(), 66);
    }

    #[test]
    fn sic_two_setting_at_45_with_visibility_099() {
        let cfg = ExperimentConfig {
            thetas: vec![45.0],
            visibility: 0.99,
            dephasing: 0.0,
            bootstrap_resamples: 20,
            ..ExperimentConfig::default()
        };
        let d = run_virtual_experiment(&cfg).unwrap();
        let row = d.row(45.0, CoherenceMeasure::Sic).unwrap();
        // 3 (1 - sqrt(1 - v^2)) for white noise of visibility v
        let model = row.model.unwrap().s12_half;
        assert!((model - 2.576798).abs() < 1e-6, "{model}");
        let sim = row.sim.unwrap().s12_half;
        assert!((sim.value - model).abs() < 4.0 * sim.err, "{sim:?}");
    }

    #[test]
    fn same_seed_same_dataset() {
        let cfg = ExperimentConfig {
            thetas: vec![10.0, 45.0, 80.0],
            bootstrap_resamples: 10,
            ..ExperimentConfig::default()
        };
        assert_eq!(
            run_virtual_experiment(&cfg).unwrap(),
            run_virtual_experiment(&cfg).unwrap()
        );
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            ExperimentConfig {
                thetas: vec![],
                ..Default::default()
            },
            ExperimentConfig {
                counts_per_setting: 0,
                ..Default::default()
            },
            ExperimentConfig {
                visibility: 1.5,
                ..Default::default()
            },
            ExperimentConfig {
                dephasing: -0.1,
                ..Default::default()
            },
            ExperimentConfig {
                bootstrap_resamples: 0,
                ..Default::default()
            },
            ExperimentConfig {
                thetas: vec![f64::NAN],
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(
                run_virtual_experiment(&cfg),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn sigeur_only_run_matches_full_run() {
        let cfg = ExperimentConfig {
            thetas: vec![10.0, 80.0],
            bootstrap_resamples: 10,
            ..ExperimentConfig::default()
        };
        let full = run_virtual_experiment(&cfg).unwrap();
        let only = simulate_sigeur(&cfg, SIGEUR_ORDER).unwrap();
        assert_eq!(full.sigeur, only);
    }
}
