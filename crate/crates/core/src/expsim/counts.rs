//! Poisson coincidence counting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::states::DensityMatrix;

/// A labelled measurement setting: one projector per detected outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    pub label: String,
    pub projectors: Vec<ComplexMatrix>,
}

/// Counts recorded for one setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRecord {
    pub label: String,
    pub counts: Vec<u64>,
    /// Expected number of counts per outcome with unit Born probability.
    pub mean_flux: f64,
}

/// One draw from `Poisson(mean)`; a non-positive mean always gives zero.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    if !(mean > 0.0) {
        return 0.0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng)
}

fn born(rho: &DensityMatrix, p: &ComplexMatrix) -> Result<f64> {
    if p.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(p.dim(), rho.dim()));
    }
    Ok(rho.expectation(p).max(0.0))
}

/// Expected counts `N Tr(P ρ)` for every projector of every setting.
pub fn expected_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    mean_flux: f64,
) -> Result<Vec<Vec<f64>>> {
    settings
        .iter()
        .map(|s| {
            s.projectors
                .iter()
                .map(|p| Ok(mean_flux * born(rho, p)?))
                .collect()
        })
        .collect()
}

/// Independent Poisson counts for every projector, drawn from `rng`.
pub fn simulate_counts_with<R: Rng + ?Sized>(
    rng: &mut R,
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    mean_flux: f64,
) -> Result<Vec<CountRecord>> {
    if !(mean_flux > 0.0) {
        return Err(Error::OutOfRange(format!("mean flux {mean_flux}")));
    }
    let means = expected_counts(rho, settings, mean_flux)?;
    Ok(settings
        .iter()
        .zip(means)
        .map(|(s, m)| CountRecord {
            label: s.label.clone(),
            counts: m.into_iter().map(|mu| poisson(rng, mu) as u64).collect(),
            mean_flux,
        })
        .collect())
}

/// Seeded variant of [`simulate_counts_with`].
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    mean_flux: f64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_counts_with(&mut rng, rho, settings, mean_flux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::PauliAxis;
    use crate::matcore::tensor;
    use crate::states::bell_like;
    use crate::steering::pauli_projector;

    fn single(axis: PauliAxis) -> MeasurementSetting {
        MeasurementSetting {
            label: axis.to_string(),
            projectors: vec![
                pauli_projector(axis, 0).unwrap(),
                pauli_projector(axis, 1).unwrap(),
            ],
        }
    }

    #[test]
    fn zero_probability_gives_zero_counts() {
        let h = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        for seed in 0..50 {
            let rec = simulate_counts(&h, &[single(PauliAxis::Z)], 1000.0, seed).unwrap();
            assert_eq!(rec[0].counts[1], 0);
        }
    }

    #[test]
    fn poisson_moments() {
        let h = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let settings = [single(PauliAxis::Z)];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 10_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                simulate_counts_with(&mut rng, &h, &settings, 1000.0).unwrap()[0].counts[0] as f64
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1000.0).abs() < 50.0, "mean {mean}");
        assert!((var - 1000.0).abs() < 50.0, "variance {var}");
    }

    #[test]
    fn bell_state_zz_counts_follow_born_rule() {
        let phi = bell_like(45f64.to_radians());
        let mut projectors = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                projectors.push(
                    tensor(
                        &pauli_projector(PauliAxis::Z, a).unwrap(),
                        &pauli_projector(PauliAxis::Z, b).unwrap(),
                    )
                    .unwrap(),
                );
            }
        }
        let setting = MeasurementSetting {
            label: "zz".into(),
            projectors,
        };
        let rec = simulate_counts(&phi, &[setting], 1000.0, 5).unwrap();
        let c = &rec[0].counts;
        assert!((c[0] as f64 - 500.0).abs() < 100.0);
        assert!((c[3] as f64 - 500.0).abs() < 100.0);
        assert_eq!((c[1], c[2]), (0, 0));
    }

    #[test]
    fn seeded_runs_repeat() {
        let rho = bell_like(0.4);
        let s = [single(PauliAxis::X)];
        let h = DensityMatrix::from_bloch([0.3, 0.1, 0.2]).unwrap();
        assert!(simulate_counts(&rho, &s, 10.0, 1).is_err());
        assert_eq!(
            simulate_counts(&h, &s, 500.0, 8).unwrap(),
            simulate_counts(&h, &s, 500.0, 8).unwrap()
        );
        assert!(simulate_counts(&h, &s, 0.0, 8).is_err());
    }
}
