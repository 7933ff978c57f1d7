//! Poisson bootstrap for count-based estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::counts::poisson;
use crate::error::{Error, Result};

/// Sample mean and standard deviation (`R - 1` denominator; 0 for `R = 1`).
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let r = samples.len();
    if r == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / r as f64;
    if r == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, var.sqrt())
}

fn check_inputs(counts: &[f64], resamples: usize) -> Result<()> {
    if resamples == 0 {
        return Err(Error::InvalidConfig(
            "bootstrap needs at least one resample".into(),
        ));
    }
    if let Some(bad) = counts.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(Error::OutOfRange(format!("count {bad}")));
    }
    Ok(())
}

/// Bootstrap of a vector-valued pipeline; returns `(mean, std)` per output.
///
/// Each resample replaces every count `n` by an independent `Poisson(n)` draw.
pub fn bootstrap_many_with<R, F>(
    rng: &mut R,
    counts: &[f64],
    pipeline: F,
    resamples: usize,
) -> Result<Vec<(f64, f64)>>
where
    R: Rng + ?Sized,
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check_inputs(counts, resamples)?;
    let mut outputs: Vec<Vec<f64>> = Vec::new();
    let mut buf = vec![0.0; counts.len()];
    for _ in 0..resamples {
        for (b, &n) in buf.iter_mut().zip(counts) {
            *b = poisson(rng, n);
        }
        let values = pipeline(&buf)?;
        if outputs.is_empty() {
            outputs = vec![Vec::with_capacity(resamples); values.len()];
        } else if values.len() != outputs.len() {
            return Err(Error::DimensionMismatch(values.len(), outputs.len()));
        }
        for (acc, v) in outputs.iter_mut().zip(values) {
            acc.push(v);
        }
    }
    Ok(outputs.iter().map(|s| mean_std(s)).collect())
}

/// Seeded [`bootstrap_many_with`].
pub fn bootstrap_many<F>(
    counts: &[f64],
    pipeline: F,
    resamples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bootstrap_many_with(&mut rng, counts, pipeline, resamples)
}

/// Bootstrap mean and standard deviation of a scalar pipeline.
pub fn bootstrap_errors<F>(
    counts: &[f64],
    pipeline: F,
    resamples: usize,
    seed: u64,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let out = bootstrap_many(counts, |c| Ok(vec![pipeline(c)?]), resamples, seed)?;
    Ok(out[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fraction(c: &[f64]) -> Result<f64> {
        Ok(c[0] / (c[0] + c[1]))
    }

    #[test]
    fn constant_pipeline_has_no_spread() {
        let (m, s) = bootstrap_errors(&[10.0, 20.0], |_| Ok(0.25), 50, 1).unwrap();
        assert_eq!((m, s), (0.25, 0.0));
    }

    #[test]
    fn probability_error_matches_propagation() {
        let (m, s) = bootstrap_errors(&[500.0, 500.0], fraction, 1000, 3).unwrap();
        // binomial error sqrt(p (1 - p) / (n0 + n1))
        let want = (0.5f64 * 0.5 / 1000.0).sqrt();
        assert!((m - 0.5).abs() < 0.003);
        assert!((s - want).abs() / want < 0.1, "std {s} vs {want}");
    }

    #[test]
    fn deterministic_per_seed() {
        let a = bootstrap_errors(&[30.0, 70.0], fraction, 100, 9).unwrap();
        let b = bootstrap_errors(&[30.0, 70.0], fraction, 100, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(bootstrap_errors(&[1.0, 1.0], fraction, 0, 1).is_err());
        assert!(bootstrap_errors(&[-1.0, 1.0], fraction, 10, 1).is_err());
    }

    #[test]
    fn single_resample_has_zero_spread() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
