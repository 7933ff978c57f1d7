//! Coherence steering criteria and the entropic (Tsallis-type) steering test.
//!
//! Alice measures one of the three Pauli observables and announces the
//! outcome; Bob evaluates the coherence of his conditional state in the
//! eigenbasis `i + ℓ (mod 3)`. Summing the probability-weighted coherences
//! over Alice's axes and outcomes gives `S_ℓ`. `ℓ = 0` is the one-setting
//! criterion, the mean of `ℓ = 1, 2` is the two-setting criterion and the mean
//! of all three is the three-setting inequality, which no two-qubit state
//! violates.

use serde::Serialize;

use crate::coherence::{CoherenceMeasure, PauliAxis};
use crate::error::{Error, Result};
use crate::matcore::{identity2, partial_trace, tensor, ComplexMatrix, Subsystem};
use crate::states::DensityMatrix;

/// Branches with probability below this are treated as never occurring.
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// A verdict needs the value to clear its bound by more than this.
pub const VERDICT_EPS: f64 = 1e-9;
/// REC verdicts this close to the two-decimal bound are flagged as marginal.
pub const REC_MARGIN: f64 = 0.005;
const PROBABILITY_SUM_TOL: f64 = 1e-10;

/// `M_a = (I + (-1)^a σ) / 2`.
pub fn pauli_projector(axis: PauliAxis, outcome: usize) -> Result<ComplexMatrix> {
    let sign = match outcome {
        0 => 1.0,
        1 => -1.0,
        _ => return Err(Error::OutOfRange(format!("outcome {outcome}"))),
    };
    Ok((identity2() + axis.pauli().scale_real(sign)).scale_real(0.5))
}

/// One outcome of Alice's measurement: its probability and Bob's state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Bob's conditional states for one of Alice's measurement axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalEnsemble {
    pub axis: PauliAxis,
    pub branches: [Branch; 2],
}

impl ConditionalEnsemble {
    /// Builds an ensemble from (probability, state) pairs for outcomes 0 and 1.
    pub fn new(axis: PauliAxis, parts: [(f64, DensityMatrix); 2]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL || parts.iter().any(|(p, _)| *p < 0.0) {
            return Err(Error::OutOfRange(format!(
                "branch probabilities must be non-negative and sum to 1 (sum {total})"
            )));
        }
        for (_, s) in &parts {
            if s.dim() != 2 {
                return Err(Error::DimensionMismatch(s.dim(), 2));
            }
        }
        let [(p0, s0), (p1, s1)] = parts;
        Ok(Self {
            axis,
            branches: [
                Branch {
                    outcome: 0,
                    probability: p0,
                    state: s0,
                },
                Branch {
                    outcome: 1,
                    probability: p1,
                    state: s1,
                },
            ],
        })
    }

    /// `Σ_a p_a ρ_{B|a}`.
    pub fn average_state(&self) -> ComplexMatrix {
        self.branches
            .iter()
            .map(|b| b.state.matrix().scale_real(b.probability))
            .reduce(|a, b| a + b)
            .expect("two branches")
    }

    /// `Σ_a p_a C(ρ_{B|a})` in the given basis; empty branches contribute 0.
    pub fn weighted_coherence(&self, measure: CoherenceMeasure, basis: PauliAxis) -> Result<f64> {
        let mut acc = 0.0;
        for b in &self.branches {
            if b.probability < ZERO_PROBABILITY {
                continue;
            }
            acc += b.probability * measure.of(&b.state, basis)?;
        }
        Ok(acc)
    }
}

/// `p = Tr[(M_a ⊗ I) ρ]`, `ρ_{B|a} = Tr_A[(M_a ⊗ I) ρ (M_a ⊗ I)] / p`.
pub fn conditional_ensemble(rho: &DensityMatrix, axis: PauliAxis) -> Result<ConditionalEnsemble> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    let mut parts = Vec::with_capacity(2);
    for a in 0..2 {
        let m = tensor(&pauli_projector(axis, a)?, &identity2())?;
        let p = rho.expectation(&m).max(0.0);
        let state = if p < ZERO_PROBABILITY {
            DensityMatrix::maximally_mixed(2)?
        } else {
            let post = m * *rho.matrix() * m;
            let bob = partial_trace(&post, Subsystem::B)?.scale_real(1.0 / p);
            DensityMatrix::new_unchecked(bob.hermitian_part())
        };
        parts.push((p, state));
    }
    let p_tot = parts[0].0 + parts[1].0;
    let parts = [
        (parts[0].0 / p_tot, parts[0].1),
        (parts[1].0 / p_tot, parts[1].1),
    ];
    ConditionalEnsemble::new(axis, parts)
}

/// Conditional ensembles for all three of Alice's axes, indexed x, y, z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assemblage {
    ensembles: [ConditionalEnsemble; 3],
}

impl Assemblage {
    pub fn new(ensembles: [ConditionalEnsemble; 3]) -> Result<Self> {
        for (i, e) in ensembles.iter().enumerate() {
            if e.axis != PauliAxis::from_index(i) {
                return Err(Error::OutOfRange(format!(
                    "ensemble {i} is for axis {}, expected {}",
                    e.axis,
                    PauliAxis::from_index(i)
                )));
            }
        }
        Ok(Self { ensembles })
    }

    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            ensembles: [
                conditional_ensemble(rho, PauliAxis::X)?,
                conditional_ensemble(rho, PauliAxis::Y)?,
                conditional_ensemble(rho, PauliAxis::Z)?,
            ],
        })
    }

    pub fn ensembles(&self) -> &[ConditionalEnsemble; 3] {
        &self.ensembles
    }

    /// `S_ℓ = Σ_{i,a} p(a|i) C_{i+ℓ}(ρ_{B|a,i})`.
    pub fn s_ell(&self, ell: usize, measure: CoherenceMeasure) -> Result<f64> {
        if ell > 2 {
            return Err(Error::OutOfRange(format!("setting shift {ell}")));
        }
        self.ensembles
            .iter()
            .map(|e| e.weighted_coherence(measure, e.axis.shifted(ell)))
            .sum()
    }

    pub fn criteria(&self, measure: CoherenceMeasure) -> Result<CriterionValues> {
        let s0 = self.s_ell(0, measure)?;
        let s1 = self.s_ell(1, measure)?;
        let s2 = self.s_ell(2, measure)?;
        Ok(CriterionValues {
            s0,
            s12_half: (s1 + s2) / 2.0,
            s012_third: (s0 + s1 + s2) / 3.0,
        })
    }
}

/// One-, two- and three-setting values for a single coherence measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionValues {
    pub s0: f64,
    pub s12_half: f64,
    pub s012_third: f64,
}

pub fn s_ell(rho: &DensityMatrix, ell: usize, measure: CoherenceMeasure) -> Result<f64> {
    Assemblage::from_state(rho)?.s_ell(ell, measure)
}

/// One-setting value `S_0`.
pub fn one_setting_value(rho: &DensityMatrix, measure: CoherenceMeasure) -> Result<f64> {
    s_ell(rho, 0, measure)
}

/// Two-setting value `(S_1 + S_2) / 2`.
pub fn two_setting_value(rho: &DensityMatrix, measure: CoherenceMeasure) -> Result<f64> {
    Ok(Assemblage::from_state(rho)?.criteria(measure)?.s12_half)
}

/// Three-setting value `(S_0 + S_1 + S_2) / 3`.
pub fn three_setting_value(rho: &DensityMatrix, measure: CoherenceMeasure) -> Result<f64> {
    Ok(Assemblage::from_state(rho)?.criteria(measure)?.s012_third)
}

pub fn epsilon_bound(measure: CoherenceMeasure) -> f64 {
    measure.bound()
}

/// Tsallis q-logarithm `(x^(1-n) - 1) / (1 - n)`; natural log at `n = 1`.
pub fn ln_n(x: f64, n: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::OutOfRange(format!("ln_n argument {x}")));
    }
    if !(n > 0.0 && n <= 2.0) {
        return Err(Error::OutOfRange(format!("entropic order {n}")));
    }
    if (n - 1.0).abs() < 1e-12 {
        return Ok(x.ln());
    }
    Ok((x.powf(1.0 - n) - 1.0) / (1.0 - n))
}

/// `m ln_n[m d / (d + m - 1)]` for `m` mutually unbiased bases in dimension `d`.
pub fn sigeur_bound(n: f64, m: u32, d: u32) -> Result<f64> {
    if m == 0 || d == 0 {
        return Err(Error::OutOfRange(format!("m = {m}, d = {d}")));
    }
    let (m, d) = (m as f64, d as f64);
    Ok(m * ln_n(m * d / (d + m - 1.0), n)?)
}

/// Joint outcome probabilities `p_ab` for `σ_i ⊗ σ_i`, indexed `[i][2a + b]`.
pub type JointProbabilities = [[f64; 4]; 3];

pub fn sigeur_joint_probabilities(rho: &DensityMatrix) -> Result<JointProbabilities> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    let mut out = [[0.0; 4]; 3];
    for axis in PauliAxis::ALL {
        for a in 0..2 {
            for b in 0..2 {
                let m = tensor(&pauli_projector(axis, a)?, &pauli_projector(axis, b)?)?;
                out[axis.index()][2 * a + b] = rho.expectation(&m).max(0.0);
            }
        }
    }
    Ok(out)
}

/// Left-hand side of the entropic steering inequality from joint
/// probabilities; `0^n / 0^(n-1)` is taken as 0. Each axis is normalised by
/// its own total so count-based estimates can be passed directly.
pub fn sigeur_from_joint(joint: &JointProbabilities, n: f64) -> Result<f64> {
    if !(n > 0.0 && n <= 2.0) {
        return Err(Error::OutOfRange(format!("entropic order {n}")));
    }
    let shannon = (n - 1.0).abs() < 1e-12;
    let mut acc = 0.0;
    for probs in joint {
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InsufficientData(
                "no joint outcomes for an axis".into(),
            ));
        }
        let p = probs.map(|x| x / total);
        let mut term = 0.0;
        for a in 0..2 {
            let pa = p[2 * a] + p[2 * a + 1];
            for b in 0..2 {
                let pab = p[2 * a + b];
                if pab <= 0.0 || pa <= 0.0 {
                    continue;
                }
                term += if shannon {
                    -pab * (pab / pa).ln()
                } else {
                    pab.powf(n) / pa.powf(n - 1.0)
                };
            }
        }
        acc += if shannon {
            term
        } else {
            (1.0 - term) / (n - 1.0)
        };
    }
    Ok(acc)
}

pub fn sigeur_lhs(rho: &DensityMatrix, n: f64) -> Result<f64> {
    sigeur_from_joint(&sigeur_joint_probabilities(rho)?, n)
}

/// Coherence criteria for one measure together with their verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure: CoherenceMeasure,
    #[serde(flatten)]
    pub values: CriterionValues,
    pub bound: f64,
    pub violates_two_setting: bool,
    pub violates_one_setting: bool,
    /// Set for REC when a value sits within `REC_MARGIN` of the rounded bound.
    pub marginal: bool,
}

impl MeasureReport {
    pub fn from_values(measure: CoherenceMeasure, values: CriterionValues) -> Self {
        let bound = measure.bound();
        let marginal = measure == CoherenceMeasure::Rec
            && [values.s0, values.s12_half]
                .iter()
                .any(|v| (v - bound).abs() <= REC_MARGIN);
        Self {
            measure,
            values,
            bound,
            violates_two_setting: exceeds(values.s12_half, bound),
            violates_one_setting: exceeds(values.s0, bound),
            marginal,
        }
    }
}

/// Strict violation of an upper bound, ignoring round-off at saturation.
pub fn exceeds(value: f64, bound: f64) -> bool {
    value > bound + VERDICT_EPS
}

/// Strict violation of a lower bound, ignoring round-off at saturation.
pub fn falls_below(value: f64, bound: f64) -> bool {
    value < bound - VERDICT_EPS
}

/// Every criterion of a two-qubit state, for all three coherence measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringReport {
    pub measures: Vec<MeasureReport>,
    pub sigeur_lhs: f64,
    pub sigeur_bound: f64,
    pub sigeur_violated: bool,
}

impl SteeringReport {
    pub fn measure(&self, q: CoherenceMeasure) -> &MeasureReport {
        self.measures
            .iter()
            .find(|m| m.measure == q)
            .expect("report covers every measure")
    }
}

/// Entropic order used for the steering test (the strongest case for qubits).
pub const SIGEUR_ORDER: f64 = 2.0;

pub fn steering_report(rho: &DensityMatrix) -> Result<SteeringReport> {
    let assemblage = Assemblage::from_state(rho)?;
    let measures = CoherenceMeasure::ALL
        .iter()
        .map(|&q| Ok(MeasureReport::from_values(q, assemblage.criteria(q)?)))
        .collect::<Result<Vec<_>>>()?;
    let lhs = sigeur_lhs(rho, SIGEUR_ORDER)?;
    let bound = sigeur_bound(SIGEUR_ORDER, 3, 2)?;
    Ok(SteeringReport {
        measures,
        sigeur_lhs: lhs,
        sigeur_bound: bound,
        sigeur_violated: falls_below(lhs, bound),
    })
}
