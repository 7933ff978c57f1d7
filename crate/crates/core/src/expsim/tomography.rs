//! Linear-inversion state tomography with projection onto physical states.

use crate::coherence::PauliAxis;
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, HERMITIAN_TOL};
use crate::states::{BlochDecomposition, DensityMatrix};

/// Counts for outcomes `[0, 1]` in each Pauli basis, indexed x, y, z.
pub type QubitCounts = [[f64; 2]; 3];

/// Coincidence counts for every pair of local Pauli projectors, indexed
/// `[alice_axis][bob_axis][2a + b]`.
pub type JointCounts = [[[f64; 4]; 3]; 3];

/// Nearest unit-trace PSD matrix in Frobenius norm.
///
/// Eigenvalues are first shifted uniformly to unit trace, then the most
/// negative ones are zeroed one at a time with their weight spread evenly
/// over the rest until every remaining eigenvalue is non-negative.
pub fn project_to_physical(h: &ComplexMatrix) -> Result<DensityMatrix> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let eig = hermitian_eig(h)?;
    let dim = eig.values.len();
    let shift = (1.0 - eig.values.iter().sum::<f64>()) / dim as f64;
    // descending order
    let mu: Vec<f64> = eig.values.iter().rev().map(|l| l + shift).collect();

    let mut lambda = vec![0.0; dim];
    let mut carried = 0.0;
    let mut kept = dim;
    while kept > 0 && mu[kept - 1] + carried / kept as f64 <= 0.0 {
        carried += mu[kept - 1];
        kept -= 1;
    }
    if kept == 0 {
        return Err(Error::NotPositive(mu[0]));
    }
    for j in 0..kept {
        lambda[j] = mu[j] + carried / kept as f64;
    }
    // back to the solver's ascending order
    lambda.reverse();
    let mut values = eig.clone();
    values.values = lambda;
    Ok(DensityMatrix::new_unchecked(
        values.reconstruct().hermitian_part(),
    ))
}

/// `(n0 - n1) / (n0 + n1)` for one basis.
fn contrast(n: [f64; 2], what: &str) -> Result<f64> {
    let total = n[0] + n[1];
    if !(total > 0.0) {
        return Err(Error::InsufficientData(format!(
            "no counts in the {what} basis"
        )));
    }
    Ok((n[0] - n[1]) / total)
}

/// Qubit state from counts in the three Pauli bases.
pub fn tomo_1q(counts: &QubitCounts) -> Result<DensityMatrix> {
    let mut r = [0.0; 3];
    for axis in PauliAxis::ALL {
        r[axis.index()] = contrast(counts[axis.index()], axis.label())?;
    }
    qubit_from_bloch_estimate(r)
}

/// `(I + r·σ)/2` followed by projection; `r` may lie outside the Bloch ball.
pub(crate) fn qubit_from_bloch_estimate(r: [f64; 3]) -> Result<DensityMatrix> {
    let m = ComplexMatrix::identity(2)?
        + PauliAxis::X.pauli().scale_real(r[0])
        + PauliAxis::Y.pauli().scale_real(r[1])
        + PauliAxis::Z.pauli().scale_real(r[2]);
    project_to_physical(&m.scale_real(0.5))
}

/// Two-qubit state from the 36 joint projector counts.
///
/// Correlations come from the matching setting pair; each local Bloch
/// component pools the counts of all three settings of the other photon.
pub fn tomo_2q(counts: &JointCounts) -> Result<DensityMatrix> {
    let mut est = BlochDecomposition {
        r: [0.0; 3],
        s: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        for j in 0..3 {
            let n = counts[i][j];
            let total: f64 = n.iter().sum();
            if !(total > 0.0) {
                return Err(Error::InsufficientData(format!(
                    "no counts for setting {}{}",
                    PauliAxis::from_index(i),
                    PauliAxis::from_index(j)
                )));
            }
            est.t[i][j] = (n[0] - n[1] - n[2] + n[3]) / total;
        }
    }
    for k in 0..3 {
        let (mut alice, mut bob, mut alice_tot, mut bob_tot) = (0.0, 0.0, 0.0, 0.0);
        for other in 0..3 {
            let a = counts[k][other];
            alice += a[0] + a[1] - a[2] - a[3];
            alice_tot += a.iter().sum::<f64>();
            let b = counts[other][k];
            bob += b[0] - b[1] + b[2] - b[3];
            bob_tot += b.iter().sum::<f64>();
        }
        est.r[k] = alice / alice_tot;
        est.s[k] = bob / bob_tot;
    }
    project_to_physical(&est.reconstruct())
}

/// Joint projector `M_a^i ⊗ M_b^j` built from single-photon projectors.
#[cfg(test)]
fn joint_projector(
    projectors: &[[ComplexMatrix; 2]; 3],
    i: usize,
    j: usize,
    a: usize,
    b: usize,
) -> ComplexMatrix {
    crate::matcore::tensor(&projectors[i][a], &projectors[j][b]).expect("2x2 ⊗ 2x2")
}
