//! Test states: the Bell-like family, Bloch decomposition, fidelity, noise
//! channels and a seeded random-state sampler.
//!
//! Conventions: `|H> = (1, 0)`, `|V> = (0, 1)`, and two-qubit operators are
//! ordered Alice ⊗ Bob. Angles are radians throughout the library.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eig, matrix_sqrt, partial_trace, pauli_x, pauli_y, pauli_z, psd_eig, tensor,
    von_neumann_entropy, ComplexMatrix, Subsystem, C64, HERMITIAN_TOL, PSD_TOL, ZERO,
};

pub const TRACE_TOL: f64 = 1e-10;

/// A Hermitian, positive semi-definite, unit-trace matrix of dimension 2 or 4.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let defect = mat.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let eig = hermitian_eig(&mat)?;
        if eig.values[0] < -PSD_TOL {
            return Err(Error::NotPositive(eig.values[0]));
        }
        Ok(Self(mat.hermitian_part()))
    }

    /// Skips validation. Callers must guarantee the invariants by construction.
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    /// Pure state `|ket><ket| / <ket|ket>`.
    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::OutOfRange("zero ket".into()));
        }
        Ok(Self(ComplexMatrix::outer(ket)?.scale_real(1.0 / norm)))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(Self(
            ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64),
        ))
    }

    /// Qubit state `(I + r·σ)/2` for a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1.0 + PSD_TOL {
            return Err(Error::NotPositive((1.0 - len) / 2.0));
        }
        let m = ComplexMatrix::identity(2)?
            + pauli_x().scale_real(r[0])
            + pauli_y().scale_real(r[1])
            + pauli_z().scale_real(r[2]);
        Ok(Self(m.scale_real(0.5)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `Tr(ρ O)` for a Hermitian observable (real part).
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.0.trace_product(op).re
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.0).expect("density matrix is PSD by construction")
    }

    /// Reduced state of one qubit of a two-qubit state.
    pub fn reduced(&self, keep: Subsystem) -> Result<Self> {
        Ok(Self(partial_trace(&self.0, keep)?))
    }

    /// Qubit Bloch vector `(<σx>, <σy>, <σz>)`.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        Ok([
            self.expectation(&pauli_x()),
            self.expectation(&pauli_y()),
            self.expectation(&pauli_z()),
        ])
    }
}

/// `cosθ|HH> + sinθ|VV>` as a projector.
pub fn bell_like(theta: f64) -> DensityMatrix {
    let (s, c) = theta.sin_cos();
    let ket = [C64::new(c, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
    DensityMatrix::from_ket(&ket).expect("unit ket")
}

/// Local Bloch vectors and correlation tensor of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDecomposition {
    /// Alice's local vector `tr(ρ σ ⊗ I)`.
    pub r: [f64; 3],
    /// Bob's local vector `tr(ρ I ⊗ σ)`.
    pub s: [f64; 3],
    /// Correlations `t_ij = tr(ρ σ_i ⊗ σ_j)`.
    pub t: [[f64; 3]; 3],
}

fn paulis() -> [ComplexMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

impl BlochDecomposition {
    /// `(I⊗I + r·σ⊗I + I⊗s·σ + Σ t_ij σ_i⊗σ_j) / 4`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let id = ComplexMatrix::identity(2).expect("dim 2");
        let p = paulis();
        let mut m = ComplexMatrix::identity(4).expect("dim 4");
        for i in 0..3 {
            m = m + tensor(&p[i], &id).expect("dim 4").scale_real(self.r[i]);
            m = m + tensor(&id, &p[i]).expect("dim 4").scale_real(self.s[i]);
            for j in 0..3 {
                m = m + tensor(&p[i], &p[j])
                    .expect("dim 4")
                    .scale_real(self.t[i][j]);
            }
        }
        m.scale_real(0.25)
    }
}

pub fn bloch_decompose(rho: &DensityMatrix) -> Result<BlochDecomposition> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    let id = ComplexMatrix::identity(2)?;
    let p = paulis();
    let mut out = BlochDecomposition {
        r: [0.0; 3],
        s: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        out.r[i] = rho.expectation(&tensor(&p[i], &id)?);
        out.s[i] = rho.expectation(&tensor(&id, &p[i])?);
        for j in 0..3 {
            out.t[i][j] = rho.expectation(&tensor(&p[i], &p[j])?);
        }
    }
    Ok(out)
}

/// Uhlmann fidelity `Tr sqrt(sqrt(ρ) ρ0 sqrt(ρ))`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, rho0: &DensityMatrix) -> Result<f64> {
    if rho.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), rho0.dim()));
    }
    let root = matrix_sqrt(rho.matrix())?;
    let inner = (root * *rho0.matrix() * root).hermitian_part();
    let eig = psd_eig(&inner)?;
    let f: f64 = eig.values.iter().map(|l| l.sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_product(rho.matrix()).re
}

/// `v ρ + (1 - v) I / dim`.
pub fn apply_white_noise(rho: &DensityMatrix, visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::OutOfRange(format!("visibility {visibility}")));
    }
    let dim = rho.dim();
    let mixed = ComplexMatrix::identity(dim)?.scale_real((1.0 - visibility) / dim as f64);
    Ok(DensityMatrix(rho.matrix().scale_real(visibility) + mixed))
}

/// Bob-side z dephasing `(1 - p) ρ + p (I⊗σz) ρ (I⊗σz)`; for a single qubit
/// the qubit itself is dephased.
pub fn apply_bob_dephasing(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("dephasing {p}")));
    }
    let z = match rho.dim() {
        2 => pauli_z(),
        _ => tensor(&ComplexMatrix::identity(2)?, &pauli_z())?,
    };
    let flipped = z * *rho.matrix() * z;
    Ok(DensityMatrix(
        rho.matrix().scale_real(1.0 - p) + flipped.scale_real(p),
    ))
}

/// Seeded sample from the induced ensemble `G G^dagger / Tr(G G^dagger)`, with
/// `G` a 4×rank matrix of independent standard complex Gaussians.
pub fn random_two_qubit_state(seed: u64, rank: usize) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state(&mut rng, 4, rank)
}

/// Same ensemble as [`random_two_qubit_state`] for any supported dimension,
/// drawing from a caller-supplied generator.
pub fn random_state<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::OutOfRange(format!("rank {rank} for dim {dim}")));
    }
    let mut g = vec![ZERO; dim * rank];
    for z in g.iter_mut() {
        *z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let mut m = ComplexMatrix::zeros(dim)?;
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = (0..rank)
                .map(|k| g[i * rank + k] * g[j * rank + k].conj())
                .sum();
        }
    }
    let tr = m.trace().re;
    Ok(DensityMatrix(m.scale_real(1.0 / tr).hermitian_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{ComplexMatrix, ONE};

    const TOL: f64 = 1e-12;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn bell_like_examples() {
        let hh = ComplexMatrix::outer(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        assert!(bell_like(0.0).matrix().max_abs_diff(&hh) < TOL);

        let phi = bell_like(deg(45.0));
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((phi.matrix()[(i, j)].re - 0.5).abs() < TOL);
        }

        let b = bell_like(deg(30.0));
        assert!((b.matrix()[(0, 0)].re - 0.75).abs() < TOL);
        assert!((b.matrix()[(3, 3)].re - 0.25).abs() < TOL);
        assert!((b.matrix()[(0, 3)].re - 3f64.sqrt() / 4.0).abs() < TOL);
        assert!((b.purity() - 1.0).abs() < TOL);
    }

    #[test]
    fn bloch_examples() {
        let d = bloch_decompose(&bell_like(deg(45.0))).unwrap();
        assert!(d.r.iter().chain(d.s.iter()).all(|x| x.abs() < TOL));
        let diag = [1.0, -1.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { diag[i] } else { 0.0 };
                assert!((d.t[i][j] - expect).abs() < TOL);
            }
        }

        let d = bloch_decompose(&bell_like(0.0)).unwrap();
        assert_eq!(d.r.map(|x| x.round()), [0.0, 0.0, 1.0]);
        assert_eq!(d.s.map(|x| x.round()), [0.0, 0.0, 1.0]);
        assert!((d.t[2][2] - 1.0).abs() < TOL && d.t[0][0].abs() < TOL);

        let d = bloch_decompose(&DensityMatrix::maximally_mixed(4).unwrap()).unwrap();
        assert!(d.t.iter().flatten().all(|x| x.abs() < TOL));
        assert!(d.r.iter().chain(d.s.iter()).all(|x| x.abs() < TOL));
    }

    #[test]
    fn fidelity_examples() {
        let rho = random_two_qubit_state(3, 3).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-8);

        let h = DensityMatrix::from_ket(&[ONE, ZERO]).unwrap();
        let v = DensityMatrix::from_ket(&[ZERO, ONE]).unwrap();
        assert!(fidelity(&h, &v).unwrap() < 1e-8);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let f = fidelity(&mixed, &h).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((fidelity(&h, &mixed).unwrap() - f).abs() < 1e-8);

        assert!(fidelity(&h, &rho).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((bell_like(0.3).purity() - 1.0).abs() < TOL);
        assert!((DensityMatrix::maximally_mixed(4).unwrap().purity() - 0.25).abs() < TOL);
        let w = apply_white_noise(&bell_like(deg(45.0)), 0.9).unwrap();
        // v^2 * 3/4 + 1/4
        assert!((w.purity() - 0.8575).abs() < TOL);
    }

    #[test]
    fn white_noise_examples() {
        let phi = bell_like(deg(45.0));
        assert!(
            apply_white_noise(&phi, 1.0)
                .unwrap()
                .matrix()
                .max_abs_diff(phi.matrix())
                < TOL
        );
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(
            apply_white_noise(&phi, 0.0)
                .unwrap()
                .matrix()
                .max_abs_diff(mixed.matrix())
                < TOL
        );

        // pure target: F = sqrt(<phi|rho|phi>) = sqrt(v + (1 - v)/4)
        let w = apply_white_noise(&phi, 0.99).unwrap();
        let f = fidelity(&w, &phi).unwrap();
        assert!((f - (0.99f64 + 0.01 / 4.0).sqrt()).abs() < 1e-10);
        assert!((f - 0.99623).abs() < 5e-5);

        assert!(apply_white_noise(&phi, 1.5).is_err());
        assert!((w.matrix().trace().re - 1.0).abs() < TOL);
    }

    #[test]
    fn dephasing_kills_bob_coherence_only() {
        let phi = bell_like(deg(45.0));
        let d = apply_bob_dephasing(&phi, 0.5).unwrap();
        assert!(d.matrix()[(0, 3)].norm() < TOL);
        assert!((d.matrix()[(0, 0)].re - 0.5).abs() < TOL);
        let q = DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap();
        let qd = apply_bob_dephasing(&q, 0.25).unwrap();
        assert!((qd.bloch_vector().unwrap()[0] - 0.5).abs() < TOL);
    }

    #[test]
    fn random_state_examples() {
        let pure = random_two_qubit_state(11, 1).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);

        let a = random_two_qubit_state(42, 4).unwrap();
        let b = random_two_qubit_state(42, 4).unwrap();
        assert_eq!(a, b);
        assert!(DensityMatrix::new(*a.matrix()).is_ok());

        assert!(random_two_qubit_state(1, 0).is_err());
        assert!(random_two_qubit_state(1, 5).is_err());
    }

    #[test]
    fn rank_four_mean_purity_matches_induced_measure() {
        // E[Tr ρ²] = (d + k) / (dk + 1) = 8/17 for d = k = 4; an independent
        // numpy Monte Carlo over 1e4 samples gave 0.4708.
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| random_two_qubit_state(s, 4).unwrap().purity())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 8.0 / 17.0).abs() < 0.02, "mean purity {mean}");
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = ComplexMatrix::identity(2).unwrap();
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(Error::InvalidTrace(_))
        ));
        let neg = ComplexMatrix::from_real_diagonal(&[1.1, -0.1]).unwrap();
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(Error::NotPositive(_))
        ));
        assert!(DensityMatrix::from_bloch([1.0, 1.0, 0.0]).is_err());
    }
}
