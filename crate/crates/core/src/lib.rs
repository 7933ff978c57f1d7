//! Coherence-based quantum steering criteria for two-qubit states.
//!
//! The crate computes one-, two- and three-setting coherence steering
//! criteria (l1 norm, relative entropy and skew-information coherence), the
//! entropic steering inequality, and simulates a photonic experiment that
//! estimates them from Poisson-distributed coincidence counts.
//!
//! Modules, bottom-up:
//!
//! - [`matcore`]: 2×2 / 4×4 complex matrices and Hermitian spectral tools.
//! - [`states`]: Bell-like states, Bloch form, fidelity, noise, sampling.
//! - [`coherence`]: coherence of a qubit in a Pauli eigenbasis.
//! - [`steering`]: the criteria, their bounds and the entropic test.
//! - [`expsim`]: wave plates, counts, tomography, bootstrap, full sweeps.
//! - [`dataset`]: sweep rows shared by the simulation and the front end.

// Index loops mirror the tensor notation; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod coherence;
pub mod dataset;
pub mod error;
pub mod expsim;
pub mod matcore;
pub mod states;
pub mod steering;

pub use coherence::{CoherenceMeasure, PauliAxis};
pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, C64};
pub use states::DensityMatrix;
