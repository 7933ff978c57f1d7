//! Virtual photonic experiment.
//!
//! The pieces mirror the optical bench: wave-plate analysers ([`optics`]),
//! Poisson coincidence counting ([`counts`]), state reconstruction
//! ([`tomography`]), bootstrap error bars ([`bootstrap`]) and the θ sweep that
//! ties them together ([`experiment`]).

pub mod bootstrap;
pub mod counts;
pub mod experiment;
pub mod optics;
pub mod tomography;

pub use bootstrap::{bootstrap_errors, bootstrap_many};
pub use counts::{simulate_counts, CountRecord, MeasurementSetting};
pub use experiment::{
    run_virtual_experiment, run_with_convention, simulate_sigeur, ExperimentConfig,
};
pub use optics::{
    select_convention, verify_pmo_table, verify_tomography_table, waveplate_jones, JonesConvention,
    WavePlateKind, WavePlateSetting,
};
pub use tomography::{project_to_physical, tomo_1q, tomo_2q};
