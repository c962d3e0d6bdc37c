//! Numerical laboratory for quantum time of arrival.
//!
//! Two arrival-time constructions are computed side by side for a free
//! particle in one dimension: the Kijowski distribution from the momentum
//! representation ([`kijowski`]) and detection by a point detector of
//! sensitivity κ under damped evolution ([`propagate`], [`eeqt`]). The
//! [`liouville`] module integrates the dissipative Liouville equation for
//! density matrices and kernels, and [`geometry`] builds the affine
//! connections of Galilei-Newton space-time from sampled fields.
//!
//! Units are atomic: `m = ħ = 1`.

pub mod arrival;
pub mod eeqt;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod grid;
pub mod kijowski;
pub mod liouville;
pub mod packet;
pub mod propagate;
pub mod wavefunction;

pub use arrival::ArrivalDistribution;
pub use eeqt::{
    compare_with_kijowski, detection_distribution, kappa_sweep, ComparisonReport, Detection,
    EeqtSettings, KappaSweepResult,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{
    build_connection, check_closedness, verify_compatibility, Antisym4, ConnectionCoefficients, Grid4,
    SpacetimeModel,
};
pub use grid::Grid1D;
pub use kijowski::{kijowski_amplitudes, kijowski_density, kijowski_distribution};
pub use liouville::{
    eeqt_crosscheck, integrate, liouville_rhs, CrosscheckReport, DensityKernel, DensityMatrix,
    LindbladModel, Liouvillian,
};
pub use packet::{analytic_gaussian, GaussianPacket};
pub use propagate::{
    damped_evolve, split_step_evolve, DetectorSpec, EvolutionRecord, Regularization, SplitStep,
};
pub use wavefunction::{SpectralWaveFunction, WaveFunction};
