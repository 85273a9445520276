//! The reaction–diffusion flow ∂ₜu = Δu + λL(u) on a periodic grid.

pub mod envelope;
pub mod etd;
pub mod grid;
pub mod picard;
pub mod stability;

pub use envelope::{envelope_check, Check, EnvelopeParams, EnvelopeReport};
pub use etd::{
    etd_step, integrate_pde, phi1, phi2, self_convergence_estimate, EtdStepper, PdeConfig,
    PdeTermination, RunRecord, Snapshot, StepMonitor, StopNear,
};
pub use grid::{heat_semigroup, FourierMode, GridField, InitialDatum, Spectral};
pub use picard::{
    constants_for, local_constants, picard_local_solve, PicardResult, SolverConstants,
};
pub use stability::{stability_experiment, StabilityReport};
