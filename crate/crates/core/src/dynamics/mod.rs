//! Time evolution: exact linear group, exact zero-dispersion flow, Strang
//! splitting, conserved quantities and mild-solution diagnostics.

mod diagnostics;
mod evolve;
mod flow;

pub use diagnostics::{
    conserved, duhamel_residual, scattering_probe, ConservedPair, ScatteringPoint,
    MIN_DUHAMEL_SAMPLES,
};
pub use evolve::{
    evolve, evolve_with, BlowupFlag, Monitor, Snapshot, StepControl, Trajectory,
    DEFAULT_BLOWUP_FACTOR,
};
pub use flow::{linear_propagate, phase_flow, strang_step, EquationParams, PHASE_SIGN};
