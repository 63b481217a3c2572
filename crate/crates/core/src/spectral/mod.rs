//! Periodic grids, transforms, Fourier multipliers and Sobolev-type norms.

pub(crate) mod fft;
mod field;
mod grid;
mod norms;

pub use field::{Field, Space};
pub use grid::{make_grid, Grid, GridSpec};
pub use norms::{
    apply_multiplier, check_aliasing, lq_norm, rescaled_sobolev_norm,
    rescaled_sobolev_norm_continuum, shell_spectrum, sobolev_norm, sobolev_norm_of_spectrum, spectral_tail_fraction,
    weighted_norm, ContinuumSpectrum, SobolevSpec, WeightedSpec, ALIASING_TOLERANCE,
    ZERO_MODE_TOLERANCE,
};
