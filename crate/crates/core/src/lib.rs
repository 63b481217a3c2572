//! Pseudo-spectral toolkit for the fourth-order nonlinear Schrödinger equation
//! `i u_t + disp^4 Δ²u = -mu |u|^(nu-1) u` on periodic boxes, together with its
//! exponent algebra, regime classifier and scaling studies.

pub mod error;
pub mod regimes;
pub mod dynamics;
pub mod experiments;
pub mod io;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
