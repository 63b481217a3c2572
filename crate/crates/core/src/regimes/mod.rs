//! Exponent algebra and theorem-level classification of `(d, nu, gamma, mu)`.

mod classify;
mod exponents;
mod real;

pub use classify::{classify, RegimeVerdict, TheoremTag, Verdict};
pub use exponents::{
    conjugate, critical_exponent, gamma_pq, illposedness_smoothness, is_admissible,
    smoothness_condition, strichartz_scaling_check, working_exponents, ExponentReport,
    RegimeQuery, SmallData,
};
pub use real::{Rational, Real, FLOAT_TOLERANCE};
