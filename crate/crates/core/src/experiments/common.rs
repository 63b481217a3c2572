use std::sync::Arc;

use crate::dynamics::{evolve, EquationParams, StepControl};
use crate::error::{Error, Result};
use crate::spectral::{check_aliasing, Field, Grid, ALIASING_TOLERANCE};

pub(crate) fn grid(dim: usize, extent: f64, points: usize) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::new(dim, extent, points)?))
}

/// States of the solved equation at increasing `times`, integrating segment by segment.
pub(crate) fn states_at(
    f0: &Field,
    p: &EquationParams,
    dt: f64,
    times: &[f64],
    guard: bool,
) -> Result<Vec<Field>> {
    let mut out = Vec::with_capacity(times.len());
    let mut state = f0.clone().into_physical();
    let mut t = 0.0;
    for &target in times {
        if !(target >= t) {
            return Err(Error::Config(format!("times must be increasing, got {times:?}")));
        }
        if target > t {
            let mut ctrl = StepControl::new(dt, target - t);
            ctrl.record_every = usize::MAX;
            ctrl.guard = guard;
            state = evolve(&state, &ctrl, p)?.last().field.clone();
            t = target;
        }
        out.push(state.clone());
    }
    Ok(out)
}

/// Rejects fields whose spectrum reaches into the top third of the band.
pub(crate) fn require_resolved(f: &Field, what: &str) -> Result<()> {
    check_aliasing(f, ALIASING_TOLERANCE).map(|_| ()).map_err(|e| match e {
        Error::Aliasing { fraction, limit, .. } => Error::UnderResolved(format!(
            "{what}: spectral fraction {fraction:.3e} above the 2/3 band exceeds {limit:.1e}"
        )),
        other => other,
    })
}

pub(crate) fn check_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

pub(crate) fn ratio_spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

/// `|slope - expected| <= tol |expected|`, or `<= tol` when nothing is expected.
pub(crate) fn slope_ok(slope: f64, expected: f64, tol: f64) -> bool {
    let scale = if expected == 0.0 { 1.0 } else { expected.abs() };
    (slope - expected).abs() <= tol * scale
}

pub(crate) fn parse_config<C: serde::de::DeserializeOwned>(study: &str, value: serde_json::Value) -> Result<C> {
    serde_json::from_value(value).map_err(|e| Error::Config(format!("{study} config: {e}")))
}
