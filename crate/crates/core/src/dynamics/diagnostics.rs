use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::evolve::Trajectory;
use super::flow::{linear_propagate, EquationParams, PHASE_SIGN};
use crate::error::{Error, Result};
use crate::spectral::{apply_multiplier, lq_norm, sobolev_norm, Field, SobolevSpec};

/// Minimum number of recorded states for the Duhamel quadrature.
pub const MIN_DUHAMEL_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedPair {
    pub mass: f64,
    pub energy: f64,
}

/// Mass `int |u|^2` and energy `int disp^4 |Δu|^2 / 2 + mu / (nu + 1) |u|^(nu+1)`.
pub fn conserved(f: &Field, p: &EquationParams) -> Result<ConservedPair> {
    p.check_grid(f.grid())?;
    let mass = lq_norm(f, 2.0)?.powi(2);
    let kinetic = if p.disp == 0.0 {
        0.0
    } else {
        let lap = apply_multiplier(f, |xi| Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0))?;
        0.5 * p.disp4() * lq_norm(&lap, 2.0)?.powi(2)
    };
    let potential = if p.nonlinear {
        let w = f.grid().cell_volume();
        let sum: f64 = f
            .physical_values()
            .iter()
            .map(|v| v.norm_sqr() * p.power(v.norm_sqr()))
            .sum();
        p.mu / (p.nu + 1.0) * w * sum
    } else {
        0.0
    };
    Ok(ConservedPair {
        mass,
        energy: kinetic + potential,
    })
}

/// Largest L2 defect in the mild formulation
/// `u(t) = e^{tL} u0 + i sigma mu int_0^t e^{(t-s)L} |u|^(nu-1) u ds`
/// over the recorded times, with the integral by trapezoid over the records.
pub fn duhamel_residual(traj: &Trajectory, p: &EquationParams) -> Result<f64> {
    let snaps = &traj.snapshots;
    if snaps.len() < MIN_DUHAMEL_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Duhamel residual needs at least {MIN_DUHAMEL_SAMPLES} recorded states, got {}",
            snaps.len()
        )));
    }
    let u0 = &snaps[0].field;
    let coeff = Complex64::new(0.0, PHASE_SIGN * p.mu);
    // Interaction picture: v(s) = e^{-sL} N(u(s)); the integral becomes e^{tL} int v.
    let pulled = |s: &super::Snapshot| -> Result<Field> {
        let n = if p.nonlinear {
            s.field.map_physical(|u| p.nonlinearity(u))
        } else {
            Field::zeros(s.field.grid_arc().clone(), crate::spectral::Space::Physical)
        };
        linear_propagate(&n, -s.t, p)
    };

    let mut acc = Field::zeros(u0.grid_arc().clone(), crate::spectral::Space::Physical);
    let mut prev = pulled(&snaps[0])?;
    let mut worst: f64 = 0.0;
    for w in snaps.windows(2) {
        let cur = pulled(&w[1])?;
        let h = 0.5 * (w[1].t - w[0].t);
        acc = acc.add(&prev.add(&cur)?.scale(Complex64::new(h, 0.0)))?;
        let pulled_u = linear_propagate(&w[1].field, -w[1].t, p)?;
        let defect = pulled_u.sub(u0)?.sub(&acc.scale(coeff))?;
        worst = worst.max(lq_norm(&defect, 2.0)?);
        prev = cur;
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringPoint {
    pub t: f64,
    pub t_next: f64,
    /// `|| e^{-tL} u(t) - e^{-t'L} u(t') ||` in the requested norm.
    pub difference: f64,
}

/// Cauchy differences of the pulled-back state between consecutive `times`,
/// each matched to the nearest recorded snapshot.
pub fn scattering_probe(
    traj: &Trajectory,
    p: &EquationParams,
    times: &[f64],
    spec: SobolevSpec,
) -> Result<Vec<ScatteringPoint>> {
    let find = |t: f64| -> Result<&super::Snapshot> {
        traj.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .filter(|s| (s.t - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or_else(|| Error::InvalidArgument(format!("no snapshot recorded at t = {t}")))
    };
    let mut out = Vec::with_capacity(times.len().saturating_sub(1));
    for w in times.windows(2) {
        let (a, b) = (find(w[0])?, find(w[1])?);
        let pa = linear_propagate(&a.field, -a.t, p)?;
        let pb = linear_propagate(&b.field, -b.t, p)?;
        out.push(ScatteringPoint {
            t: a.t,
            t_next: b.t,
            difference: sobolev_norm(&pa.sub(&pb)?, spec)?,
        });
    }
    Ok(out)
}
