use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config, states_at};
use super::fit::SlopeFit;
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use crate::dynamics::EquationParams;
use crate::error::Result;
use crate::spectral::{sobolev_norm, Field, Grid, SobolevSpec, Space};

pub const NAME: &str = "scaling-invariance";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub nus: Vec<f64>,
    pub gammas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    pub slope_tol: f64,
    /// Solver covariance run.
    pub nu: f64,
    pub mu: f64,
    pub covariance_lambdas: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub covariance_tol: f64,
    /// Dispersion of the back-transformation check.
    pub delta: f64,
    pub seed: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            nus: vec![3.0, 5.0],
            gammas: vec![0.0, 0.5, 1.0],
            lambdas: vec![0.5, 1.0, 2.0],
            profile: Profile::gaussian(),
            extent: 16.0,
            points: 256,
            slope_tol: 1e-3,
            nu: 3.0,
            mu: 1.0,
            covariance_lambdas: vec![0.5, 2.0],
            t_end: 0.5,
            dt: 0.01,
            covariance_tol: 1e-6,
            delta: 0.5,
            seed: 0,
        }
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    scaling_invariance_study(&parse_config(NAME, value)?)
}

/// `lam^(-4/(nu-1)) f(x / lam)` sampled on the grid stretched by `lam`.
pub fn co_scaled(f: &Field, nu: f64, lam: f64) -> Result<Field> {
    let g = Arc::new(Grid::scaled(f.grid(), lam)?);
    let a = lam.powf(-4.0 / (nu - 1.0));
    Field::new(g, f.physical_values().iter().map(|v| v * a).collect(), Space::Physical)
}

fn relative_l2(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Scaling law of the homogeneous norms, covariance of the solver under
/// `u -> u_lam`, and the dispersion-removing change of variables.
pub fn scaling_invariance_study(cfg: &ScalingConfig) -> Result<ExperimentRecord> {
    let g = grid(1, cfg.extent, cfg.points)?;
    let phi = cfg.profile.build(&g)?;
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dt))?,
    );

    let mut worst_slope: f64 = 0.0;
    for &nu in &cfg.nus {
        for &gamma in &cfg.gammas {
            let spec = SobolevSpec::homogeneous(gamma);
            let norms: Vec<f64> = cfg
                .lambdas
                .iter()
                .map(|&lam| sobolev_norm(&co_scaled(&phi, nu, lam)?, spec))
                .collect::<Result<_>>()?;
            let fit = SlopeFit::loglog(&cfg.lambdas, &norms)?;
            let expected = 0.5 - 4.0 / (nu - 1.0) - gamma;
            let err = (fit.slope - expected).abs();
            worst_slope = worst_slope.max(err);
            rec.row("norm_scaling", &[("nu", nu), ("gamma", gamma), ("slope", fit.slope), ("expected", expected)]);
            rec.fit(&format!("nu={nu},gamma={gamma}"), fit);
        }
    }
    rec.scalar("max_slope_error", worst_slope);
    rec.check("norm_scaling_law", worst_slope < cfg.slope_tol, format!("{worst_slope:.3e}"));

    let p = EquationParams::new(1, cfg.nu, cfg.mu, 1.0)?;
    let reference = states_at(&phi, &p, cfg.dt, &[cfg.t_end], false)?.remove(0);
    let mut worst_cov: f64 = 0.0;
    for &lam in &cfg.covariance_lambdas {
        let l4 = lam.powi(4);
        let u0 = co_scaled(&phi, cfg.nu, lam)?;
        let u = states_at(&u0, &p, cfg.dt * l4, &[cfg.t_end * l4], false)?.remove(0);
        let expected = co_scaled(&reference, cfg.nu, lam)?;
        let m = relative_l2(u.values(), expected.values());
        rec.row("covariance", &[("lambda", lam), ("mismatch", m)]);
        worst_cov = worst_cov.max(m);
    }
    rec.scalar("max_covariance_mismatch", worst_cov);
    rec.check("solver_covariance", worst_cov < cfg.covariance_tol, format!("{worst_cov:.3e}"));

    // u(t, x) = phi_delta(t, delta x) solves the unit-dispersion equation.
    let pd = EquationParams::new(1, cfg.nu, cfg.mu, cfg.delta)?;
    let phi_delta = states_at(&phi, &pd, cfg.dt, &[cfg.t_end], false)?.remove(0);
    let wide = Arc::new(Grid::scaled(&g, 1.0 / cfg.delta)?);
    let u0 = Field::new(wide, phi.physical_values().into_owned(), Space::Physical)?;
    let u = states_at(&u0, &p, cfg.dt, &[cfg.t_end], false)?.remove(0);
    let back = relative_l2(u.values(), phi_delta.values());
    rec.scalar("back_transform_mismatch", back);
    rec.check("back_transform", back < cfg.covariance_tol, format!("{back:.3e}"));
    Ok(rec)
}
