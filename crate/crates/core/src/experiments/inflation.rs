use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config, ratio_spread, require_resolved, slope_ok, states_at};
use super::fit::SlopeFit;
use super::initial_norms::bookkeeping_gap;
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use super::setup::IllposednessSetup;
use crate::dynamics::{phase_flow, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{rescaled_sobolev_norm_continuum, sobolev_norm, SobolevSpec};

pub const NAME: &str = "norm-inflation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormInflationConfig {
    pub nu: f64,
    pub mu: f64,
    pub gamma: f64,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    pub t_grid: Vec<f64>,
    /// Dispersion of the solved run.
    pub delta: f64,
    /// Deltas for the initial-smallness constant.
    pub eps_deltas: Vec<f64>,
    pub dt: f64,
    /// Run the dispersive solver as well as the closed form.
    pub solve: bool,
    pub slope_tol: f64,
    pub max_spread: f64,
    pub seed: u64,
}

impl Default for NormInflationConfig {
    fn default() -> Self {
        Self {
            nu: 13.0,
            mu: 1.0,
            gamma: 0.1,
            profile: Profile::gaussian(),
            extent: 8.0,
            points: 8192,
            t_grid: vec![16.0, 32.0, 64.0, 128.0],
            delta: 1e-3,
            eps_deltas: vec![1e-2, 1e-3, 1e-4],
            dt: 0.01,
            solve: true,
            slope_tol: 0.15,
            max_spread: 2.0,
            seed: 0,
        }
    }
}

impl NormInflationConfig {
    fn validate(&self) -> Result<IllposednessSetup> {
        let s = IllposednessSetup::new(self.nu, self.gamma, self.delta, self.profile);
        if !(self.gamma > 0.0 && self.gamma < s.gamma_c()) {
            return Err(Error::Config(format!(
                "norm inflation needs 0 < gamma < Gamma_c = {:.6}, got gamma = {}",
                s.gamma_c(),
                self.gamma
            )));
        }
        if self.t_grid.len() < 3 || self.t_grid.iter().any(|&t| t < 1.0) || self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "t_grid needs at least 3 increasing times >= 1, got {:?}",
                self.t_grid
            )));
        }
        s.validate()?;
        for &d in &self.eps_deltas {
            IllposednessSetup { delta: d, ..s }.validate()?;
        }
        Ok(s)
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    norm_inflation_study(&parse_config(NAME, value)?)
}

/// `||phi_0(t)||_{H^gamma}` for the zero-dispersion flow; no PDE solve.
pub fn closed_form_norms(cfg: &NormInflationConfig, times: &[f64]) -> Result<Vec<f64>> {
    let g = grid(1, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let p0 = EquationParams::new(1, cfg.nu, cfg.mu, 0.0)?;
    times
        .iter()
        .map(|&t| {
            let f = phase_flow(&phi0, t, &p0)?;
            require_resolved(&f, &format!("closed-form state at t = {t}"))?;
            sobolev_norm(&f, SobolevSpec::inhomogeneous(cfg.gamma))
        })
        .collect()
}

/// Growth `t^gamma` of the zero-dispersion flow, its persistence under the
/// dispersive solver, and the rescaled lower bound `c eps t^gamma`.
pub fn norm_inflation_study(cfg: &NormInflationConfig) -> Result<ExperimentRecord> {
    let setup = cfg.validate()?;
    let g = grid(1, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let spec = SobolevSpec::inhomogeneous(cfg.gamma);
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dt))?,
    );
    rec.scalar("gamma_c", setup.gamma_c());
    rec.scalar("theta", setup.theta());

    let n0 = sobolev_norm(&phi0, spec)?;
    let at_zero = closed_form_norms(cfg, &[0.0])?[0];
    rec.check("closed_form_at_zero", at_zero == n0, format!("{at_zero} vs {n0}"));

    let closed = closed_form_norms(cfg, &cfg.t_grid)?;
    for (&t, &n) in cfg.t_grid.iter().zip(&closed) {
        rec.row("closed_form", &[("t", t), ("norm", n)]);
    }
    let fc = SlopeFit::loglog(&cfg.t_grid, &closed)?;
    rec.check(
        "closed_form_slope",
        slope_ok(fc.slope, cfg.gamma, cfg.slope_tol),
        format!("{:.5} vs {}", fc.slope, cfg.gamma),
    );
    rec.scalar("closed_form_slope", fc.slope);
    rec.fit("closed_form", fc);

    if cfg.solve {
        let p = EquationParams::new(1, cfg.nu, cfg.mu, cfg.delta)?;
        let states = states_at(&phi0, &p, cfg.dt, &cfg.t_grid, false)?;
        let (amp, dil, eps) = (setup.amplitude(), setup.dilation(), setup.eps());
        let mut solved = Vec::new();
        let mut lower = Vec::new();
        for (&t, f) in cfg.t_grid.iter().zip(&states) {
            require_resolved(f, &format!("solved state at t = {t}"))?;
            let n = sobolev_norm(f, spec)?;
            let u = rescaled_sobolev_norm_continuum(f, amp, dil, spec)?;
            let ratio = u / (eps * t.powf(cfg.gamma));
            rec.row("solved", &[("t", t), ("norm", n), ("rescaled_norm", u), ("lower_bound_ratio", ratio)]);
            solved.push(n);
            lower.push(ratio);
        }
        let fs = SlopeFit::loglog(&cfg.t_grid, &solved)?;
        rec.check(
            "solved_slope",
            slope_ok(fs.slope, cfg.gamma, cfg.slope_tol),
            format!("{:.5} vs {}", fs.slope, cfg.gamma),
        );
        let spread = ratio_spread(&lower);
        rec.check("lower_bound_ratio", spread < cfg.max_spread, format!("max/min {spread:.4}"));
        rec.scalar("solved_slope", fs.slope);
        rec.scalar("lower_bound_spread", spread);
        rec.scalar("lower_bound_min", lower.iter().cloned().fold(f64::MAX, f64::min));
        rec.fit("solved", fs);
    }

    // Initial smallness ||u(0)|| <= C eps with C stable in delta.
    if !cfg.eps_deltas.is_empty() {
        let mut consts = Vec::new();
        for &delta in &cfg.eps_deltas {
            let s = IllposednessSetup { delta, ..setup };
            let n = rescaled_sobolev_norm_continuum(&phi0, s.amplitude(), s.dilation(), spec)?;
            rec.row("initial", &[("delta", delta), ("lambda", s.lambda()), ("eps", s.eps()), ("constant", n / s.eps())]);
            consts.push(n / s.eps());
        }
        let spread = ratio_spread(&consts);
        rec.check("initial_constant", spread < cfg.max_spread, format!("max/min {spread:.4}"));
        rec.scalar("initial_constant_spread", spread);
        let gap = bookkeeping_gap(&phi0, &IllposednessSetup { delta: cfg.eps_deltas[0], ..setup }, spec)?;
        rec.scalar("bookkeeping_gap", gap);
        rec.check("bookkeeping_identity", gap < 1e-10, format!("{gap:.3e}"));
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_outside_window_is_a_config_error() {
        for gamma in [0.0, 0.2, -0.1] {
            let cfg = NormInflationConfig { gamma, ..Default::default() };
            assert!(matches!(norm_inflation_study(&cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn resolution_guard_trips_for_long_times() {
        let cfg = NormInflationConfig { points: 256, ..Default::default() };
        assert!(matches!(
            closed_form_norms(&cfg, &[128.0]),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn modulus_is_time_independent() {
        let cfg = NormInflationConfig { gamma: 0.1, points: 1024, ..Default::default() };
        let g = grid(1, cfg.extent, cfg.points).unwrap();
        let phi0 = cfg.profile.build(&g).unwrap();
        let p0 = EquationParams::new(1, 13.0, 1.0, 0.0).unwrap();
        let f = phase_flow(&phi0, 5.0, &p0).unwrap();
        for (a, b) in f.values().iter().zip(phi0.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }
}
