use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config, ratio_spread, slope_ok};
use super::fit::SlopeFit;
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use super::setup::IllposednessSetup;
use crate::error::Result;
use crate::spectral::{
    rescaled_sobolev_norm, rescaled_sobolev_norm_continuum, sobolev_norm, Field, Grid, SobolevSpec,
};

pub const NAME: &str = "initial-norm-scaling";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialNormConfig {
    pub nu: f64,
    pub gamma: f64,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    /// Sweep in `lam` at fixed `delta`.
    pub delta_fixed: f64,
    pub lambdas: Vec<f64>,
    /// Sweep in `delta` at fixed `lam`.
    pub lambda_fixed: f64,
    pub deltas: Vec<f64>,
    /// Deltas for the budget check along `lam = delta^theta` (skipped when theta <= 1).
    pub eps_deltas: Vec<f64>,
    pub tol: f64,
    pub eps_tol: f64,
    pub seed: u64,
}

impl Default for InitialNormConfig {
    fn default() -> Self {
        Self {
            nu: 3.0,
            gamma: -2.0,
            profile: Profile::MomentVanishing { m: 2, amp: 1.0 },
            extent: 16.0,
            points: 512,
            delta_fixed: 0.5,
            lambdas: vec![2f64.powi(-7), 2f64.powi(-8), 2f64.powi(-9), 2f64.powi(-10)],
            lambda_fixed: 2f64.powi(-12),
            deltas: vec![2f64.powi(-6), 2f64.powi(-5), 2f64.powi(-4), 2f64.powi(-3)],
            eps_deltas: vec![0.2, 0.1, 0.05],
            tol: 0.05,
            eps_tol: 0.1,
            seed: 0,
        }
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    initial_norm_scaling_study(&parse_config(NAME, value)?)
}

/// `||u(0)||_{H^gamma}` of the rescaled data, which is `amp * phi0(dilation x)`.
fn initial_norm(phi0: &Field, s: &IllposednessSetup) -> Result<f64> {
    rescaled_sobolev_norm_continuum(phi0, s.amplitude(), s.dilation(), SobolevSpec::inhomogeneous(s.gamma))
}

/// Lattice identity against sampling the rescaled data on the co-scaled grid.
pub(crate) fn bookkeeping_gap(phi0: &Field, s: &IllposednessSetup, spec: SobolevSpec) -> Result<f64> {
    let (amp, dil) = (s.amplitude(), s.dilation());
    let identity = rescaled_sobolev_norm(phi0, amp, dil, spec)?;
    let g = std::sync::Arc::new(Grid::scaled(phi0.grid(), 1.0 / dil)?);
    let direct = Field::new(g, phi0.physical_values().iter().map(|v| v * amp).collect(), crate::spectral::Space::Physical)?;
    let direct = sobolev_norm(&direct, spec)?;
    Ok((identity - direct).abs() / direct)
}

/// Norm of the rescaled initial data in `lam` and in `delta`, against the
/// exponents `Gamma_c - gamma` and `gamma - d/2`.
pub fn initial_norm_scaling_study(cfg: &InitialNormConfig) -> Result<ExperimentRecord> {
    let g = grid(1, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let mut rec = ExperimentRecord::new(NAME, Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), None)?);
    let base = IllposednessSetup::new(cfg.nu, cfg.gamma, cfg.delta_fixed, cfg.profile);
    let (gc, half_d) = (base.gamma_c(), base.half_d());
    rec.scalar("gamma_c", gc);

    let mut by_lam = Vec::new();
    for &lam in &cfg.lambdas {
        let s = IllposednessSetup { delta: cfg.delta_fixed, ..base }.with_lam(lam);
        s.validate()?;
        let n = initial_norm(&phi0, &s)?;
        rec.row("lambda_sweep", &[("delta", s.delta), ("lambda", lam), ("norm", n)]);
        by_lam.push(n);
    }
    let mut by_delta = Vec::new();
    for &delta in &cfg.deltas {
        let s = IllposednessSetup { delta, ..base }.with_lam(cfg.lambda_fixed);
        s.validate()?;
        let n = initial_norm(&phi0, &s)?;
        rec.row("delta_sweep", &[("delta", delta), ("lambda", cfg.lambda_fixed), ("norm", n)]);
        by_delta.push(n);
    }
    let fl = SlopeFit::loglog(&cfg.lambdas, &by_lam)?;
    let fd = SlopeFit::loglog(&cfg.deltas, &by_delta)?;
    let (el, ed) = (gc - cfg.gamma, cfg.gamma - half_d);
    rec.check(
        "lambda_slope",
        slope_ok(fl.slope, el, cfg.tol),
        format!("{:.5} vs {el:.5}", fl.slope),
    );
    rec.check(
        "delta_slope",
        slope_ok(fd.slope, ed, cfg.tol),
        format!("{:.5} vs {ed:.5}", fd.slope),
    );
    rec.scalar("lambda_slope", fl.slope);
    rec.scalar("delta_slope", fd.slope);
    rec.fit("lambda", fl);
    rec.fit("delta", fd);

    // Cross-checks at the first lambda point: the continuum quadrature against
    // the lattice sum on a grid fine enough in xi, and the lattice identity
    // against direct construction.
    let s0 = IllposednessSetup { delta: cfg.delta_fixed, ..base }.with_lam(cfg.lambdas[0]);
    let spec = SobolevSpec::inhomogeneous(cfg.gamma);
    let gap = bookkeeping_gap(&phi0, &s0, spec)?;
    rec.scalar("bookkeeping_gap", gap);
    rec.check("bookkeeping_identity", gap < 1e-10, format!("{gap:.3e}"));
    let wide = grid(1, cfg.extent * 4.0 * s0.dilation().max(1.0), cfg.points * 4 * s0.dilation().max(1.0).ceil() as usize)?;
    let phi_wide = cfg.profile.build(&wide)?;
    let lattice = rescaled_sobolev_norm(&phi_wide, s0.amplitude(), s0.dilation(), spec)?;
    let oracle_gap = (lattice - by_lam[0]).abs() / lattice;
    rec.scalar("quadrature_oracle_gap", oracle_gap);
    rec.check("quadrature_oracle", oracle_gap < 1e-6, format!("{oracle_gap:.3e}"));

    // Budget: the ratio norm / eps along lam = delta^theta.
    let theta = base.theta();
    if theta.is_finite() && theta > 1.0 && cfg.eps_deltas.len() >= 2 {
        let mut ratios = Vec::new();
        for &delta in &cfg.eps_deltas {
            let s = IllposednessSetup { delta, lam: None, ..base };
            s.validate()?;
            let n = initial_norm(&phi0, &s)?;
            rec.row(
                "budget",
                &[("delta", delta), ("lambda", s.lambda()), ("eps", s.eps()), ("norm", n), ("ratio", n / s.eps())],
            );
            ratios.push(n / s.eps());
        }
        let spread = ratio_spread(&ratios) - 1.0;
        rec.scalar("theta", theta);
        rec.scalar("budget_spread", spread);
        rec.check("budget_constant", spread <= cfg.eps_tol, format!("relative spread {spread:.4}"));
    }
    Ok(rec)
}
