use serde::{Deserialize, Serialize};

use super::common::{check_increasing, grid, parse_config, slope_ok, states_at};
use super::fit::SlopeFit;
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use super::setup::IllposednessSetup;
use crate::dynamics::{phase_flow, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{rescaled_sobolev_norm_continuum, Field, SobolevSpec};

pub const NAME: &str = "low-frequency";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowFrequencyConfig {
    pub nu: f64,
    pub mu: f64,
    pub gamma: f64,
    pub profile: Profile,
    pub kappa: Option<f64>,
    pub extent: f64,
    pub points: usize,
    pub deltas: Vec<f64>,
    pub dt: f64,
    /// Radius of the frequency ball on which the floor is measured.
    pub floor_radius: f64,
    pub min_floor: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LowFrequencyConfig {
    fn default() -> Self {
        Self {
            nu: 3.0,
            mu: 1.0,
            gamma: -2.0,
            profile: Profile::MomentVanishing { m: 2, amp: 8.0 },
            kappa: None,
            extent: 16.0,
            points: 512,
            deltas: vec![0.2, 0.1, 0.05],
            dt: 0.005,
            floor_radius: 0.25,
            min_floor: 1e-3,
            tol: 0.1,
            seed: 0,
        }
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    low_frequency_study(&parse_config(NAME, value)?)
}

/// `|int phi_0(1, x) dx|` for the zero-dispersion flow from `phi0`.
pub fn low_frequency_presence(phi0: &Field, nu: f64, mu: f64) -> Result<f64> {
    let p0 = EquationParams::new(phi0.grid().dim(), nu, mu, 0.0)?;
    let f = phase_flow(&phi0.clone().into_physical(), 1.0, &p0)?;
    Ok(f.to_fourier()?.values()[f.grid().zero_mode()].norm())
}

/// Smallest `|f_hat(xi)|` over lattice frequencies with `|xi| <= radius`.
pub fn low_frequency_floor(f: &Field, radius: f64) -> Result<f64> {
    let hat = f.fourier_values();
    let g = f.grid();
    Ok(g.xi_squared()
        .iter()
        .zip(hat.iter())
        .filter(|(&x2, _)| x2 <= radius * radius)
        .map(|(_, v)| v.norm())
        .fold(f64::INFINITY, f64::min))
}

fn setup_for(cfg: &LowFrequencyConfig, delta: f64) -> IllposednessSetup {
    IllposednessSetup {
        kappa: cfg.kappa,
        ..IllposednessSetup::new(cfg.nu, cfg.gamma, delta, cfg.profile)
    }
}

/// Growth `eps (lam / delta)^(gamma + d/2)` of the rescaled solution at
/// `t = lam^4` when `gamma <= -d/2`, driven by the low-frequency mass the
/// nonlinear phase creates.
pub fn low_frequency_study(cfg: &LowFrequencyConfig) -> Result<ExperimentRecord> {
    let base = setup_for(cfg, cfg.deltas.first().copied().unwrap_or(0.1));
    let half_d = base.half_d();
    if !(cfg.gamma <= -half_d && cfg.gamma < base.gamma_c()) {
        return Err(Error::Config(format!(
            "low-frequency case needs gamma <= -d/2 = {} and gamma < Gamma_c = {}, got {}",
            -half_d,
            base.gamma_c(),
            cfg.gamma
        )));
    }
    if cfg.deltas.len() < 3 || cfg.deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!("need at least 3 decreasing deltas, got {:?}", cfg.deltas)));
    }
    for &d in &cfg.deltas {
        setup_for(cfg, d).validate()?;
    }
    let g = grid(1, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dt))?,
    );

    let presence = low_frequency_presence(&phi0, cfg.nu, cfg.mu)?;
    let p0 = EquationParams::new(1, cfg.nu, cfg.mu, 0.0)?;
    let floor0 = low_frequency_floor(&phase_flow(&phi0, 1.0, &p0)?, cfg.floor_radius)?;
    rec.scalar("mean_of_closed_form", presence);
    rec.scalar("closed_form_floor", floor0);
    if floor0 < cfg.min_floor {
        return Err(Error::Config(format!(
            "low-frequency floor {floor0:.3e} of the zero-dispersion state is below {:.1e}",
            cfg.min_floor
        )));
    }

    let spec = SobolevSpec::inhomogeneous(cfg.gamma);
    let log_branch = cfg.gamma == -half_d;
    let (mut xs, mut ratios) = (Vec::new(), Vec::new());
    for &delta in &cfg.deltas {
        let s = setup_for(cfg, delta);
        let p = EquationParams::new(1, cfg.nu, cfg.mu, delta)?;
        let f1 = states_at(&phi0, &p, cfg.dt, &[1.0], false)?.remove(0);
        let floor = low_frequency_floor(&f1, cfg.floor_radius)?;
        if floor < cfg.min_floor {
            return Err(Error::Config(format!(
                "low-frequency floor {floor:.3e} at delta = {delta} is below {:.1e}",
                cfg.min_floor
            )));
        }
        let initial = rescaled_sobolev_norm_continuum(&phi0, s.amplitude(), s.dilation(), spec)?;
        let evolved = rescaled_sobolev_norm_continuum(&f1, s.amplitude(), s.dilation(), spec)?;
        let ratio = evolved / s.eps();
        let ls = s.lambda() / delta;
        rec.row(
            "sweep",
            &[
                ("delta", delta),
                ("lambda", s.lambda()),
                ("lambda_over_delta", ls),
                ("eps", s.eps()),
                ("floor", floor),
                ("floor_gap", (floor - floor0).abs()),
                ("initial_ratio", initial / s.eps()),
                ("ratio", ratio),
            ],
        );
        xs.push(if log_branch { (1.0 / ls).ln() } else { ls });
        ratios.push(ratio);
    }

    let fit = SlopeFit::loglog(&xs, &ratios)?;
    let expected = if log_branch { 0.5 } else { cfg.gamma + half_d };
    rec.check("ratio_grows", check_increasing(&ratios), format!("{ratios:?}"));
    rec.check(
        "growth_slope",
        slope_ok(fit.slope, expected, cfg.tol),
        format!("{:.5} vs {expected}", fit.slope),
    );
    rec.scalar("growth_slope", fit.slope);
    rec.scalar("expected_slope", expected);
    rec.fit("growth", fit);
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_has_low_frequency_presence() {
        let g = grid(1, 16.0, 256).unwrap();
        let phi0 = Profile::gaussian().build(&g).unwrap();
        let c = low_frequency_presence(&phi0, 3.0, 1.0).unwrap();
        assert!(c > 1.0, "{c}");
    }

    #[test]
    fn hypothesis_arithmetic() {
        let bad = LowFrequencyConfig { gamma: -1.0, ..Default::default() };
        assert!(matches!(low_frequency_study(&bad), Err(Error::Config(_))));
        let weak = LowFrequencyConfig {
            profile: Profile::MomentVanishing { m: 2, amp: 1e-4 },
            ..Default::default()
        };
        assert!(matches!(low_frequency_study(&weak), Err(Error::Config(_))));
    }
}
