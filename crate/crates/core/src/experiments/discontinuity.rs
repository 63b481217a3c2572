use serde::{Deserialize, Serialize};

use super::common::{grid, parse_config, states_at};
use super::profile::Profile;
use super::record::{ExperimentRecord, Provenance};
use super::setup::IllposednessSetup;
use crate::dynamics::{phase_flow, EquationParams};
use crate::error::{Error, Result};
use crate::spectral::{lq_norm, rescaled_sobolev_norm, Field, SobolevSpec};

pub const NAME: &str = "uniform-discontinuity";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscontinuityConfig {
    pub nu: f64,
    pub mu: f64,
    pub profile: Profile,
    pub extent: f64,
    pub points: usize,
    pub a: f64,
    /// Gaps `|a - a'|`; each run uses `a' = a - gap`.
    pub gaps: Vec<f64>,
    /// Check time is `t_factor / gap`.
    pub t_factor: f64,
    pub delta: f64,
    pub dt: f64,
    pub scale_tol: f64,
    pub max_shrink: f64,
    /// Allowed gap between the solved and closed-form differences, relative
    /// to the closed-form difference.
    pub solve_gap_tol: f64,
    pub seed: u64,
}

impl Default for DiscontinuityConfig {
    fn default() -> Self {
        Self {
            nu: 13.0,
            mu: 1.0,
            profile: Profile::gaussian(),
            extent: 8.0,
            points: 2048,
            a: 1.0,
            gaps: vec![0.5, 0.25, 0.125],
            t_factor: 1.5,
            delta: 1e-3,
            dt: 0.01,
            scale_tol: 0.2,
            max_shrink: 0.3,
            solve_gap_tol: 1e-4,
            seed: 0,
        }
    }
}

pub fn run_value(value: serde_json::Value) -> Result<ExperimentRecord> {
    uniform_discontinuity_study(&parse_config(NAME, value)?)
}

/// `|| a phi_0 e^{i s mu a^(nu-1) t |phi_0|^(nu-1)} - (same with a') ||_{L2}`.
pub fn closed_form_difference(phi0: &Field, nu: f64, mu: f64, a: f64, a2: f64, t: f64) -> Result<f64> {
    let p0 = EquationParams::new(phi0.grid().dim(), nu, mu, 0.0)?;
    let phi0 = phi0.clone().into_physical();
    let u = phase_flow(&phi0.scale(a.into()), t, &p0)?;
    let v = phase_flow(&phi0.scale(a2.into()), t, &p0)?;
    lq_norm(&u.sub(&v)?, 2.0)
}

/// Two data at distance `eps |a - a'|` whose solutions stay `c eps` apart.
pub fn uniform_discontinuity_study(cfg: &DiscontinuityConfig) -> Result<ExperimentRecord> {
    let s = IllposednessSetup {
        amp: cfg.a,
        ..IllposednessSetup::new(cfg.nu, 0.0, cfg.delta, cfg.profile)
    };
    if s.gamma_c() <= 0.0 {
        return Err(Error::Config(format!(
            "uniform discontinuity needs Gamma_c > 0, got {}",
            s.gamma_c()
        )));
    }
    s.validate()?;
    if cfg.gaps.len() < 2 || cfg.gaps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!("gaps must be decreasing, got {:?}", cfg.gaps)));
    }
    for &gap in &cfg.gaps {
        let a2 = cfg.a - gap;
        if !(gap > 0.0 && (0.5..=2.0).contains(&a2)) {
            return Err(Error::Config(format!("a' = {a2} must differ from a and lie in [1/2, 2]")));
        }
    }
    let g = grid(1, cfg.extent, cfg.points)?;
    let phi0 = cfg.profile.build(&g)?;
    let mut rec = ExperimentRecord::new(
        NAME,
        Provenance::new(NAME, cfg, cfg.seed, g.spec().clone(), Some(cfg.dt))?,
    );
    let (amp, dil, eps) = (s.amplitude(), s.dilation(), s.eps());
    let l2 = SobolevSpec::inhomogeneous(0.0);
    let norm = |f: &Field| rescaled_sobolev_norm(f, amp, dil, l2);
    rec.scalar("eps", eps);
    rec.scalar("lambda", s.lambda());

    let p = EquationParams::new(1, cfg.nu, cfg.mu, cfg.delta)?;
    let times: Vec<f64> = cfg.gaps.iter().map(|g| cfg.t_factor / g).collect();
    let base_run = states_at(&phi0.scale(cfg.a.into()), &p, cfg.dt, &times, true)?;
    let initial_a = norm(&phi0.scale(cfg.a.into()))? / eps;

    let (mut init_scaled, mut evolved) = (Vec::new(), Vec::new());
    let mut worst_gap: f64 = 0.0;
    for ((&gap, &t), ua) in cfg.gaps.iter().zip(&times).zip(&base_run) {
        let a2 = cfg.a - gap;
        let ub = states_at(&phi0.scale(a2.into()), &p, cfg.dt, &[t], true)?.remove(0);
        let initial_b = norm(&phi0.scale(a2.into()))? / eps;
        let init_diff = norm(&phi0.scale((cfg.a - a2).into()))? / eps;
        let diff = norm(&ua.sub(&ub)?)? / eps;
        let closed = closed_form_difference(&phi0, cfg.nu, cfg.mu, cfg.a, a2, t)?;
        let solved_unscaled = lq_norm(&ua.sub(&ub)?, 2.0)?;
        worst_gap = worst_gap.max((solved_unscaled - closed).abs() / closed);
        rec.row(
            "sweep",
            &[
                ("gap", gap),
                ("t", t),
                ("initial_norm_a", initial_a),
                ("initial_norm_a2", initial_b),
                ("initial_difference", init_diff),
                ("evolved_difference", diff),
                ("closed_form_difference", closed),
            ],
        );
        init_scaled.push(init_diff / gap);
        evolved.push(diff);
    }
    let first = init_scaled[0];
    let proportional = init_scaled.iter().all(|r| (r / first - 1.0).abs() <= cfg.scale_tol);
    rec.check("initial_difference_proportional", proportional, format!("{init_scaled:?}"));
    let floor = evolved.iter().cloned().fold(f64::MAX, f64::min);
    let shrink = 1.0 - floor / evolved[0];
    rec.check(
        "evolved_difference_floor",
        floor > 0.0 && shrink <= cfg.max_shrink,
        format!("floor {floor:.4}, shrink {shrink:.4}"),
    );
    rec.check(
        "solve_matches_closed_form",
        worst_gap <= cfg.solve_gap_tol,
        format!("relative {worst_gap:.3e}"),
    );
    rec.scalar("evolved_floor", floor);
    rec.scalar("evolved_shrink", shrink);
    rec.scalar("initial_constant", first);
    rec.scalar("solve_gap", worst_gap);
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_amplitudes_do_not_separate() {
        let g = grid(1, 8.0, 256).unwrap();
        let phi0 = Profile::gaussian().build(&g).unwrap();
        assert_eq!(closed_form_difference(&phi0, 13.0, 1.0, 1.0, 1.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let c = DiscontinuityConfig { nu: 5.0, ..Default::default() };
        assert!(matches!(uniform_discontinuity_study(&c), Err(Error::Config(_))));
        let c = DiscontinuityConfig { gaps: vec![0.75, 0.25], ..Default::default() };
        assert!(matches!(uniform_discontinuity_study(&c), Err(Error::Config(_))));
    }
}
