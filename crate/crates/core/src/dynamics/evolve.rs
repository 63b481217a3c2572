use serde::{Deserialize, Serialize};

use super::flow::{EquationParams, Stepper};
use super::{conserved, ConservedPair};
use crate::error::{Error, Result};
use crate::spectral::{
    check_aliasing, sobolev_norm_of_spectrum, Field, SobolevSpec, Space, ALIASING_TOLERANCE,
};

/// Default blowup threshold, as a multiple of the initial monitored norm.
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e4;

/// Norm watched for the blowup alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    pub spec: SobolevSpec,
    /// Flag once the norm exceeds `factor` times its initial value.
    pub factor: f64,
}

impl Monitor {
    pub fn new(gamma: f64) -> Self {
        Self {
            spec: SobolevSpec::inhomogeneous(gamma),
            factor: DEFAULT_BLOWUP_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub dt: f64,
    pub t_end: f64,
    /// Enforce the 2/3-rule aliasing guard after every step.
    pub guard: bool,
    /// Record every this many full steps; the final state is always recorded.
    pub record_every: usize,
    #[serde(default)]
    pub monitor: Option<Monitor>,
}

impl StepControl {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            guard: false,
            record_every: 1,
            monitor: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be >= 1".into()));
        }
        if let Some(m) = &self.monitor {
            if !(m.factor.is_finite() && m.factor > 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "blowup factor must exceed 1, got {}",
                    m.factor
                )));
            }
        }
        Ok(())
    }

    /// Step sizes covering `[0, t_end]`: full steps then one shorter final step if needed.
    pub fn schedule(&self) -> (usize, f64) {
        let ratio = self.t_end / self.dt;
        let full = (ratio + 1e-9).floor() as usize;
        let rest = self.t_end - full as f64 * self.dt;
        (full, if rest > 1e-12 * self.dt { rest } else { 0.0 })
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    /// Physical-space state.
    pub field: Field,
    pub conserved: ConservedPair,
    pub monitor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupFlag {
    pub t: f64,
    pub norm: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: EquationParams,
    pub control: StepControl,
    pub snapshots: Vec<Snapshot>,
    /// Set when the monitored norm crossed its threshold; the run stops there.
    pub blowup: Option<BlowupFlag>,
}

impl Trajectory {
    pub fn initial(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory always holds the initial state")
    }

    /// Largest relative mass change against the initial state.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.initial().conserved.mass;
        self.snapshots
            .iter()
            .map(|s| (s.conserved.mass - m0).abs() / m0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// Largest absolute energy change against the initial state.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.initial().conserved.energy;
        self.snapshots
            .iter()
            .map(|s| (s.conserved.energy - e0).abs())
            .fold(0.0, f64::max)
    }
}

fn snapshot(
    t: f64,
    step: usize,
    hat: &[num_complex::Complex64],
    f0: &Field,
    p: &EquationParams,
    monitor: Option<f64>,
) -> Result<Snapshot> {
    let field = Field::new(f0.grid_arc().clone(), hat.to_vec(), Space::Fourier)?.into_physical();
    let conserved = conserved(&field, p)?;
    Ok(Snapshot {
        t,
        step,
        field,
        conserved,
        monitor,
    })
}

/// Integrates from `f0` over `[0, t_end]` with Strang steps, recording at cadence.
pub fn evolve(f0: &Field, ctrl: &StepControl, p: &EquationParams) -> Result<Trajectory> {
    evolve_with(f0, ctrl, p, |_| Ok(()))
}

/// As [`evolve`], handing every snapshot to `observer` as soon as it is taken.
pub fn evolve_with(
    f0: &Field,
    ctrl: &StepControl,
    p: &EquationParams,
    mut observer: impl FnMut(&Snapshot) -> Result<()>,
) -> Result<Trajectory> {
    ctrl.validate()?;
    p.check_grid(f0.grid())?;
    let grid = f0.grid();
    let mut hat = f0.fourier_values().into_owned();
    if ctrl.guard {
        check_aliasing(f0, ALIASING_TOLERANCE)?;
    }

    let monitor_norm = |hat: &[num_complex::Complex64], spec: SobolevSpec| {
        sobolev_norm_of_spectrum(grid, hat, spec)
    };
    let threshold = match &ctrl.monitor {
        Some(m) => Some((m.spec, m.factor * monitor_norm(&hat, m.spec)?)),
        None => None,
    };
    let monitored = |hat: &[num_complex::Complex64]| -> Result<Option<f64>> {
        threshold.map(|(spec, _)| monitor_norm(hat, spec)).transpose()
    };

    let mut traj = Trajectory {
        params: *p,
        control: ctrl.clone(),
        snapshots: Vec::new(),
        blowup: None,
    };
    let first = snapshot(0.0, 0, &hat, f0, p, monitored(&hat)?)?;
    observer(&first)?;
    traj.snapshots.push(first);

    let (full, rest) = ctrl.schedule();
    let stepper = Stepper::new(grid, ctrl.dt, p);
    let last_stepper = (rest > 0.0).then(|| Stepper::new(grid, rest, p));
    let total = full + usize::from(rest > 0.0);
    let mut last_good = hat.clone();

    for step in 1..=total {
        let (t, s) = if step <= full {
            (step as f64 * ctrl.dt, &stepper)
        } else {
            (ctrl.t_end, last_stepper.as_ref().expect("final partial step"))
        };
        s.step(grid, &mut hat);

        if hat.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let prev_t = if step == 1 { 0.0 } else { (step - 1) as f64 * ctrl.dt };
            let good = Field::new(f0.grid_arc().clone(), last_good, Space::Fourier)?.into_physical();
            return Err(Error::NonFinite {
                t: prev_t,
                last_good: Box::new(good),
            });
        }

        let norm = monitored(&hat)?;
        let flagged = match (norm, threshold) {
            (Some(n), Some((_, limit))) if n > limit => Some(BlowupFlag {
                t,
                norm: n,
                threshold: limit,
            }),
            _ => None,
        };

        if ctrl.guard && flagged.is_none() {
            let probe = Field::new(f0.grid_arc().clone(), hat.clone(), Space::Fourier)?;
            check_aliasing(&probe, ALIASING_TOLERANCE)?;
        }

        if flagged.is_some() || step % ctrl.record_every == 0 || step == total {
            let snap = snapshot(t, step, &hat, f0, p, norm)?;
            observer(&snap)?;
            traj.snapshots.push(snap);
        }
        if flagged.is_some() {
            traj.blowup = flagged;
            break;
        }
        last_good.copy_from_slice(&hat);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::phase_flow;
    use crate::spectral::{lq_norm, Grid};

    fn gaussian(l: f64, n: usize, amp: f64, width: f64) -> Field {
        let g = Arc::new(Grid::new(1, l, n).unwrap());
        Field::from_real_fn(g, move |x| amp * (-x[0] * x[0] / (2.0 * width * width)).exp())
    }

    #[test]
    fn schedule_has_exact_final_step() {
        let c = StepControl::new(0.3, 1.0);
        let (full, rest) = c.schedule();
        assert_eq!(full, 3);
        assert!((rest - 0.1).abs() < 1e-12);
        assert_eq!(StepControl::new(0.01, 1.0).schedule(), (100, 0.0));
        assert_eq!(StepControl::new(0.01, 0.0).schedule(), (0, 0.0));
    }

    #[test]
    fn records_at_cadence_and_at_the_end() {
        let f = gaussian(16.0, 128, 1.0, 2.0);
        let p = EquationParams::new(1, 3.0, 1.0, 1.0).unwrap();
        let mut c = StepControl::new(0.03, 0.5);
        c.record_every = 5;
        let traj = evolve(&f, &c, &p).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 5);
        assert!((times[1] - 0.15).abs() < 1e-12);
        assert_eq!(*times.last().unwrap(), 0.5);
    }

    #[test]
    fn zero_dispersion_run_matches_closed_form() {
        let f = gaussian(16.0, 256, 1.0, 1.0);
        let p = EquationParams::new(1, 3.0, -1.0, 0.0).unwrap();
        let traj = evolve(&f, &StepControl::new(0.07, 1.3), &p).unwrap();
        let exact = phase_flow(&f, 1.3, &p).unwrap();
        let err = lq_norm(&traj.last().field.sub(&exact).unwrap(), 2.0).unwrap();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn mass_is_conserved_to_roundoff() {
        let f = gaussian(16.0, 256, 1.0, 2.0);
        let p = EquationParams::new(1, 3.0, 1.0, 1.0).unwrap();
        let traj = evolve(&f, &StepControl::new(0.001, 1.0), &p).unwrap();
        assert!(traj.mass_drift() < 1e-10, "{}", traj.mass_drift());
    }

    #[test]
    fn non_finite_state_aborts_with_last_good() {
        let f = gaussian(16.0, 64, 1.0, 2.0);
        let p = EquationParams::new(1, 3.0, 1.0, 1.0).unwrap();
        let bad = f.map_physical(|v| if v.re > 0.99 { v * f64::NAN } else { v });
        match evolve(&bad, &StepControl::new(0.01, 0.1), &p) {
            Err(Error::NonFinite { t, last_good }) => {
                assert_eq!(t, 0.0);
                assert_eq!(last_good.space(), Space::Physical);
            }
            other => panic!("expected NonFinite, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn focusing_large_data_raises_the_flag() {
        let f = gaussian(8.0, 2048, 2.0, 1.0);
        let p = EquationParams::new(1, 9.0, -1.0, 1.0).unwrap();
        let mut c = StepControl::new(1e-4, 0.5);
        c.record_every = 100;
        c.monitor = Some(Monitor {
            spec: SobolevSpec::inhomogeneous(2.0),
            factor: 100.0,
        });
        let traj = evolve(&f, &c, &p).unwrap();
        let flag = traj.blowup.expect("blowup flag");
        assert!(flag.t < 0.5 && flag.norm > flag.threshold);
        assert_eq!(traj.last().t, flag.t);
    }
}
