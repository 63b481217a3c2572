use serde::{Deserialize, Serialize};

use super::profile::Profile;
use crate::error::{Error, Result};

/// Parameters of the rescaled ill-posedness data
/// `u(t, x) = lam^(-4/(nu-1)) phi_delta(lam^-4 t, (delta / lam) x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IllposednessSetup {
    pub dim: usize,
    pub nu: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Overrides `lam = delta^theta`.
    pub lam: Option<f64>,
    pub phi0: Profile,
    /// Vanishing order of `phi0_hat` at the origin, for `gamma <= -d/2`.
    pub kappa: Option<f64>,
    /// Amplitude `a` of the two-amplitude construction at `gamma = 0`.
    pub amp: f64,
}

impl IllposednessSetup {
    pub fn new(nu: f64, gamma: f64, delta: f64, phi0: Profile) -> Self {
        Self {
            dim: 1,
            nu,
            gamma,
            delta,
            lam: None,
            phi0,
            kappa: None,
            amp: 1.0,
        }
    }

    pub fn with_lam(mut self, lam: f64) -> Self {
        self.lam = Some(lam);
        self
    }

    pub fn half_d(&self) -> f64 {
        self.dim as f64 / 2.0
    }

    pub fn gamma_c(&self) -> f64 {
        self.half_d() - 4.0 / (self.nu - 1.0)
    }

    /// `theta = (d/2 - gamma) / (Gamma_c - gamma)`.
    pub fn theta(&self) -> f64 {
        (self.half_d() - self.gamma) / (self.gamma_c() - self.gamma)
    }

    pub fn lambda(&self) -> f64 {
        self.lam.unwrap_or_else(|| self.delta.powf(self.theta()))
    }

    /// `eps = lam^(Gamma_c - gamma) delta^(gamma - d/2)`.
    pub fn eps(&self) -> f64 {
        self.lambda().powf(self.gamma_c() - self.gamma) * self.delta.powf(self.gamma - self.half_d())
    }

    pub fn amplitude(&self) -> f64 {
        self.lambda().powf(-4.0 / (self.nu - 1.0))
    }

    /// Spatial dilation `delta / lam` applied to `phi_delta`.
    pub fn dilation(&self) -> f64 {
        self.delta / self.lambda()
    }

    /// The `phi0_hat = O(|xi|^kappa)` order actually in force: the explicit
    /// `kappa` or else the profile's vanishing order.
    pub fn effective_kappa(&self) -> f64 {
        self.kappa.unwrap_or(self.phi0.vanishing_order() as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > 2 {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {}", self.dim)));
        }
        if !(self.nu.is_finite() && self.nu > 1.0) {
            return Err(Error::Config(format!("nu must exceed 1, got {}", self.nu)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::Config("gamma must be finite".into()));
        }
        if self.lam.is_none() {
            let theta = self.theta();
            if !(theta.is_finite() && theta > 1.0) {
                return Err(Error::Config(format!(
                    "derived theta = {theta} must exceed 1 (needs gamma < Gamma_c = {})",
                    self.gamma_c()
                )));
            }
        }
        let (lam, delta) = (self.lambda(), self.delta);
        if !(lam > 0.0 && lam <= delta && delta <= 0.5) {
            return Err(Error::Config(format!(
                "need 0 < lam <= delta <= 0.5, got lam = {lam}, delta = {delta}"
            )));
        }
        if self.gamma <= -self.half_d() {
            let need = -self.gamma - self.half_d();
            let kappa = self.effective_kappa();
            if kappa <= need {
                return Err(Error::Config(format!(
                    "gamma = {} needs phi0_hat = O(|xi|^kappa) with kappa > {need}, got {kappa}",
                    self.gamma
                )));
            }
            if (self.phi0.vanishing_order() as f64) < kappa.ceil() {
                return Err(Error::Config(format!(
                    "profile {} vanishes to order {} < ceil(kappa) = {}",
                    self.phi0,
                    self.phi0.vanishing_order(),
                    kappa.ceil()
                )));
            }
        }
        if !(0.5..=2.0).contains(&self.amp) {
            return Err(Error::Config(format!("amplitude a must lie in [1/2, 2], got {}", self.amp)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_is_one_on_the_theta_curve() {
        for &(nu, gamma) in &[(3.0, -2.0), (13.0, 0.1), (13.0, 0.0), (5.0, -1.0)] {
            for &delta in &[0.4, 0.1, 1e-3] {
                let s = IllposednessSetup::new(nu, gamma, delta, Profile::gaussian());
                let direct = s.lambda().powf(s.gamma_c() - gamma) * delta.powf(gamma - 0.5);
                assert!((s.eps() - direct).abs() <= 1e-12 * direct);
                assert!((s.eps() - 1.0).abs() < 1e-12, "{nu} {gamma} {delta}: {}", s.eps());
            }
        }
    }

    #[test]
    fn theta_example() {
        let s = IllposednessSetup::new(3.0, -2.0, 0.1, Profile::gaussian());
        assert!((s.theta() - 5.0).abs() < 1e-12);
        assert!((s.gamma_c() + 1.5).abs() < 1e-15);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let m2: Profile = "moment:m=2".parse().unwrap();
        assert!(IllposednessSetup::new(3.0, -2.0, 0.1, m2).validate().is_ok());
        // Plain Gaussian does not vanish at the origin.
        assert!(IllposednessSetup::new(3.0, -2.0, 0.1, Profile::gaussian()).validate().is_err());
        // gamma above Gamma_c gives theta < 1.
        assert!(IllposednessSetup::new(3.0, -1.0, 0.1, m2).validate().is_err());
        // delta too large.
        assert!(IllposednessSetup::new(13.0, 0.1, 0.8, Profile::gaussian()).validate().is_err());
        // lam above delta.
        let s = IllposednessSetup::new(13.0, 0.1, 0.1, Profile::gaussian()).with_lam(0.2);
        assert!(s.validate().is_err());
        let mut s = IllposednessSetup::new(13.0, 0.0, 0.01, Profile::gaussian());
        s.amp = 3.0;
        assert!(s.validate().is_err());
    }
}
