use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

/// Named analytic initial profiles.
///
/// Text form: `gaussian`, `gaussian:amp=2,width=1`, `moment:m=2,amp=8`, `scaled:a=0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `amp * exp(-|x|^2 / (2 width^2))`.
    Gaussian { amp: f64, width: f64 },
    /// Built in Fourier space as `amp * (i xi)^m exp(-xi^2)`, so `phi_hat = O(|xi|^m)` at 0.
    MomentVanishing { m: u32, amp: f64 },
    /// `a` times the unit Gaussian.
    Scaled { a: f64 },
}

impl Profile {
    pub fn gaussian() -> Self {
        Profile::Gaussian {
            amp: 1.0,
            width: 1.0,
        }
    }

    /// Order of vanishing of the transform at the origin.
    pub fn vanishing_order(&self) -> u32 {
        match self {
            Profile::MomentVanishing { m, .. } => *m,
            _ => 0,
        }
    }

    pub fn build(&self, grid: &Arc<Grid>) -> Result<Field> {
        match *self {
            Profile::Gaussian { amp, width } => {
                let w2 = 2.0 * width * width;
                Ok(Field::from_real_fn(grid.clone(), move |x| {
                    amp * (-(x[0] * x[0] + x[1] * x[1]) / w2).exp()
                }))
            }
            Profile::Scaled { a } => Profile::Gaussian { amp: a, width: 1.0 }.build(grid),
            Profile::MomentVanishing { m, amp } => {
                if grid.dim() != 1 {
                    return Err(Error::Config(
                        "moment-vanishing profiles are only constructed in one dimension".into(),
                    ));
                }
                Ok(Field::from_spectrum_fn(grid.clone(), move |xi| {
                    amp * Complex64::new(0.0, xi[0]).powu(m) * (-xi[0] * xi[0]).exp()
                })
                .into_physical())
            }
        }
    }
}

impl Default for Profile {
    fn default() -> Self {
        Profile::gaussian()
    }
}

/// Builds the initial profile `family` on `grid`.
pub fn build_phi0(profile: &Profile, grid: &Arc<Grid>) -> Result<Field> {
    profile.build(grid)
}

fn parse_params(body: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value in profile, got '{part}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad number in profile: '{part}'")))?;
        out.push((k.trim().to_string(), v));
    }
    Ok(out)
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, body) = s.split_once(':').unwrap_or((s, ""));
        let params = parse_params(body)?;
        let get = |name: &str, default: Option<f64>| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .or(default)
                .ok_or_else(|| Error::Config(format!("profile '{family}' needs '{name}'")))
        };
        let known = |allowed: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
                Some((k, _)) => Err(Error::Config(format!("unknown profile parameter '{k}'"))),
                None => Ok(()),
            }
        };
        let profile = match family.trim() {
            "gaussian" => {
                known(&["amp", "width"])?;
                Profile::Gaussian {
                    amp: get("amp", Some(1.0))?,
                    width: get("width", Some(1.0))?,
                }
            }
            "moment" | "moment-vanishing" | "moment-vanishing-gaussian" => {
                known(&["m", "amp"])?;
                let m = get("m", None)?;
                if m < 0.0 || m.fract() != 0.0 || m > 16.0 {
                    return Err(Error::Config(format!("moment order must be an integer in 0..=16, got {m}")));
                }
                Profile::MomentVanishing {
                    m: m as u32,
                    amp: get("amp", Some(1.0))?,
                }
            }
            "scaled" => {
                known(&["a"])?;
                Profile::Scaled { a: get("a", None)? }
            }
            other => return Err(Error::Config(format!("unknown profile family '{other}'"))),
        };
        if let Profile::Gaussian { width, .. } = profile {
            if !(width > 0.0 && width.is_finite()) {
                return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
            }
        }
        Ok(profile)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Gaussian { amp, width } => write!(f, "gaussian:amp={amp},width={width}"),
            Profile::MomentVanishing { m, amp } => write!(f, "moment:m={m},amp={amp}"),
            Profile::Scaled { a } => write!(f, "scaled:a={a}"),
        }
    }
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lq_norm;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(1, 16.0, 256).unwrap())
    }

    #[test]
    fn gaussian_peaks_at_one() {
        let f = build_phi0(&"gaussian".parse().unwrap(), &grid()).unwrap();
        assert_eq!(f.values()[128].re, 1.0);
    }

    #[test]
    fn moment_vanishing_has_zero_low_moments() {
        let p: Profile = "moment:m=2".parse().unwrap();
        let f = build_phi0(&p, &grid()).unwrap();
        let hat = f.to_fourier().unwrap();
        assert!(hat.values()[0].norm() < 1e-14);
        // First moment int x f = i d/dxi f_hat(0) also vanishes.
        let w = f.grid().cell_volume();
        let m1: Complex64 = f
            .values()
            .iter()
            .zip(f.grid().coords(0))
            .map(|(v, x)| v * x * w)
            .sum();
        assert!(m1.norm() < 1e-12);
    }

    #[test]
    fn scaled_doubles_the_norm() {
        let one = build_phi0(&Profile::gaussian(), &grid()).unwrap();
        let two = build_phi0(&"scaled:a=2".parse().unwrap(), &grid()).unwrap();
        let (a, b) = (lq_norm(&one, 2.0).unwrap(), lq_norm(&two, 2.0).unwrap());
        assert!((b - 2.0 * a).abs() < 1e-14);
    }

    #[test]
    fn parsing_round_trips_and_rejects() {
        for s in ["gaussian:amp=2,width=0.5", "moment:m=3,amp=8", "scaled:a=0.75"] {
            let p: Profile = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
        assert!("gaussian:width=-1".parse::<Profile>().is_err());
        assert!("moment:amp=1".parse::<Profile>().is_err());
        assert!("cosine".parse::<Profile>().is_err());
        assert!("gaussian:sigma=1".parse::<Profile>().is_err());
        let g2 = Arc::new(Grid::new(2, 8.0, 32).unwrap());
        assert!(build_phi0(&"moment:m=2".parse().unwrap(), &g2).is_err());
    }
}
