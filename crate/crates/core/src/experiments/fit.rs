use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl SlopeFit {
    /// Fits `y ~ C x^slope`; needs at least three positive, finite pairs.
    pub fn loglog(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "slope fit got {} abscissae and {} ordinates",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "slope fit needs at least 3 points, got {}",
                x.len()
            )));
        }
        let mut points = Vec::with_capacity(x.len());
        for (&a, &b) in x.iter().zip(y) {
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "slope fit needs positive finite data, got ({a}, {b})"
                )));
            }
            points.push((a.ln(), b.ln()));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::InvalidArgument("slope fit abscissae are all equal".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
        Ok(Self {
            points,
            slope,
            intercept,
            r2,
        })
    }

    /// Fitted value `exp(intercept) x^slope`.
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }

    pub fn within_relative(&self, expected: f64, tol: f64) -> bool {
        (self.slope - expected).abs() <= tol * expected.abs()
    }
}
