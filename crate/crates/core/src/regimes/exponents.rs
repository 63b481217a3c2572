use serde::{Deserialize, Serialize};

use super::real::Real;
use crate::error::{Error, Result};

/// Smallness hypotheses a query may assert about its initial data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallData {
    #[serde(default)]
    pub l2: bool,
    #[serde(default)]
    pub h2: bool,
    /// Small in the critical homogeneous space.
    #[serde(default)]
    pub critical: bool,
}

/// `(d, nu, gamma, mu)` plus optional higher regularity `beta` and smallness flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeQuery {
    pub d: u32,
    pub nu: Real,
    pub gamma: Real,
    pub mu: i8,
    pub beta: Option<Real>,
    pub small: SmallData,
}

impl RegimeQuery {
    pub fn new(d: u32, nu: impl Into<Real>, gamma: impl Into<Real>, mu: i8) -> Self {
        Self {
            d,
            nu: nu.into(),
            gamma: gamma.into(),
            mu,
            beta: None,
            small: SmallData::default(),
        }
    }

    pub fn with_beta(mut self, beta: impl Into<Real>) -> Self {
        self.beta = Some(beta.into());
        self
    }

    pub fn with_small(mut self, small: SmallData) -> Self {
        self.small = small;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if !self.nu.gt(Real::int(1)) || self.nu.is_infinite() {
            return Err(Error::InvalidArgument(format!("nu must exceed 1, got {}", self.nu)));
        }
        if self.gamma.is_infinite() || !self.gamma.to_f64().is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be finite, got {}", self.gamma)));
        }
        if self.mu != 1 && self.mu != -1 {
            return Err(Error::InvalidArgument(format!("mu must be +1 or -1, got {}", self.mu)));
        }
        if let Some(b) = self.beta {
            if !b.gt(self.gamma) {
                return Err(Error::InvalidArgument(format!(
                    "beta = {b} must exceed gamma = {}",
                    self.gamma
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn half_d(&self) -> Real {
        Real::ratio(self.d as i64, 2)
    }
}

/// `Gamma_c = d/2 - 4/(nu - 1)`.
pub fn critical_exponent(d: u32, nu: impl Into<Real>) -> Real {
    let nu = nu.into();
    Real::ratio(d as i64, 2) - Real::int(4) / (nu - Real::int(1))
}

/// `gamma_{p,q} = d/2 - d/q - 4/p`; `p` and `q` may be [`Real::Infinity`].
pub fn gamma_pq(d: u32, p: impl Into<Real>, q: impl Into<Real>) -> Real {
    let d = Real::int(d as i64);
    d / Real::int(2) - d * q.into().recip() - Real::int(4) * p.into().recip()
}

/// `(p, q) in [2, inf]^2`, `(p, q, d) != (2, inf, 2)` and `2/p + d/q <= d/2`.
///
/// With `sharp` the last condition is the equality `2/p + d/q = d/2`.
pub fn is_admissible(d: u32, p: impl Into<Real>, q: impl Into<Real>, sharp: bool) -> bool {
    let (p, q) = (p.into(), q.into());
    let two = Real::int(2);
    if p.lt(two) || q.lt(two) {
        return false;
    }
    if d == 2 && p.eq_tol(two) && q.is_infinite() {
        return false;
    }
    let dd = Real::int(d as i64);
    let lhs = two * p.recip() + dd * q.recip();
    let rhs = dd / two;
    if sharp {
        lhs.eq_tol(rhs)
    } else {
        lhs.le(rhs)
    }
}

/// Hoelder conjugate `a' = a / (a - 1)`, with `1' = inf` and `inf' = 1`.
pub fn conjugate(a: impl Into<Real>) -> Real {
    let a = a.into();
    if a.is_infinite() {
        return Real::int(1);
    }
    if a.eq_tol(Real::int(1)) {
        return Real::Infinity;
    }
    a / (a - Real::int(1))
}

/// The dual scaling relation `gamma_{p,q} = gamma_{a',b'} + 4` for two admissible pairs.
pub fn strichartz_scaling_check(
    d: u32,
    p: impl Into<Real>,
    q: impl Into<Real>,
    a: impl Into<Real>,
    b: impl Into<Real>,
) -> bool {
    let (p, q, a, b) = (p.into(), q.into(), a.into(), b.into());
    if !is_admissible(d, p, q, false) || !is_admissible(d, a, b, false) {
        return false;
    }
    gamma_pq(d, p, q).eq_tol(gamma_pq(d, conjugate(a), conjugate(b)) + Real::int(4))
}

/// Regularity of the nonlinearity: always fine for odd integer `nu`, otherwise
/// `ceil(gamma) <= nu` (and `ceil(beta) <= nu` when `beta` is given).
pub fn smoothness_condition(nu: impl Into<Real>, gamma: impl Into<Real>, beta: Option<Real>) -> bool {
    let nu = nu.into();
    if nu.is_odd_integer() {
        return true;
    }
    let fits = |s: Real| Real::Exact((s.ceil()).into()).le(nu);
    fits(gamma.into()) && beta.is_none_or(fits)
}

/// Regularity required by the ill-posedness construction: odd integer `nu`,
/// or `nu >= k + 1` for an integer `k > d/2`.
pub fn illposedness_smoothness(d: u32, nu: impl Into<Real>) -> bool {
    let nu = nu.into();
    let k = (d / 2 + 1) as i64;
    nu.is_odd_integer() || nu.ge(Real::int(k + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport {
    pub gamma_c: Real,
    /// `theta = 1 - (nu - 1)(d - 2 gamma) / 8`.
    pub theta: Real,
    /// Whether the query lies in the window `0 <= gamma < d/2`, `gamma >= Gamma_c`.
    pub applicable: bool,
    pub pq: Option<(Real, Real)>,
    /// `1/m = 1 - nu/p` (None when that is not positive) and `n = d(nu+1)/(d - 2 gamma)`.
    pub mn: Option<(Option<Real>, Real)>,
    pub gamma_pq_check: Option<Real>,
    pub smoothness_ok: bool,
    pub admissible_ok: Option<bool>,
    /// Sobolev embedding `q <= n = dq/(d - gamma q)`.
    pub embedding_ok: Option<bool>,
}

/// Exponent bookkeeping of the local theory for a query.
///
/// Outside the window `0 <= gamma < d/2`, `gamma >= Gamma_c` the report is
/// returned with `applicable = false`; `gamma = d/2` is rejected because the
/// exponents degenerate.
pub fn working_exponents(q: &RegimeQuery) -> Result<ExponentReport> {
    q.validate()?;
    let (d, nu, gamma) = (Real::int(q.d as i64), q.nu, q.gamma);
    let one = Real::int(1);
    let half_d = q.half_d();
    if gamma.eq_tol(half_d) {
        return Err(Error::InvalidArgument(format!(
            "gamma = d/2 = {half_d} makes the exponents degenerate"
        )));
    }
    let gamma_c = critical_exponent(q.d, nu);
    let theta = one - (nu - one) * (d - Real::int(2) * gamma) / Real::int(8);
    let smoothness_ok = smoothness_condition(nu, gamma, None);
    let applicable = gamma.ge(Real::int(0)) && gamma.lt(half_d) && gamma.ge(gamma_c);
    let mut report = ExponentReport {
        gamma_c,
        theta,
        applicable,
        pq: None,
        mn: None,
        gamma_pq_check: None,
        smoothness_ok,
        admissible_ok: None,
        embedding_ok: None,
    };
    if !applicable {
        return Ok(report);
    }
    let p = Real::int(8) * (nu + one) / ((nu - one) * (d - Real::int(2) * gamma));
    let qq = d * (nu + one) / (d + (nu - one) * gamma);
    let m_inv = one - nu / p;
    let m = m_inv.gt(Real::int(0)).then(|| m_inv.recip());
    let n = d * (nu + one) / (d - Real::int(2) * gamma);
    report.pq = Some((p, qq));
    report.mn = Some((m, n));
    report.gamma_pq_check = Some(gamma_pq(q.d, p, qq));
    report.admissible_ok = Some(is_admissible(q.d, p, qq, false));
    report.embedding_ok = Some(qq.le(n));
    Ok(report)
}
