use serde::{Deserialize, Serialize};

use super::exponents::{
    critical_exponent, illposedness_smoothness, smoothness_condition, RegimeQuery,
};
use super::real::Real;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "local-WP-subcritical")]
    LocalSubcritical,
    #[serde(rename = "local-WP-critical-Ḣ^{Γc}")]
    LocalCritical,
    #[serde(rename = "local-WP-H^{d/2}")]
    LocalHalfD,
    #[serde(rename = "local-WP-above-d/2")]
    LocalAboveHalfD,
    #[serde(rename = "global-WP")]
    Global,
    #[serde(rename = "global-WP-conditional")]
    GlobalConditional,
    #[serde(rename = "regularity-persists")]
    RegularityPersists,
    #[serde(rename = "ill-posed-discontinuous")]
    IllPosedDiscontinuous,
    #[serde(rename = "ill-posed-not-uniformly-continuous")]
    IllPosedNotUniformlyContinuous,
    #[serde(rename = "uncovered")]
    Uncovered,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::LocalSubcritical => "local-WP-subcritical",
            Verdict::LocalCritical => "local-WP-critical-Ḣ^{Γc}",
            Verdict::LocalHalfD => "local-WP-H^{d/2}",
            Verdict::LocalAboveHalfD => "local-WP-above-d/2",
            Verdict::Global => "global-WP",
            Verdict::GlobalConditional => "global-WP-conditional",
            Verdict::RegularityPersists => "regularity-persists",
            Verdict::IllPosedDiscontinuous => "ill-posed-discontinuous",
            Verdict::IllPosedNotUniformlyContinuous => "ill-posed-not-uniformly-continuous",
            Verdict::Uncovered => "uncovered",
        }
    }

    pub fn is_well_posed(self) -> bool {
        !matches!(
            self,
            Verdict::IllPosedDiscontinuous
                | Verdict::IllPosedNotUniformlyContinuous
                | Verdict::Uncovered
        )
    }

    pub fn is_ill_posed(self) -> bool {
        matches!(
            self,
            Verdict::IllPosedDiscontinuous | Verdict::IllPosedNotUniformlyContinuous
        )
    }
}

/// Statement a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremTag {
    /// Local theory for `0 <= gamma < d/2`, `gamma >= Gamma_c`.
    LocalBelowHalfD,
    /// Its small-data critical item: global existence and scattering.
    CriticalSmallData,
    LocalAtHalfD,
    LocalAboveHalfD,
    /// Mass-subcritical global theory in `L2`.
    GlobalMass,
    /// Global theory in the energy space `H2`, items (i) to (iv).
    GlobalEnergyI,
    GlobalEnergyII,
    GlobalEnergyIII,
    GlobalEnergyIV,
    /// Persistence of higher regularity.
    Regularity,
    /// Global theory above the mass space (i) and above the energy space (ii).
    GlobalAboveMass,
    GlobalAboveEnergy,
    IllPosedness,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub verdict: Verdict,
    pub theorem_tag: TheoremTag,
    /// Hypotheses that fired (or, for `uncovered`, why nothing applied).
    pub conditions: Vec<String>,
}

impl RegimeVerdict {
    fn new(verdict: Verdict, tag: TheoremTag, conditions: Vec<String>) -> Self {
        Self {
            verdict,
            theorem_tag: tag,
            conditions,
        }
    }
}

fn nu_class(q: &RegimeQuery) -> String {
    if q.nu.is_odd_integer() {
        format!("nu = {} is an odd integer", q.nu)
    } else {
        format!("nu = {} is not an odd integer", q.nu)
    }
}

/// One deterministic verdict per query, together with the hypotheses used.
pub fn classify(q: &RegimeQuery) -> Result<RegimeVerdict> {
    q.validate()?;
    let zero = Real::int(0);
    let two = Real::int(2);
    let (d, nu, gamma) = (q.d, q.nu, q.gamma);
    let half_d = q.half_d();
    let gc = critical_exponent(d, nu);
    let mass_crit = Real::int(1) + Real::int(8) / Real::int(d as i64);
    let energy_ok = d <= 4 || nu.lt(Real::int(1) + Real::int(8) / Real::int(d as i64 - 4));
    let mut cond = vec![format!("Gamma_c = {gc}")];

    // Below the critical exponent.
    if gamma.lt(gc) {
        let low = gamma.le(-half_d);
        let positive = gamma.gt(zero);
        let at_zero = gamma.eq_tol(zero);
        if !(low || positive || at_zero) {
            cond.push(format!("-d/2 < gamma = {gamma} < 0: no statement covers this range"));
            return Ok(RegimeVerdict::new(Verdict::Uncovered, TheoremTag::None, cond));
        }
        if !illposedness_smoothness(d, nu) {
            cond.push(nu_class(q));
            cond.push("nu < k + 1 for every integer k > d/2".into());
            return Ok(RegimeVerdict::new(Verdict::Uncovered, TheoremTag::None, cond));
        }
        cond.push(nu_class(q));
        if at_zero {
            cond.push("gamma = 0 < Gamma_c".into());
            return Ok(RegimeVerdict::new(
                Verdict::IllPosedNotUniformlyContinuous,
                TheoremTag::IllPosedness,
                cond,
            ));
        }
        cond.push(if low {
            format!("gamma = {gamma} <= -d/2 and gamma < Gamma_c")
        } else {
            format!("0 < gamma = {gamma} < Gamma_c")
        });
        return Ok(RegimeVerdict::new(
            Verdict::IllPosedDiscontinuous,
            TheoremTag::IllPosedness,
            cond,
        ));
    }

    if gamma.lt(zero) {
        cond.push(format!("Gamma_c <= gamma = {gamma} < 0: no statement covers this range"));
        return Ok(RegimeVerdict::new(Verdict::Uncovered, TheoremTag::None, cond));
    }
    if !smoothness_condition(nu, gamma, None) {
        cond.push(nu_class(q));
        cond.push(format!("ceil(gamma) = {} > nu", gamma.ceil()));
        return Ok(RegimeVerdict::new(Verdict::Uncovered, TheoremTag::None, cond));
    }
    cond.push(format!("gamma = {gamma} >= max(0, Gamma_c)"));
    if !nu.is_odd_integer() {
        cond.push(format!("ceil(gamma) = {} <= nu", gamma.ceil()));
    }

    // Persistence of regularity.
    if let Some(beta) = q.beta {
        if gamma.gt(gc) && smoothness_condition(nu, gamma, Some(beta)) {
            cond.push(format!("beta = {beta} > gamma > Gamma_c"));
            return Ok(RegimeVerdict::new(
                Verdict::RegularityPersists,
                TheoremTag::Regularity,
                cond,
            ));
        }
        cond.push(format!("beta = {beta} given but persistence hypotheses fail"));
    }

    let mu = q.mu;
    let below_mass = nu.lt(mass_crit);

    // Energy space.
    if gamma.eq_tol(two) && energy_ok {
        cond.push(if d >= 5 {
            format!("nu < 1 + 8/(d-4) = {}", Real::int(1) + Real::int(8) / Real::int(d as i64 - 4))
        } else {
            "d <= 4".into()
        });
        if mu == 1 {
            cond.push("mu = 1".into());
            return Ok(RegimeVerdict::new(Verdict::Global, TheoremTag::GlobalEnergyI, cond));
        }
        if below_mass {
            cond.push(format!("mu = -1, nu < 1 + 8/d = {mass_crit}"));
            return Ok(RegimeVerdict::new(Verdict::Global, TheoremTag::GlobalEnergyII, cond));
        }
        if nu.eq_tol(mass_crit) && q.small.l2 {
            cond.push(format!("mu = -1, nu = 1 + 8/d = {mass_crit}, small L2 data"));
            return Ok(RegimeVerdict::new(
                Verdict::GlobalConditional,
                TheoremTag::GlobalEnergyIII,
                cond,
            ));
        }
        if q.small.h2 {
            cond.push("mu = -1, small H2 data".into());
            return Ok(RegimeVerdict::new(
                Verdict::GlobalConditional,
                TheoremTag::GlobalEnergyIV,
                cond,
            ));
        }
    }

    // Mass-subcritical global theory.
    if below_mass {
        cond.push(format!("nu < 1 + 8/d = {mass_crit}"));
        let tag = if gamma.eq_tol(zero) {
            TheoremTag::GlobalMass
        } else {
            TheoremTag::GlobalAboveMass
        };
        return Ok(RegimeVerdict::new(Verdict::Global, tag, cond));
    }

    // Above the energy space.
    if gamma.gt(two) && energy_ok {
        if mu == 1 {
            cond.push(format!("gamma >= 2, nu >= 1 + 8/d = {mass_crit}, mu = 1"));
            return Ok(RegimeVerdict::new(
                Verdict::Global,
                TheoremTag::GlobalAboveEnergy,
                cond,
            ));
        }
        if (nu.eq_tol(mass_crit) && q.small.l2) || q.small.h2 {
            cond.push(if q.small.h2 {
                "gamma >= 2, mu = -1, small H2 data".into()
            } else {
                format!("gamma >= 2, mu = -1, nu = 1 + 8/d = {mass_crit}, small L2 data")
            });
            return Ok(RegimeVerdict::new(
                Verdict::GlobalConditional,
                TheoremTag::GlobalAboveEnergy,
                cond,
            ));
        }
    }

    // Local theory.
    if gamma.lt(half_d) {
        if gamma.eq_tol(gc) {
            if q.small.critical {
                cond.push("gamma = Gamma_c, small critical norm".into());
                return Ok(RegimeVerdict::new(
                    Verdict::GlobalConditional,
                    TheoremTag::CriticalSmallData,
                    cond,
                ));
            }
            cond.push("gamma = Gamma_c".into());
            return Ok(RegimeVerdict::new(
                Verdict::LocalCritical,
                TheoremTag::LocalBelowHalfD,
                cond,
            ));
        }
        cond.push("Gamma_c < gamma < d/2".into());
        return Ok(RegimeVerdict::new(
            Verdict::LocalSubcritical,
            TheoremTag::LocalBelowHalfD,
            cond,
        ));
    }
    if gamma.eq_tol(half_d) {
        cond.push("gamma = d/2".into());
        return Ok(RegimeVerdict::new(Verdict::LocalHalfD, TheoremTag::LocalAtHalfD, cond));
    }
    cond.push("gamma > d/2".into());
    Ok(RegimeVerdict::new(
        Verdict::LocalAboveHalfD,
        TheoremTag::LocalAboveHalfD,
        cond,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regimes::SmallData;

    fn v(d: u32, nu: &str, gamma: &str, mu: i8) -> Verdict {
        let q = RegimeQuery::new(d, Real::parse(nu).unwrap(), Real::parse(gamma).unwrap(), mu);
        classify(&q).unwrap().verdict
    }

    #[test]
    fn documented_examples() {
        assert_eq!(v(1, "3", "0", 1), Verdict::Global);
        assert_eq!(v(1, "3", "0", -1), Verdict::Global);
        assert_eq!(v(4, "3", "-3", 1), Verdict::IllPosedDiscontinuous);
        assert_eq!(v(4, "3", "0", 1), Verdict::LocalCritical);
        assert_eq!(v(4, "5", "0", 1), Verdict::IllPosedNotUniformlyContinuous);
        assert_eq!(v(1, "5", "-0.4", 1), Verdict::Uncovered);
    }

    #[test]
    fn mass_critical_boundary_is_not_global() {
        for d in 1..=6 {
            let nu = format!("{}", 1 + 8 / d);
            if 8 % d != 0 {
                continue;
            }
            assert_eq!(v(d, &nu, "0", 1), Verdict::LocalCritical, "d = {d}");
        }
    }

    #[test]
    fn small_critical_data_is_global() {
        let q = RegimeQuery::new(1, Real::int(11), Real::ratio(1, 10), 1).with_small(SmallData {
            critical: true,
            ..Default::default()
        });
        let out = classify(&q).unwrap();
        assert_eq!(out.verdict, Verdict::GlobalConditional);
        assert_eq!(out.theorem_tag, TheoremTag::CriticalSmallData);
    }

    #[test]
    fn invalid_queries_are_rejected() {
        assert!(classify(&RegimeQuery::new(1, Real::int(1), Real::int(0), 1)).is_err());
        assert!(classify(&RegimeQuery::new(1, Real::int(3), Real::int(0), 0)).is_err());
        let q = RegimeQuery::new(1, Real::int(3), Real::int(1), 1).with_beta(Real::int(1));
        assert!(classify(&q).is_err());
    }
}
