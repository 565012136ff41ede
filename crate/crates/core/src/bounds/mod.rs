//! Bound evaluators. Every evaluator returns a [`BoundReport`] carrying the
//! clamped probability bound, the raw (possibly > 1) value, and the event it
//! applies to so the Monte Carlo side can check it.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::mgf::{PhiKind, Radius, Side};
use crate::validate::EventSpec;

mod classic;
mod expfam;
mod general;

pub use classic::{azuma_bound, cbb_bounds, doob_exp_bound, poisson_bounds, supermartingale_sup_bound, AzumaKind, CbbKind};
pub use expfam::{expfam_bound, ExpFamily, ExpFamilyKind};
pub use general::{eta_bound, line_bound, optimized_line_bound, vee_bound, EtaVariant};

macro_rules! inequality_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Which inequality a report evaluates.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum InequalityId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl InequalityId {
            pub const ALL: &'static [InequalityId] = &[$(InequalityId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(InequalityId::$variant => $name,)*
                }
            }
        }
    };
}

inequality_ids! {
    GenLineUpper => "gen_line_upper",
    GenLineLower => "gen_line_lower",
    VeeUpper => "vee_upper",
    VeeLower => "vee_lower",
    EtaRayUpper => "eta_ray_upper",
    EtaRayLower => "eta_ray_lower",
    EtaVeeUpper => "eta_vee_upper",
    EtaVeeLower => "eta_vee_lower",
    AzumaUpper => "azuma_upper",
    AzumaLower => "azuma_lower",
    AzumaTwoSided => "azuma_two_sided",
    BennettCbb => "bennett_cbb",
    BernsteinCbb => "bernstein_cbb",
    ChernoffSub => "chernoff_sub",
    ExpFamUpper => "expfam_upper",
    ExpFamLower => "expfam_lower",
    PoissonUpper => "poisson_upper",
    PoissonLower => "poisson_lower",
    SupermartingaleSup => "supermartingale_sup",
    DoobExp => "doob_exp",
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidSpec(alloc::format!("unknown inequality `{s}`")))
    }
}

/// The `s` behind a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SPoint {
    At(f64),
    /// Infimum approached at the domain edge.
    Edge(Radius),
    /// No decrease from the origin.
    Origin,
}

impl SPoint {
    pub fn value(self) -> Option<f64> {
        match self {
            SPoint::At(s) => Some(s),
            SPoint::Edge(r) => Some(r.as_f64()),
            SPoint::Origin => None,
        }
    }
}

/// Inputs echoed back in a report. Unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

/// A computed bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: InequalityId,
    /// The bound clamped to `[0, 1]`.
    pub bound: f64,
    /// Unclamped value of the displayed expression.
    pub raw: f64,
    /// `ln(raw)`; finite even when `raw` underflows.
    pub log_raw: f64,
    pub s_used: Option<SPoint>,
    /// Continuation slope of the boundary, in the inequality's own coordinates.
    pub slope_used: Option<f64>,
    /// Boundary height at `V = V_τ` in the inequality's own coordinates, when
    /// that differs from `γ V_τ`.
    pub intercept: Option<f64>,
    pub params: BoundParams,
    /// No information: the bound is 1 (empty feasible set, or no decrease).
    pub vacuous: bool,
    /// The bound holds with equality for continuous processes whose exact
    /// log-MGF is `φ`.
    pub exact: bool,
    /// `false` when the `b★` restriction was skipped because `φ(s)/s` is not monotone.
    pub restricted: bool,
    /// The event the bound applies to, on `Z = X - X_0` and the variance proxy.
    pub event: Option<EventSpec>,
}

impl BoundReport {
    pub(crate) fn from_log(inequality: InequalityId, log_raw: f64, params: BoundParams) -> Self {
        let raw = math::exp(log_raw);
        let bound = clamp_unit(raw);
        BoundReport {
            inequality,
            bound,
            raw,
            log_raw,
            s_used: None,
            slope_used: None,
            intercept: None,
            params,
            vacuous: bound >= 1.0,
            exact: false,
            restricted: true,
            event: None,
        }
    }

    pub(crate) fn from_raw(inequality: InequalityId, raw: f64, params: BoundParams) -> Self {
        let mut r = Self::from_log(inequality, math::ln(raw), params);
        r.raw = raw;
        r.bound = clamp_unit(raw);
        r.vacuous = r.bound >= 1.0;
        r
    }

    pub(crate) fn with_s(mut self, s: SPoint) -> Self {
        self.s_used = Some(s);
        self
    }

    pub(crate) fn with_slope(mut self, slope: f64) -> Self {
        self.slope_used = Some(slope);
        self
    }

    pub(crate) fn with_event(mut self, event: EventSpec) -> Self {
        self.event = Some(event);
        self
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        1.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

pub(crate) fn require_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::DomainViolation(alloc::format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

pub(crate) fn require_nonneg(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::DomainViolation(alloc::format!("{name} must be non-negative and finite, got {x}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_strings() {
        for &id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        }
        assert_eq!(InequalityId::ALL.len(), 20);
        assert!("azuma".parse::<InequalityId>().is_err());
    }

    #[test]
    fn clamping_keeps_raw() {
        let r = BoundReport::from_raw(InequalityId::DoobExp, 2.0, BoundParams::default());
        assert_eq!(r.bound, 1.0);
        assert_eq!(r.raw, 2.0);
        assert!(r.vacuous);
        let r = BoundReport::from_log(InequalityId::AzumaUpper, -800.0, BoundParams::default());
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.log_raw, -800.0);
    }
}
