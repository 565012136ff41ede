//! Closed-form corollaries: Azuma, Bennett/Bernstein/sub-Chernoff, Poisson,
//! and the supremum bounds for non-negative supermartingales.

use serde::{Deserialize, Serialize};

use super::{require_positive, BoundParams, BoundReport, InequalityId, SPoint};
use crate::error::{Error, Result};
use crate::math;
use crate::mgf::{PhiKind, Side};
use crate::validate::EventSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AzumaKind {
    Upper,
    Lower,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CbbKind {
    Bennett,
    Bernstein,
    ChernoffSub,
}

/// `exp(-γ²/(2V_τ))` for the envelope `(γ/2)(1 + V_t/V_τ)`; doubled and
/// clamped for the two-sided event.
///
/// The envelope is a line through `γ` at `V_τ` with slope `γ/(2V_τ)`, which
/// is what the attached event records.
pub fn azuma_bound(gamma: f64, v_tau: f64, kind: AzumaKind) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    require_positive("v_tau", v_tau)?;
    let exponent = -gamma * gamma / (2.0 * v_tau);
    let slope = gamma / (2.0 * v_tau);
    let line_gamma = gamma / v_tau;
    let params = BoundParams { gamma: Some(gamma), v_tau: Some(v_tau), ..Default::default() };
    let (id, log_raw, event) = match kind {
        AzumaKind::Upper => (
            InequalityId::AzumaUpper,
            exponent,
            EventSpec::Line { side: Side::Upper, gamma: line_gamma, v_tau, slope },
        ),
        AzumaKind::Lower => (
            InequalityId::AzumaLower,
            exponent,
            EventSpec::Line { side: Side::Lower, gamma: line_gamma, v_tau, slope },
        ),
        AzumaKind::TwoSided => (
            InequalityId::AzumaTwoSided,
            core::f64::consts::LN_2 + exponent,
            EventSpec::TwoSidedLine { gamma: line_gamma, v_tau, slope },
        ),
    };
    Ok(BoundReport::from_log(id, log_raw, params)
        .with_s(SPoint::At(line_gamma))
        .with_slope(slope)
        .with_event(event))
}

/// Bennett, Bernstein and the `b = 1` sub-Chernoff bounds for martingales
/// with increments bounded above by `b` and conditional variance sum `V_m`.
pub fn cbb_bounds(gamma: f64, v_m: f64, b: f64, which: CbbKind) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    require_positive("v_m", v_m)?;
    require_positive("b", b)?;
    let params = BoundParams { gamma: Some(gamma), v_tau: Some(v_m), b: Some(b), ..Default::default() };
    let r = match which {
        CbbKind::Bennett => {
            let l = math::ln_1p(b * gamma);
            let exponent = v_m * (gamma / b - (1.0 + b * gamma) * l / (b * b));
            let slope = gamma / l - 1.0 / b;
            BoundReport::from_log(InequalityId::BennettCbb, exponent, params)
                .with_s(SPoint::At(l / b))
                .with_slope(slope)
                .with_event(EventSpec::Line { side: Side::Upper, gamma, v_tau: v_m, slope })
        }
        CbbKind::Bernstein => {
            let exponent = -gamma * gamma / (2.0 * (v_m + b * gamma / 3.0));
            let slope = gamma / (2.0 * v_m);
            BoundReport::from_log(InequalityId::BernsteinCbb, exponent, params)
                .with_s(SPoint::At(1.0 / (v_m / gamma + b / 3.0)))
                .with_slope(slope)
                .with_event(EventSpec::Line { side: Side::Upper, gamma: gamma / v_m, v_tau: v_m, slope })
        }
        CbbKind::ChernoffSub => {
            if b != 1.0 {
                return Err(Error::DomainViolation(alloc::format!("chernoff_sub needs b = 1, got {b}")));
            }
            if gamma >= 3.5 * v_m {
                return Err(Error::DomainViolation(alloc::format!(
                    "chernoff_sub needs gamma < 3.5 v_m = {}, got {gamma}",
                    3.5 * v_m
                )));
            }
            let exponent = -gamma * gamma / (4.0 * v_m);
            let slope = gamma / (2.0 * v_m);
            BoundReport::from_log(InequalityId::ChernoffSub, exponent, params)
                .with_s(SPoint::At(slope))
                .with_slope(slope)
                .with_event(EventSpec::Line { side: Side::Upper, gamma: gamma / v_m, v_tau: v_m, slope })
        }
    };
    Ok(r)
}

/// Line bounds for a Poisson counting process `N_t` with rate `λ`.
///
/// `slope_used` and `intercept` are in counting coordinates: the upper line
/// is `(λ+γ)τ + γ(t-τ)/ln(1+γ/λ)`. The attached event is the same line for
/// the centered process `N_t - λt`.
pub fn poisson_bounds(lambda: f64, gamma: f64, tau: f64, side: Side) -> Result<BoundReport> {
    require_positive("lambda", lambda)?;
    require_positive("gamma", gamma)?;
    require_positive("tau", tau)?;
    let params = BoundParams {
        gamma: Some(gamma),
        tau: Some(tau),
        lambda: Some(lambda),
        side: Some(side),
        phi: Some(PhiKind::PoissonCentered { lambda }),
        ..Default::default()
    };
    let r = match side {
        Side::Upper => {
            let s = math::ln_1p(gamma / lambda);
            let exponent = tau * (gamma - (lambda + gamma) * s);
            let slope = gamma / s;
            BoundReport::from_log(InequalityId::PoissonUpper, exponent, params)
                .with_s(SPoint::At(s))
                .with_slope(slope)
                .with_event(EventSpec::Line { side, gamma, v_tau: tau, slope: slope - lambda })
        }
        Side::Lower => {
            if gamma >= lambda {
                return Err(Error::DomainViolation(alloc::format!(
                    "lower Poisson bound needs gamma < lambda, got gamma = {gamma}, lambda = {lambda}"
                )));
            }
            let s = -math::ln_1p(-gamma / lambda);
            let exponent = tau * (-gamma + (lambda - gamma) * s);
            let slope = gamma / s;
            BoundReport::from_log(InequalityId::PoissonLower, exponent, params)
                .with_s(SPoint::At(s))
                .with_slope(slope)
                .with_event(EventSpec::Line { side, gamma, v_tau: tau, slope: lambda - slope })
        }
    };
    let intercept = (lambda + side.sign() * gamma) * tau;
    Ok(BoundReport { intercept: Some(intercept), exact: false, ..r })
}

/// `P{sup X_t >= γ} <= (E[X_0] - c)/(γ - c)` for a non-negative
/// supermartingale converging to `c`.
///
/// With `continuous` set the process is taken to be a continuous martingale,
/// for which the bound is an equality (and the probability is 1 once
/// `γ <= E[X_0]`).
pub fn supermartingale_sup_bound(mean0: f64, c: f64, gamma: f64, continuous: bool) -> Result<BoundReport> {
    for (name, x) in [("mean0", mean0), ("c", c), ("gamma", gamma)] {
        if !x.is_finite() {
            return Err(Error::DomainViolation(alloc::format!("{name} must be finite, got {x}")));
        }
    }
    if gamma <= c {
        return Err(Error::DomainViolation(alloc::format!("gamma must exceed c, got gamma = {gamma}, c = {c}")));
    }
    if c < 0.0 || c > mean0 {
        return Err(Error::DomainViolation(alloc::format!("need 0 <= c <= mean0, got c = {c}, mean0 = {mean0}")));
    }
    let params = BoundParams { gamma: Some(gamma), mean0: Some(mean0), c: Some(c), ..Default::default() };
    let raw = (mean0 - c) / (gamma - c);
    let mut r = BoundReport::from_raw(InequalityId::SupermartingaleSup, raw, params)
        .with_event(EventSpec::SupLevel { level: gamma });
    if continuous && gamma <= mean0 {
        r.bound = 1.0;
    }
    r.exact = continuous;
    Ok(r)
}

/// `P{sup Y_t >= γ} <= 1/γ` for the exponential supermartingale
/// `Y_t = exp(s X_t - φ(s) V_t)`; an equality when `γ >= 1` and `φ` is the
/// exact log-MGF of a continuous process.
pub fn doob_exp_bound(gamma: f64, claims_equality: bool) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    let params = BoundParams { gamma: Some(gamma), ..Default::default() };
    let mut r = BoundReport::from_raw(InequalityId::DoobExp, 1.0 / gamma, params).with_event(EventSpec::SupLevel { level: gamma });
    r.exact = claims_equality && gamma >= 1.0;
    Ok(r)
}
