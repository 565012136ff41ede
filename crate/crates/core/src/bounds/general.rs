//! Line, vee and η-shifted bounds for a generic `φ`.

use serde::{Deserialize, Serialize};

use super::{require_nonneg, require_positive, BoundParams, BoundReport, InequalityId, SPoint};
use crate::error::{Error, Result};
use crate::math;
use crate::mgf::{MgfBound, Radius, Side};
use crate::optimize::{self, minimize_objective, Argmin, RootPoint, TailObjective};
use crate::validate::EventSpec;

/// Shape of the η-shifted boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaVariant {
    /// `η + γ V_t`.
    Ray,
    /// `η + γ (V_τ ∨ V_t)`.
    Vee,
}

fn pick(side: Side, upper: InequalityId, lower: InequalityId) -> InequalityId {
    match side {
        Side::Upper => upper,
        Side::Lower => lower,
    }
}

fn base_params(phi: &MgfBound, gamma: f64, v_tau: f64, side: Side) -> BoundParams {
    BoundParams { gamma: Some(gamma), v_tau: Some(v_tau), side: Some(side), phi: Some(phi.kind()), ..Default::default() }
}

/// `exp(V_τ (φ(±s) - γ s))` for the line with continuation slope `φ(±s)/s`.
pub fn line_bound(phi: &MgfBound, s: f64, gamma: f64, v_tau: f64, side: Side) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    require_positive("v_tau", v_tau)?;
    if !(s > 0.0) {
        return Err(Error::DomainViolation(alloc::format!("s must be positive, got {s}")));
    }
    let phis = phi.phi_on(side, s)?;
    let slope = phis / s;
    let mut params = base_params(phi, gamma, v_tau, side);
    params.s = Some(s);
    let mut r = BoundReport::from_log(pick(side, InequalityId::GenLineUpper, InequalityId::GenLineLower), v_tau * (phis - gamma * s), params)
        .with_s(SPoint::At(s))
        .with_slope(slope)
        .with_event(EventSpec::Line { side, gamma, v_tau, slope });
    r.exact = phi.claims_equality();
    Ok(r)
}

/// Line bound at the optimal `s`, with continuation slope `α(γ)` or `β(γ)`.
pub fn optimized_line_bound(phi: &MgfBound, gamma: f64, v_tau: f64, side: Side, tol: f64) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    require_positive("v_tau", v_tau)?;
    let opt = optimize::minimize_tail_exponent(phi, gamma, side, tol)?;
    let s_used = match opt.s_opt {
        Argmin::Interior(s) => SPoint::At(s),
        Argmin::Edge(r) => SPoint::Edge(r),
        Argmin::Origin => SPoint::Origin,
    };
    let mut r = BoundReport::from_log(
        pick(side, InequalityId::GenLineUpper, InequalityId::GenLineLower),
        v_tau * opt.value,
        base_params(phi, gamma, v_tau, side),
    )
    .with_s(s_used)
    .with_slope(opt.slope)
    .with_event(EventSpec::Line { side, gamma, v_tau, slope: opt.slope });
    r.exact = phi.claims_equality() && opt.attained;
    Ok(r)
}

/// Bound for the vee boundary `γ (V_τ ∨ V_t)`.
pub fn vee_bound(phi: &MgfBound, gamma: f64, v_tau: f64, side: Side, tol: f64) -> Result<BoundReport> {
    let mut r = eta_vee(phi, gamma, 0.0, v_tau, side, tol)?;
    r.inequality = pick(side, InequalityId::VeeUpper, InequalityId::VeeLower);
    r.params.eta = None;
    Ok(r)
}

/// Bounds for the η-shifted ray `η + γ V_t` and vee `η + γ (V_τ ∨ V_t)`.
pub fn eta_bound(
    phi: &MgfBound,
    gamma: f64,
    eta: f64,
    v_tau: f64,
    side: Side,
    variant: EtaVariant,
    tol: f64,
) -> Result<BoundReport> {
    match variant {
        EtaVariant::Ray => eta_ray(phi, gamma, eta, side, tol),
        EtaVariant::Vee => eta_vee(phi, gamma, eta, v_tau, side, tol),
    }
}

/// The feasible set `{s : φ(±s) <= γ s}` on one side.
enum Feasible {
    Empty,
    /// `(0, sup]`, or `(0, edge)` when `closed` is false.
    Interval { sup: Radius, closed: bool },
    /// `φ(s)/s` is not monotone; the set is only known on a grid.
    Grid,
}

fn feasible_set(phi: &MgfBound, gamma: f64, side: Side, tol: f64) -> Result<Feasible> {
    match optimize::solve_slope_root(phi, gamma, side, tol) {
        Ok(root) => Ok(match root.s_root {
            RootPoint::Empty => Feasible::Empty,
            RootPoint::Interior(s) => Feasible::Interval { sup: Radius::Finite(s), closed: true },
            RootPoint::Edge(r) => Feasible::Interval { sup: r, closed: false },
        }),
        Err(Error::MonotonicityViolation(_)) => Ok(Feasible::Grid),
        Err(e) => Err(e),
    }
}

const FALLBACK_GRID: usize = 20_000;

fn fallback_grid(radius: Radius) -> impl Iterator<Item = f64> {
    let n = FALLBACK_GRID;
    (1..=n).map(move |i| match radius {
        Radius::Finite(r) => r * i as f64 / (n + 1) as f64,
        Radius::Infinite => math::pow(10.0, -6.0 + 12.0 * (i - 1) as f64 / (n - 1) as f64),
    })
}

fn vacuous(mut r: BoundReport) -> BoundReport {
    r.vacuous = true;
    r.bound = 1.0;
    r
}

fn eta_ray(phi: &MgfBound, gamma: f64, eta: f64, side: Side, tol: f64) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    require_nonneg("eta", eta)?;
    if !phi.supports(side) {
        return Err(Error::UnsupportedSide(side));
    }
    let id = pick(side, InequalityId::EtaRayUpper, InequalityId::EtaRayLower);
    let params = BoundParams { gamma: Some(gamma), eta: Some(eta), side: Some(side), phi: Some(phi.kind()), ..Default::default() };
    let event = EventSpec::Ray { side, gamma, eta };
    let (sup, restricted, interior) = match feasible_set(phi, gamma, side, tol)? {
        Feasible::Empty => return Ok(vacuous(BoundReport::from_log(id, 0.0, params).with_event(event))),
        Feasible::Interval { sup, closed } => (sup, true, closed),
        Feasible::Grid => {
            let obj = TailObjective::new(phi, side, gamma);
            let sup = fallback_grid(phi.radius(side)).filter(|&s| obj.exponent(s) <= 0.0).fold(None, |_, s| Some(s));
            match sup {
                None => return Ok(vacuous(BoundReport::from_log(id, 0.0, params).with_event(event))),
                Some(s) => (Radius::Finite(s), false, false),
            }
        }
    };
    let log_raw = match sup {
        Radius::Finite(s) => -eta * s,
        Radius::Infinite if eta > 0.0 => f64::NEG_INFINITY,
        Radius::Infinite => 0.0,
    };
    let s_point = if interior { SPoint::At(sup.as_f64()) } else { SPoint::Edge(sup) };
    let mut r = BoundReport::from_log(id, log_raw, params).with_s(s_point).with_event(event);
    r.restricted = restricted;
    r.exact = phi.claims_equality() && interior;
    Ok(r)
}

fn eta_vee(phi: &MgfBound, gamma: f64, eta: f64, v_tau: f64, side: Side, tol: f64) -> Result<BoundReport> {
    require_positive("gamma", gamma)?;
    require_nonneg("eta", eta)?;
    require_nonneg("v_tau", v_tau)?;
    if !phi.supports(side) {
        return Err(Error::UnsupportedSide(side));
    }
    let id = pick(side, InequalityId::EtaVeeUpper, InequalityId::EtaVeeLower);
    let mut params = base_params(phi, gamma, v_tau, side);
    params.eta = Some(eta);
    let event = EventSpec::Vee { side, gamma, v_tau, eta };
    let obj = TailObjective { phi, side, gamma, eta, weight: v_tau };

    let (res, restricted) = match feasible_set(phi, gamma, side, tol)? {
        Feasible::Empty => return Ok(vacuous(BoundReport::from_log(id, 0.0, params).with_event(event))),
        Feasible::Interval { sup, closed } => (minimize_objective(&obj, sup, closed, tol), true),
        Feasible::Grid if eta == 0.0 => {
            // Without the η factor the infimum may run over the whole side.
            (minimize_objective(&obj, phi.radius(side), false, tol), false)
        }
        Feasible::Grid => {
            let best = fallback_grid(phi.radius(side))
                .filter(|&s| obj.exponent(s) <= 0.0)
                .map(|s| (s, obj.value(s)))
                .fold(None, |acc: Option<(f64, f64)>, (s, v)| match acc {
                    Some((_, bv)) if bv <= v => acc,
                    _ => Some((s, v)),
                });
            match best {
                None => return Ok(vacuous(BoundReport::from_log(id, 0.0, params).with_event(event))),
                Some((s, value)) => (
                    optimize::OptResult { s_opt: Argmin::Interior(s), value, slope: obj.ratio(s), attained: true },
                    false,
                ),
            }
        }
    };
    let s_point = match res.s_opt {
        Argmin::Interior(s) => SPoint::At(s),
        Argmin::Edge(r) => SPoint::Edge(r),
        Argmin::Origin => SPoint::Origin,
    };
    let mut r = BoundReport::from_log(id, res.value.min(0.0), params).with_s(s_point).with_event(event);
    r.restricted = restricted;
    Ok(r)
}
