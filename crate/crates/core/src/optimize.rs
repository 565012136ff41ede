//! One-dimensional minimization and root finding on `φ`-derived objectives.
//!
//! The objectives here are convex in `s` whenever `φ` is, so a derivative
//! bisection (when `φ'` is known) or a golden-section search finds the
//! global minimizer on a bracket. Brackets on infinite domains are grown by
//! doubling until the objective turns upward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::mgf::{MgfBound, Radius, Side};

/// Default absolute tolerance on `s`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest bracket explored on an infinite domain before declaring a
/// boundary infimum.
const S_MAX: f64 = 1e9;
const MAX_ITER: usize = 400;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Where the infimum of a tail objective sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmin {
    /// Attained at an interior point.
    Interior(f64),
    /// Approached as `s` tends to the domain edge.
    Edge(Radius),
    /// `φ(s) >= γ s` near zero: the infimum is `0`, approached at the origin.
    Origin,
}

impl Argmin {
    pub fn value(self) -> Option<f64> {
        match self {
            Argmin::Interior(s) => Some(s),
            Argmin::Edge(r) => Some(r.as_f64()),
            Argmin::Origin => None,
        }
    }
}

/// Result of [`minimize_tail_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub s_opt: Argmin,
    /// Infimum of `φ(±s) - γ s`.
    pub value: f64,
    /// `φ(±s*) / s*`, or the edge limit of `φ(±s) / s`.
    pub slope: f64,
    pub attained: bool,
}

impl OptResult {
    /// True when the optimizer reported the "no decrease" signal.
    pub fn no_decrease(&self) -> bool {
        matches!(self.s_opt, Argmin::Origin)
    }
}

/// Location of the largest usable `s` (`a★` or `b★`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPoint {
    /// Interior solution of `φ(±s)/s = γ`.
    Interior(f64),
    /// The boundary limit of `φ(±s)/s` does not exceed `γ`: the whole side is feasible.
    Edge(Radius),
    /// `φ(±s) > γ s` everywhere on the side.
    Empty,
}

impl RootPoint {
    /// Supremum of the feasible set `{s : φ(±s) <= γ s}`; `None` when empty.
    pub fn sup(self) -> Option<f64> {
        match self {
            RootPoint::Interior(s) => Some(s),
            RootPoint::Edge(r) => Some(r.as_f64()),
            RootPoint::Empty => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeRoot {
    pub s_root: RootPoint,
    pub side: Side,
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Only interior points are evaluated. Ties go to the left half so flat
/// minima resolve to the smallest minimizer. After convergence a coarse probe
/// of the bracket reports [`Error::NotUnimodal`] when it finds a strictly
/// lower value.
pub fn golden_or_bisect_min<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    check_bracket(lo, hi, tol)?;
    let (x, fx) = golden_core(&f, lo, hi, tol);
    let probes = 64;
    for i in 1..probes {
        let p = lo + (hi - lo) * i as f64 / probes as f64;
        let fp = f(p);
        if fp < fx - 1e-9 * (1.0 + fx.abs()) {
            return Err(Error::NotUnimodal { at: p, value: fp });
        }
    }
    Ok((x, fx))
}

/// Minimizes a convex `f` through bisection on the sign of its derivative.
///
/// Returns the smallest `x` (to within `tol`) with `f'(x) >= 0`; when the
/// derivative stays negative on the whole bracket the right end is returned.
pub fn bisect_min<F, D>(f: F, df: D, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_bracket(lo, hi, tol)?;
    let x = bisect_sign(&df, lo, hi, tol);
    Ok((x, f(x)))
}

fn check_bracket(lo: f64, hi: f64, tol: f64) -> Result<()> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("bracket [{lo}, {hi}] is empty or unbounded")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn golden_core<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a) > tol && iter < MAX_ITER {
        // NaN/inf on the right (e.g. near a pole) pushes the search left.
        if !(fd < fc) {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Smallest point in `[lo, hi]` where the non-decreasing `g` becomes `>= 0`.
fn bisect_sign<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if g(hi) < 0.0 {
        return hi;
    }
    let mut iter = 0;
    while hi - lo > tol && iter < MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // NaN counts as "non-negative" so poles stay on the right.
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    0.5 * (lo + hi)
}

/// Convex objective `w (φ(±s) - γ s) - η s` on `s > 0`.
#[derive(Clone, Copy)]
pub(crate) struct TailObjective<'a> {
    pub phi: &'a MgfBound,
    pub side: Side,
    pub gamma: f64,
    pub eta: f64,
    pub weight: f64,
}

impl<'a> TailObjective<'a> {
    pub fn new(phi: &'a MgfBound, side: Side, gamma: f64) -> Self {
        TailObjective { phi, side, gamma, eta: 0.0, weight: 1.0 }
    }

    pub fn phi_at(&self, s: f64) -> f64 {
        self.phi.eval_unchecked(self.side.sign() * s)
    }

    pub fn value(&self, s: f64) -> f64 {
        self.weight * (self.phi_at(s) - self.gamma * s) - self.eta * s
    }

    pub fn deriv(&self, s: f64) -> f64 {
        let sign = self.side.sign();
        self.weight * (sign * self.phi.deriv_unchecked(sign * s) - self.gamma) - self.eta
    }

    /// The `φ(±s) - γ s` part, without weight or `η`.
    pub fn exponent(&self, s: f64) -> f64 {
        self.phi_at(s) - self.gamma * s
    }

    pub fn ratio(&self, s: f64) -> f64 {
        self.phi_at(s) / s
    }
}

/// Minimizes a [`TailObjective`] on `(0, limit)`, or `(0, limit]` when
/// `closed` is set and the limit is finite.
pub(crate) fn minimize_objective(obj: &TailObjective<'_>, limit: Radius, closed: bool, tol: f64) -> OptResult {
    let hi = match limit {
        Radius::Finite(r) => r,
        Radius::Infinite => match grow_bracket(obj) {
            Some(hi) => hi,
            None => {
                // Still decreasing at S_MAX: the infimum sits at the infinite edge.
                let s = S_MAX;
                let slope = 2.0 * obj.ratio(2.0 * s) - obj.ratio(s);
                return OptResult {
                    s_opt: Argmin::Edge(Radius::Infinite),
                    value: obj.value(2.0 * s),
                    slope,
                    attained: false,
                };
            }
        },
    };

    let x = if obj.phi.has_derivative() {
        bisect_sign(&|s| obj.deriv(s), 0.0, hi, tol)
    } else {
        golden_core(&|s| obj.value(s), 0.0, hi, tol).0
    };

    let near_edge = hi - x <= 4.0 * tol;
    if near_edge && limit.is_finite() {
        if closed {
            return interior(obj, hi);
        }
        if drifts_to_edge(obj, hi) {
            return edge_limit(obj, hi);
        }
    }
    if x <= 0.0 {
        return interior(obj, tol.min(hi * 0.5));
    }
    interior(obj, x)
}

fn interior(obj: &TailObjective<'_>, s: f64) -> OptResult {
    OptResult { s_opt: Argmin::Interior(s), value: obj.value(s), slope: obj.ratio(s), attained: true }
}

/// Doubles `S` from 1 until the objective's forward difference turns positive.
fn grow_bracket(obj: &TailObjective<'_>) -> Option<f64> {
    let mut s = 1.0;
    let mut fs = obj.value(s);
    while s <= S_MAX {
        let f2 = obj.value(2.0 * s);
        if !(f2 <= fs) {
            return Some(2.0 * s);
        }
        s *= 2.0;
        fs = f2;
    }
    None
}

/// Three refinement rounds on `s = R (1 - 2^-k)`: true when the objective
/// keeps decreasing toward the edge.
fn drifts_to_edge(obj: &TailObjective<'_>, r: f64) -> bool {
    let mut prev = obj.value(r * (1.0 - math::ldexp(1.0, -20)));
    for k in 21..24 {
        let cur = obj.value(r * (1.0 - math::ldexp(1.0, -k)));
        if !(cur < prev) {
            return false;
        }
        prev = cur;
    }
    true
}

/// Edge infimum and the limit of `φ/s`, by Richardson extrapolation on
/// `s_k = R (1 - 2^-k)`.
fn edge_limit(obj: &TailObjective<'_>, r: f64) -> OptResult {
    let s1 = r * (1.0 - math::ldexp(1.0, -24));
    let s2 = r * (1.0 - math::ldexp(1.0, -25));
    let value = 2.0 * obj.value(s2) - obj.value(s1);
    let slope = 2.0 * obj.ratio(s2) - obj.ratio(s1);
    OptResult { s_opt: Argmin::Edge(Radius::Finite(r)), value: value.min(obj.value(s2)), slope, attained: false }
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::DomainViolation(alloc::format!("gamma must be positive and finite, got {gamma}")));
    }
    Ok(())
}

/// Probe point for the "φ below γ|s| near the origin" precondition.
pub(crate) fn origin_probe(phi: &MgfBound, side: Side) -> f64 {
    1e-6 * phi.radius(side).as_f64().min(1.0)
}

/// Infimum of `φ(s) - γ s` over `(0, b)` (upper) or `φ(-s) - γ s` over
/// `(0, a)` (lower), together with the continuation slope `β(γ)` / `α(γ)`.
///
/// When `φ(±ε) >= γ ε` at the probe point the objective does not decrease
/// from the origin; the result then carries [`Argmin::Origin`] with value `0`.
pub fn minimize_tail_exponent(phi: &MgfBound, gamma: f64, side: Side, tol: f64) -> Result<OptResult> {
    validate_gamma(gamma)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance must be positive, got {tol}")));
    }
    if !phi.supports(side) {
        return Err(Error::UnsupportedSide(side));
    }
    let obj = TailObjective::new(phi, side, gamma);
    let eps = origin_probe(phi, side);
    if obj.phi_at(eps) >= gamma * eps {
        return Ok(OptResult { s_opt: Argmin::Origin, value: 0.0, slope: obj.ratio(eps), attained: false });
    }
    let mut res = minimize_objective(&obj, phi.radius(side), false, tol);
    if res.value > 0.0 {
        res.value = 0.0;
    }
    Ok(res)
}

/// Number of probe points used to check that `φ(±s)/s` is non-decreasing.
const MONOTONE_PROBES: usize = 96;

/// Solves `φ(±s)/s = γ` for `b★` (upper) or `a★` (lower).
pub fn solve_slope_root(phi: &MgfBound, gamma: f64, side: Side, tol: f64) -> Result<SlopeRoot> {
    validate_gamma(gamma)?;
    if !phi.supports(side) {
        return Err(Error::UnsupportedSide(side));
    }
    let obj = TailObjective::new(phi, side, gamma);
    check_ratio_monotone(&obj)?;

    let radius = phi.radius(side);
    let eps = origin_probe(phi, side);
    let h = |s: f64| obj.ratio(s) - gamma;
    if h(eps) > 0.0 {
        return Ok(SlopeRoot { s_root: RootPoint::Empty, side });
    }
    let hi = match radius {
        Radius::Finite(r) => {
            let s1 = r * (1.0 - math::ldexp(1.0, -30));
            let s2 = r * (1.0 - math::ldexp(1.0, -31));
            let (g1, g2) = (obj.ratio(s1), obj.ratio(s2));
            let limit = if g1.is_finite() && g2.is_finite() { 2.0 * g2 - g1 } else { f64::INFINITY };
            if limit <= gamma {
                return Ok(SlopeRoot { s_root: RootPoint::Edge(radius), side });
            }
            r
        }
        Radius::Infinite => {
            let mut hi = 1.0;
            while !(h(hi) > 0.0) {
                hi *= 2.0;
                if hi > S_MAX {
                    return Ok(SlopeRoot { s_root: RootPoint::Edge(Radius::Infinite), side });
                }
            }
            hi
        }
    };
    // Bisection keeping h(lo) <= 0 so the returned point is feasible.
    let (mut lo, mut up) = (eps, hi);
    let mut iter = 0;
    while up - lo > tol.min(1e-13 * up.max(1.0)).max(f64::EPSILON * up) && iter < MAX_ITER {
        let mid = 0.5 * (lo + up);
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
        iter += 1;
    }
    Ok(SlopeRoot { s_root: RootPoint::Interior(lo), side })
}

pub(crate) fn probe_grid(radius: Radius) -> impl Iterator<Item = f64> {
    let n = MONOTONE_PROBES;
    (1..=n).map(move |i| match radius {
        Radius::Finite(r) => r * i as f64 / (n + 1) as f64,
        Radius::Infinite => {
            // log-spaced over [1e-6, 1e6]
            let t = (i - 1) as f64 / (n - 1) as f64;
            math::pow(10.0, -6.0 + 12.0 * t)
        }
    })
}

/// True when `φ(±s)/s` is non-decreasing on the probe grid.
pub fn ratio_is_monotone(phi: &MgfBound, side: Side) -> bool {
    check_ratio_monotone(&TailObjective::new(phi, side, 1.0)).is_ok()
}

fn check_ratio_monotone(obj: &TailObjective<'_>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for s in probe_grid(obj.phi.radius(obj.side)) {
        let g = obj.ratio(s);
        if g.is_nan() || g < prev - 1e-12 * (1.0 + prev.abs()) {
            return Err(Error::MonotonicityViolation(s));
        }
        if g.is_finite() {
            prev = g;
        } else {
            prev = f64::INFINITY;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgf::{make_phi, PhiKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_quadratic_vertex() {
        let (x, fx) = golden_or_bisect_min(|s| (s - 1.0) * (s - 1.0), 0.0, 3.0, 1e-8).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fx, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_shifted_quadratic() {
        let (x, fx) = golden_or_bisect_min(|s| s * s / 2.0 - 2.0 * s, 0.0, 10.0, 1e-10).unwrap();
        assert_abs_diff_eq!(x, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fx, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_and_bisection_on_exp_objective() {
        let f = |s: f64| s.exp() - 1.0 - s - s;
        let (x, _) = golden_or_bisect_min(f, 0.0, 5.0, 1e-10).unwrap();
        assert_abs_diff_eq!(x, 2f64.ln(), epsilon = 1e-6);
        let (x, fx) = bisect_min(f, |s: f64| s.exp() - 2.0, 0.0, 5.0, 1e-12).unwrap();
        assert_abs_diff_eq!(x, 2f64.ln(), epsilon = 1e-11);
        assert_abs_diff_eq!(fx, 1.0 - 2.0 * 2f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn golden_reports_second_basin() {
        // Golden section settles in the basin near -1 (f ~ 0.3); the probe
        // finds the deeper one near +1 (f ~ -0.3).
        let f = |x: f64| (x * x - 1.0).powi(2) - 0.3 * x;
        let err = golden_or_bisect_min(f, -2.0, 1.6, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NotUnimodal { .. }));
    }

    #[test]
    fn bad_brackets_are_rejected() {
        assert!(golden_or_bisect_min(|s| s, 1.0, 1.0, 1e-6).is_err());
        assert!(golden_or_bisect_min(|s| s, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_closed_form() {
        let phi = make_phi(PhiKind::Gaussian { v: 1.0 }).unwrap();
        let r = minimize_tail_exponent(&phi, 2.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert!(r.attained);
        assert_abs_diff_eq!(r.s_opt.value().unwrap(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.value, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.slope, 1.0, epsilon = 1e-9);
        let r = minimize_tail_exponent(&phi, 2.0, Side::Lower, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.s_opt.value().unwrap(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn cbb_and_poisson_closed_forms() {
        let phi = make_phi(PhiKind::CbbExp { b: 1.0 }).unwrap();
        let r = minimize_tail_exponent(&phi, 1.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.s_opt.value().unwrap(), 2f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(r.value, -0.386_294_361_119_890_6, epsilon = 1e-12);

        let phi = make_phi(PhiKind::PoissonCentered { lambda: 1.0 }).unwrap();
        let r = minimize_tail_exponent(&phi, 1.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.s_opt.value().unwrap(), 2f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(r.slope, 0.442_695_040_888_963_4, epsilon = 1e-9);
    }

    #[test]
    fn no_decrease_signal() {
        // φ(s) = s²/2 + s is >= γ s for γ = 0.5 near the origin.
        let phi = MgfBound::custom(Radius::Infinite, Radius::Infinite, |s| s * s / 2.0 + s.abs()).unwrap();
        let r = minimize_tail_exponent(&phi, 0.5, Side::Upper, DEFAULT_TOL).unwrap();
        assert!(r.no_decrease());
        assert_eq!(r.value, 0.0);
        assert!(!r.attained);
    }

    #[test]
    fn custom_without_derivative_uses_golden_section() {
        let phi = MgfBound::custom(Radius::Infinite, Radius::Infinite, |s| s * s / 2.0).unwrap();
        let r = minimize_tail_exponent(&phi, 3.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.s_opt.value().unwrap(), 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.value, -4.5, epsilon = 1e-10);
    }

    #[test]
    fn finite_edge_infimum() {
        // φ(s) = s² on (0, 1) with γ = 5: decreasing all the way to the edge.
        let phi = MgfBound::custom(Radius::Finite(1.0), Radius::Finite(1.0), |s| s * s).unwrap();
        let r = minimize_tail_exponent(&phi, 5.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert_eq!(r.s_opt, Argmin::Edge(Radius::Finite(1.0)));
        assert!(!r.attained);
        assert_abs_diff_eq!(r.value, -4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.slope, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn infinite_edge_infimum() {
        // Hoeffding φ(s)/s tends to 1 - μ = 0.5 < γ: decreasing forever.
        let phi = make_phi(PhiKind::HoeffdingBernoulli { mu: 0.5 }).unwrap();
        let r = minimize_tail_exponent(&phi, 0.8, Side::Upper, DEFAULT_TOL).unwrap();
        assert_eq!(r.s_opt, Argmin::Edge(Radius::Infinite));
        assert!(r.value < -1e8);
        assert_abs_diff_eq!(r.slope, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn invalid_gamma() {
        let phi = make_phi(PhiKind::Gaussian { v: 1.0 }).unwrap();
        assert!(matches!(minimize_tail_exponent(&phi, 0.0, Side::Upper, 1e-10), Err(Error::DomainViolation(_))));
        assert!(matches!(solve_slope_root(&phi, -1.0, Side::Upper, 1e-10), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn slope_root_examples() {
        let phi = make_phi(PhiKind::Gaussian { v: 1.0 }).unwrap();
        let r = solve_slope_root(&phi, 3.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.s_root.sup().unwrap(), 6.0, epsilon = 1e-9);

        let phi = make_phi(PhiKind::Bernstein { b: 1.0 }).unwrap();
        for gamma in [1.0, 10.0, 1e3, 1e6] {
            let r = solve_slope_root(&phi, gamma, Side::Upper, DEFAULT_TOL).unwrap();
            match r.s_root {
                RootPoint::Interior(s) => assert!(s < 3.0),
                other => panic!("expected interior root, got {other:?}"),
            }
        }

        // (e^s - 1 - s)/s = 1, bisection oracle in 30-digit arithmetic.
        let phi = make_phi(PhiKind::CbbExp { b: 1.0 }).unwrap();
        let r = solve_slope_root(&phi, 1.0, Side::Upper, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(r.s_root.sup().unwrap(), 1.256_431_208_626_169_7, epsilon = 1e-9);
    }

    #[test]
    fn slope_root_edge_and_empty() {
        let phi = make_phi(PhiKind::HoeffdingBernoulli { mu: 0.3 }).unwrap();
        let r = solve_slope_root(&phi, 0.9, Side::Upper, DEFAULT_TOL).unwrap();
        assert_eq!(r.s_root, RootPoint::Edge(Radius::Infinite));

        let phi = MgfBound::custom(Radius::Infinite, Radius::Infinite, |s| s.abs() + s * s).unwrap();
        let r = solve_slope_root(&phi, 0.5, Side::Upper, DEFAULT_TOL).unwrap();
        assert_eq!(r.s_root, RootPoint::Empty);
    }

    #[test]
    fn slope_root_rejects_non_monotone_ratio() {
        // φ(s)/s = s (s - 2)² + 0.1 dips between 2/3 and 2.
        let phi = MgfBound::custom(Radius::Infinite, Radius::Infinite, |s| s * (s.abs() * (s.abs() - 2.0).powi(2) + 0.1))
            .unwrap();
        assert!(matches!(
            solve_slope_root(&phi, 1.0, Side::Upper, DEFAULT_TOL),
            Err(Error::MonotonicityViolation(_))
        ));
    }
}
