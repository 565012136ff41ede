//! Catalog of `φ` functions: upper bounds on the log-MGF of centered
//! increments, normalized by the variance proxy.
//!
//! Every `φ` lives on an open domain `(-a, b)`, vanishes at the origin, is
//! non-negative and convex. [`check_phi_validity`] verifies those properties
//! on a grid at runtime.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::math;

/// Which tail a bound or optimization refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    /// `+1` for the upper tail, `-1` for the lower.
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

/// Radius of one side of an open domain, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn as_f64(self) -> f64 {
        match self {
            Radius::Finite(r) => r,
            Radius::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Radius::Finite(_))
    }

    /// Strict containment: `s < radius`.
    pub fn contains(self, s: f64) -> bool {
        match self {
            Radius::Finite(r) => s < r,
            Radius::Infinite => s.is_finite(),
        }
    }
}

/// Parametric family selector for the built-in `φ` functions.
///
/// Serialized as a tagged record, e.g. `{ "kind": "bennett", "sigma2": 1.0, "b": 1.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiKind {
    /// `v s² / 2`: exact for Brownian increments with `v = 1`.
    Gaussian { v: f64 },
    /// Bennett's bound for a zero-mean variable with variance `sigma2` and `Y <= b`.
    /// Defined for all `s` but only a bound for `s >= 0`, so upper tail only.
    Bennett { sigma2: f64, b: f64 },
    /// `ln(1 - μ + μ e^s) - μ s` for variables in `[0, 1]` with mean `μ`.
    HoeffdingBernoulli { mu: f64 },
    /// `s² / 24` for the uniform law on `[-1/2, 1/2]`.
    Uniform24,
    /// `λ (e^s - 1 - s)`: exact for a centered Poisson process.
    PoissonCentered { lambda: f64 },
    /// `s² / (2 (1 - b s / 3))` on `(0, 3 / b)`, upper tail only.
    Bernstein { b: f64 },
    /// `(e^{s b} - 1 - s b) / b²` for increments bounded above by `b`; upper tail only.
    CbbExp { b: f64 },
    /// User supplied evaluator, see [`MgfBound::custom`].
    Custom,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Builtin,
    Custom { phi: ScalarFn, deriv: Option<ScalarFn> },
}

/// A `φ` function with its open domain `(-a, b)`.
#[derive(Clone)]
pub struct MgfBound {
    kind: PhiKind,
    left: Radius,
    right: Radius,
    lower_supported: bool,
    claims_equality: bool,
    eval: Evaluator,
}

impl fmt::Debug for MgfBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MgfBound")
            .field("kind", &self.kind)
            .field("left", &self.left)
            .field("right", &self.right)
            .field("claims_equality", &self.claims_equality)
            .finish()
    }
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        bail!(InvalidParameter, "{name} must be a positive finite number, got {x}");
    }
    Ok(())
}

/// Builds the `φ` function for a built-in [`PhiKind`].
pub fn make_phi(kind: PhiKind) -> Result<MgfBound> {
    let left = Radius::Infinite;
    let mut right = Radius::Infinite;
    let mut lower_supported = true;
    match kind {
        PhiKind::Gaussian { v } => require_positive("v", v)?,
        PhiKind::Bennett { sigma2, b } => {
            require_positive("sigma2", sigma2)?;
            require_positive("b", b)?;
            lower_supported = false;
        }
        PhiKind::HoeffdingBernoulli { mu } => {
            if !(mu > 0.0 && mu < 1.0) {
                bail!(InvalidParameter, "mu must lie in (0, 1), got {mu}");
            }
        }
        PhiKind::Uniform24 => {}
        PhiKind::PoissonCentered { lambda } => require_positive("lambda", lambda)?,
        PhiKind::Bernstein { b } => {
            require_positive("b", b)?;
            right = Radius::Finite(3.0 / b);
            lower_supported = false;
        }
        PhiKind::CbbExp { b } => {
            require_positive("b", b)?;
            lower_supported = false;
        }
        PhiKind::Custom => {
            bail!(InvalidParameter, "custom phi functions are built with MgfBound::custom")
        }
    }
    let claims_equality = matches!(kind, PhiKind::Gaussian { .. } | PhiKind::PoissonCentered { .. });
    Ok(MgfBound {
        kind,
        left,
        right,
        lower_supported,
        claims_equality,
        eval: Evaluator::Builtin,
    })
}

impl MgfBound {
    /// Wraps a user supplied `φ` on `(-left, right)`.
    pub fn custom<F>(left: Radius, right: Radius, phi: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        for r in [left, right] {
            if let Radius::Finite(x) = r {
                require_positive("domain radius", x)?;
            }
        }
        Ok(MgfBound {
            kind: PhiKind::Custom,
            left,
            right,
            lower_supported: true,
            claims_equality: false,
            eval: Evaluator::Custom { phi: Arc::new(phi), deriv: None },
        })
    }

    /// Attaches an analytic derivative to a custom `φ`.
    pub fn with_derivative<D>(mut self, deriv: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Evaluator::Custom { deriv: d, .. } = &mut self.eval {
            *d = Some(Arc::new(deriv));
        }
        self
    }

    /// Marks a custom `φ` as the exact log-MGF of the increments.
    pub fn with_equality(mut self, claims_equality: bool) -> Self {
        self.claims_equality = claims_equality;
        self
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn claims_equality(&self) -> bool {
        self.claims_equality
    }

    /// Domain radius on one side: `b` for [`Side::Upper`], `a` for [`Side::Lower`].
    pub fn radius(&self, side: Side) -> Radius {
        match side {
            Side::Upper => self.right,
            Side::Lower => self.left,
        }
    }

    pub fn supports(&self, side: Side) -> bool {
        side == Side::Upper || self.lower_supported
    }

    pub fn has_derivative(&self) -> bool {
        match &self.eval {
            Evaluator::Builtin => true,
            Evaluator::Custom { deriv, .. } => deriv.is_some(),
        }
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        if s.is_nan() {
            bail!(DomainViolation, "phi evaluated at NaN");
        }
        if s < 0.0 && matches!(self.kind, PhiKind::Bernstein { .. }) {
            return Err(Error::UnsupportedSide(Side::Lower));
        }
        let ok = if s >= 0.0 { self.right.contains(s) } else { self.left.contains(-s) };
        if !ok {
            bail!(
                DomainViolation,
                "s = {s} lies outside the open domain (-{}, {})",
                self.left.as_f64(),
                self.right.as_f64()
            );
        }
        Ok(())
    }

    /// `φ(s)`, rejecting points outside the open domain.
    pub fn phi(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        Ok(self.eval_unchecked(s))
    }

    /// `φ'(s)` when an analytic derivative is known.
    pub fn phi_deriv(&self, s: f64) -> Option<Result<f64>> {
        if !self.has_derivative() {
            return None;
        }
        Some(self.check_domain(s).map(|_| self.deriv_unchecked(s)))
    }

    /// `φ(±s)` for `s > 0` on the requested side.
    pub fn phi_on(&self, side: Side, s: f64) -> Result<f64> {
        if !self.supports(side) {
            return Err(Error::UnsupportedSide(side));
        }
        self.phi(side.sign() * s)
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match &self.eval {
            Evaluator::Custom { phi, .. } => phi(s),
            Evaluator::Builtin => match self.kind {
                PhiKind::Gaussian { v } => 0.5 * v * s * s,
                PhiKind::Bennett { sigma2, b } => {
                    let denom = b * b + sigma2;
                    let lq = math::ln(b * b / denom) - sigma2 * s / b;
                    let lp = math::ln(sigma2 / denom) + b * s;
                    math::log_add_exp(lq, lp)
                }
                PhiKind::HoeffdingBernoulli { mu } => {
                    if s > 0.0 {
                        s + math::ln(mu + (1.0 - mu) * math::exp(-s)) - mu * s
                    } else {
                        math::ln_1p(mu * math::exp_m1(s)) - mu * s
                    }
                }
                PhiKind::Uniform24 => s * s / 24.0,
                PhiKind::PoissonCentered { lambda } => lambda * math::exp_m1_m_x(s),
                PhiKind::Bernstein { b } => s * s / (2.0 * (1.0 - b * s / 3.0)),
                PhiKind::CbbExp { b } => math::exp_m1_m_x(s * b) / (b * b),
                PhiKind::Custom => f64::NAN,
            },
        }
    }

    pub(crate) fn deriv_unchecked(&self, s: f64) -> f64 {
        match &self.eval {
            Evaluator::Custom { deriv, .. } => deriv.as_ref().map_or(f64::NAN, |d| d(s)),
            Evaluator::Builtin => match self.kind {
                PhiKind::Gaussian { v } => v * s,
                PhiKind::Bennett { sigma2, b } => {
                    // φ' = p b (e^{bs} - e^{-σ²s/b}) / M with M the mixture inside the log.
                    let denom = b * b + sigma2;
                    let lq = math::ln(b * b / denom) - sigma2 * s / b;
                    let lp = math::ln(sigma2 / denom) + b * s;
                    let lm = math::log_add_exp(lq, lp);
                    let wp = math::exp(lp - lm);
                    let wq = math::exp(lq - lm);
                    b * wp - (sigma2 / b) * wq
                }
                PhiKind::HoeffdingBernoulli { mu } => {
                    let w = if s > 0.0 {
                        mu / (mu + (1.0 - mu) * math::exp(-s))
                    } else {
                        mu * math::exp(s) / (1.0 + mu * math::exp_m1(s))
                    };
                    w - mu
                }
                PhiKind::Uniform24 => s / 12.0,
                PhiKind::PoissonCentered { lambda } => lambda * math::exp_m1(s),
                PhiKind::Bernstein { b } => {
                    let c = b / 3.0;
                    let d = 1.0 - c * s;
                    s * (2.0 - c * s) / (2.0 * d * d)
                }
                PhiKind::CbbExp { b } => math::exp_m1(s * b) / b,
                PhiKind::Custom => f64::NAN,
            },
        }
    }
}

/// Which invariant a grid point failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonZeroAtOrigin,
    Negative,
    NonConvex,
    DerivativeMismatch,
    NotFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub s: f64,
}

/// Outcome of [`check_phi_validity`]; an empty list means every check passed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub violations: Vec<Violation>,
}

impl DiagnosticReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

const CONVEXITY_SLACK: f64 = 1e-12;
const DERIV_REL_TOL: f64 = 1e-6;

/// Checks `φ(0) = 0`, non-negativity, midpoint convexity and (when an
/// analytic derivative exists) agreement with a central difference.
pub fn check_phi_validity(phi: &MgfBound, grid: &[f64]) -> Result<DiagnosticReport> {
    for &s in grid {
        phi.check_domain(s)?;
    }
    let mut pts: Vec<f64> = grid.to_vec();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();

    let mut report = DiagnosticReport::default();
    let mut push = |kind, s| report.violations.push(Violation { kind, s });

    if phi.check_domain(0.0).is_ok() {
        let at0 = phi.eval_unchecked(0.0);
        if at0.abs() > 1e-12 {
            push(ViolationKind::NonZeroAtOrigin, 0.0);
        }
    }

    let values: Vec<f64> = pts.iter().map(|&s| phi.eval_unchecked(s)).collect();
    for (&s, &v) in pts.iter().zip(&values) {
        if !v.is_finite() {
            push(ViolationKind::NotFinite, s);
        } else if v < -1e-12 {
            push(ViolationKind::Negative, s);
        }
    }

    for i in 0..pts.len().saturating_sub(1) {
        let (s0, s1) = (pts[i], pts[i + 1]);
        let (f0, f1) = (values[i], values[i + 1]);
        let mid = 0.5 * (s0 + s1);
        let fm = phi.eval_unchecked(mid);
        let chord = 0.5 * (f0 + f1);
        if fm.is_finite() && chord.is_finite() && fm > chord + CONVEXITY_SLACK * (1.0 + fm.abs()) {
            push(ViolationKind::NonConvex, mid);
        }
    }
    for i in 1..pts.len().saturating_sub(1) {
        let (s0, s1, s2) = (pts[i - 1], pts[i], pts[i + 1]);
        let (f0, f1, f2) = (values[i - 1], values[i], values[i + 1]);
        let lam = (s2 - s1) / (s2 - s0);
        let chord = lam * f0 + (1.0 - lam) * f2;
        if f1.is_finite() && chord.is_finite() && f1 > chord + CONVEXITY_SLACK * (1.0 + f1.abs()) {
            push(ViolationKind::NonConvex, s1);
        }
    }

    if phi.has_derivative() {
        for &s in &pts {
            let d = phi.deriv_unchecked(s);
            let fd = central_difference(phi, s);
            if let Some(fd) = fd {
                if !(d.is_finite() && (fd - d).abs() <= DERIV_REL_TOL * d.abs().max(1.0)) {
                    push(ViolationKind::DerivativeMismatch, s);
                }
            }
        }
    }
    Ok(report)
}

fn central_difference(phi: &MgfBound, s: f64) -> Option<f64> {
    // Step shrinks near a finite edge, where higher derivatives blow up.
    let edge = if s >= 0.0 { phi.right.as_f64() - s } else { phi.left.as_f64() + s };
    let mut h = (1e-4 * s.abs().max(1.0)).min(1e-2 * edge);
    let diff = |h: f64| (phi.eval_unchecked(s + h) - phi.eval_unchecked(s - h)) / (2.0 * h);
    for _ in 0..20 {
        if phi.check_domain(s - h).is_ok() && phi.check_domain(s + h).is_ok() {
            let v = (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
            return v.is_finite().then_some(v);
        }
        h *= 0.25;
    }
    None
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PhiKind::Gaussian { v } => write!(f, "gaussian(v={v})"),
            PhiKind::Bennett { sigma2, b } => write!(f, "bennett(sigma2={sigma2},b={b})"),
            PhiKind::HoeffdingBernoulli { mu } => write!(f, "hoeffding_bernoulli(mu={mu})"),
            PhiKind::Uniform24 => f.write_str("uniform24"),
            PhiKind::PoissonCentered { lambda } => write!(f, "poisson_centered(lambda={lambda})"),
            PhiKind::Bernstein { b } => write!(f, "bernstein(b={b})"),
            PhiKind::CbbExp { b } => write!(f, "cbb_exp(b={b})"),
            PhiKind::Custom => f.write_str("custom"),
        }
    }
}
