//! One-parameter exponential families `f(y; θ) = w(y) exp(u(θ) y - v(θ))`
//! with `v'(θ) = θ u'(θ)`, and the Chernoff-type line bound on their sums.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{require_positive, BoundParams, BoundReport, InequalityId, SPoint};
use crate::error::{Error, Result};
use crate::math;
use crate::mgf::Side;
use crate::validate::EventSpec;

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Built-in families, for configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpFamilyKind {
    /// Bernoulli with success probability `θ`.
    Bernoulli,
    /// Poisson with mean `θ`.
    Poisson,
    /// Normal with mean `θ` and unit variance.
    Normal,
    /// Exponential with mean `θ`.
    Exponential,
}

#[derive(Clone)]
pub struct ExpFamily {
    name: String,
    u: Func,
    v: Func,
    lo: f64,
    hi: f64,
}

impl fmt::Debug for ExpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpFamily").field("name", &self.name).field("theta_domain", &(self.lo, self.hi)).finish()
    }
}

const CHECK_POINTS: usize = 64;
const DERIV_TOL: f64 = 1e-6;

impl ExpFamily {
    /// Builds a family on the open interval `(lo, hi)`, checking
    /// `v'(θ) = θ u'(θ)` by central differences on an interior grid.
    pub fn new<U, V>(name: &str, u: U, v: V, lo: f64, hi: f64) -> Result<Self>
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
        V: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidParameter(alloc::format!("empty parameter interval ({lo}, {hi})")));
        }
        let fam = ExpFamily { name: name.to_string(), u: Arc::new(u), v: Arc::new(v), lo, hi };
        for theta in fam.check_grid() {
            let du = fam.central_diff(&*fam.u, theta);
            let dv = fam.central_diff(&*fam.v, theta);
            let rhs = theta * du;
            if !(dv.is_finite() && rhs.is_finite()) || (dv - rhs).abs() > DERIV_TOL * (dv.abs() + rhs.abs()) + 1e-9 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "family `{name}`: dv/dθ = {dv} but θ du/dθ = {rhs} at θ = {theta}"
                )));
            }
        }
        Ok(fam)
    }

    pub fn builtin(kind: ExpFamilyKind) -> Self {
        let fam = match kind {
            ExpFamilyKind::Bernoulli => {
                Self::new("bernoulli", |t| math::ln(t / (1.0 - t)), |t| -math::ln_1p(-t), 0.0, 1.0)
            }
            ExpFamilyKind::Poisson => Self::new("poisson", math::ln, |t| t, 0.0, f64::INFINITY),
            ExpFamilyKind::Normal => Self::new("normal", |t| t, |t| 0.5 * t * t, f64::NEG_INFINITY, f64::INFINITY),
            ExpFamilyKind::Exponential => Self::new("exponential", |t| -1.0 / t, math::ln, 0.0, f64::INFINITY),
        };
        fam.expect("built-in families satisfy the derivative identity")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theta_domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.lo && theta < self.hi
    }

    pub fn u(&self, theta: f64) -> f64 {
        (self.u)(theta)
    }

    pub fn v(&self, theta: f64) -> f64 {
        (self.v)(theta)
    }

    /// `M(z, θ) = exp(u(θ) z - v(θ)) / exp(u(z) z - v(z))`.
    pub fn m_factor(&self, z: f64, theta: f64) -> f64 {
        math::exp(self.log_m_factor(z, theta))
    }

    fn log_m_factor(&self, z: f64, theta: f64) -> f64 {
        (self.u(theta) - self.u(z)) * z - self.v(theta) + self.v(z)
    }

    /// Slope `(v(z) - v(θ)) / (u(z) - u(θ))` of `ρ` in `n`.
    pub fn rho_slope(&self, z: f64, theta: f64) -> f64 {
        (self.v(z) - self.v(theta)) / (self.u(z) - self.u(theta))
    }

    /// `ρ(z, θ, m, n) = m z + (n - m) (v(z) - v(θ)) / (u(z) - u(θ))`.
    pub fn rho(&self, z: f64, theta: f64, m: f64, n: f64) -> f64 {
        m * z + (n - m) * self.rho_slope(z, theta)
    }

    fn check_grid(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (true, false) => (self.lo, self.lo + 20.0),
            (false, true) => (self.hi - 20.0, self.hi),
            (false, false) => (-10.0, 10.0),
        };
        (1..=CHECK_POINTS).map(move |i| a + (b - a) * i as f64 / (CHECK_POINTS + 1) as f64)
    }

    fn central_diff(&self, f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        let room = (x - self.lo).min(self.hi - x);
        let h = (1e-4 * x.abs().max(1.0)).min(0.01 * room);
        let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        (4.0 * d(0.5 * h) - d(h)) / 3.0
    }
}

/// `[M(θ ± γ, θ)]^m` for the sum of `m` samples crossing `ρ(θ ± γ, θ, m, n)`.
///
/// `slope_used` is the slope of `ρ` in `n` and `intercept` its value `m z`
/// at `n = m`. The attached event is the same line for the centered sum
/// `X_n - n θ` with variance proxy `n`.
pub fn expfam_bound(fam: &ExpFamily, theta: f64, gamma: f64, m: u64, side: Side) -> Result<BoundReport> {
    if !fam.contains(theta) {
        return Err(Error::DomainViolation(alloc::format!("theta = {theta} lies outside the family's parameter interval")));
    }
    require_positive("gamma", gamma)?;
    if m == 0 {
        return Err(Error::DomainViolation("m must be a positive integer".into()));
    }
    let z = theta + side.sign() * gamma;
    if !fam.contains(z) {
        return Err(Error::DomainViolation(alloc::format!(
            "theta {} gamma = {z} lies outside the family's parameter interval",
            if side == Side::Upper { "+" } else { "-" }
        )));
    }
    let mf = m as f64;
    let k = fam.rho_slope(z, theta);
    let centered_slope = side.sign() * (k - theta);
    let params = BoundParams {
        gamma: Some(gamma),
        m: Some(m),
        theta: Some(theta),
        side: Some(side),
        family: Some(fam.name.clone()),
        ..Default::default()
    };
    let id = match side {
        Side::Upper => InequalityId::ExpFamUpper,
        Side::Lower => InequalityId::ExpFamLower,
    };
    let r = BoundReport::from_log(id, mf * fam.log_m_factor(z, theta), params)
        .with_s(SPoint::At(side.sign() * (fam.u(z) - fam.u(theta))))
        .with_slope(k)
        .with_event(EventSpec::Line { side, gamma, v_tau: mf, slope: centered_slope });
    Ok(BoundReport { intercept: Some(mf * z), ..r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bernoulli_examples() {
        let fam = ExpFamily::builtin(ExpFamilyKind::Bernoulli);
        let r = expfam_bound(&fam, 0.5, 0.3, 1, Side::Upper).unwrap();
        assert_relative_eq!(r.bound, 0.824_692_444_233_058_9, max_relative = 1e-13);
        assert_relative_eq!(fam.rho(0.8, 0.5, 2.0, 4.0), 2.921_928_094_887_362_4, max_relative = 1e-13);
        assert_eq!(fam.m_factor(0.5, 0.5), 1.0);
        assert!(matches!(expfam_bound(&fam, 0.5, 0.5, 1, Side::Upper), Err(Error::DomainViolation(_))));
        assert!(matches!(expfam_bound(&fam, 1.5, 0.1, 1, Side::Upper), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn normal_family_matches_gaussian_chernoff() {
        let fam = ExpFamily::builtin(ExpFamilyKind::Normal);
        let r = expfam_bound(&fam, 0.3, 0.7, 5, Side::Lower).unwrap();
        assert_relative_eq!(r.log_raw, -5.0 * 0.49 / 2.0, max_relative = 1e-13);
        let Some(EventSpec::Line { slope, .. }) = r.event else { panic!() };
        assert_relative_eq!(slope, 0.35, max_relative = 1e-12);
    }

    #[test]
    fn centered_slope_lies_between_zero_and_gamma() {
        for kind in [ExpFamilyKind::Bernoulli, ExpFamilyKind::Poisson, ExpFamilyKind::Normal, ExpFamilyKind::Exponential] {
            let fam = ExpFamily::builtin(kind);
            for &(theta, gamma) in &[(0.2, 0.1), (0.5, 0.3), (0.6, 0.35)] {
                for side in [Side::Upper, Side::Lower] {
                    if let Ok(r) = expfam_bound(&fam, theta, gamma, 3, side) {
                        let Some(EventSpec::Line { slope, .. }) = r.event else { panic!() };
                        assert!(slope > 0.0 && slope < gamma, "{kind:?} {side:?}: {slope}");
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_family_is_rejected() {
        let err = ExpFamily::new("bad", |t| t, |t| t * t, f64::NEG_INFINITY, f64::INFINITY).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
