//! Seeded path generators.
//!
//! Every path is a pure function of `(spec, seed, path_index)`: each path
//! draws from its own ChaCha8 streams, so results do not depend on the order
//! or the thread in which paths are produced.

use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::mgf::{make_phi, MgfBound, PhiKind};

mod path;
mod stream;

pub use path::{generate, transform_exp_martingale, Interpolation, Path};
pub use stream::{PathPoint, PathStream};

/// Increment law for [`ProcessSpec::IidSum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepDist {
    Bernoulli { p: f64 },
    /// Uniform on `(-1/2, 1/2)`.
    Uniform,
    /// Finite support with the given probabilities.
    BoundedCustom { values: Vec<f64>, probs: Vec<f64> },
}

impl StepDist {
    pub fn mean(&self) -> f64 {
        match self {
            StepDist::Bernoulli { p } => *p,
            StepDist::Uniform => 0.0,
            StepDist::BoundedCustom { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            StepDist::Bernoulli { p } => p * (1.0 - p),
            StepDist::Uniform => 1.0 / 12.0,
            StepDist::BoundedCustom { values, probs } => {
                let m = self.mean();
                values.iter().zip(probs).map(|(v, p)| p * (v - m) * (v - m)).sum()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            StepDist::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidSpec(alloc::format!("bernoulli p must lie in [0, 1], got {p}")));
                }
            }
            StepDist::Uniform => {}
            StepDist::BoundedCustom { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::InvalidSpec("bounded_custom needs matching, non-empty values and probs".into()));
                }
                if values.iter().any(|v| !v.is_finite()) || probs.iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
                    return Err(Error::InvalidSpec("bounded_custom values must be finite and probs in [0, 1]".into()));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSpec(alloc::format!("bounded_custom probs sum to {total}, not 1")));
                }
            }
        }
        Ok(())
    }
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero_u32(x: &u32) -> bool {
    *x == 0
}

/// A process to simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    /// Centered partial sums `X_n = Σ (Y_i - μ)` with `V_n = n · v_per_step`.
    IidSum {
        dist: StepDist,
        n: u64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        v_per_step: f64,
    },
    /// Steps of `±1` with probability `p_move/2` each (else 0), plus `drift`.
    LazyWalk {
        p_move: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        drift: f64,
        steps: u64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        v_per_step: f64,
    },
    /// Poisson counting process on `[0, horizon]`, optionally centered to `N_t - λt`. `V_t = t`.
    PoissonCounting {
        lambda: f64,
        horizon: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        centered: bool,
    },
    /// Standard Brownian motion on a grid of step `dt / 2^refine`. `V_t = t`.
    ///
    /// Grid points shared between refinement levels carry identical values.
    Brownian {
        dt: f64,
        horizon: f64,
        #[serde(default, skip_serializing_if = "is_zero_u32")]
        refine: u32,
    },
    /// `Y_t = exp(s X_t - φ(s) V_t)` over a base process.
    ExpSupermartingale { base: Box<ProcessSpec>, s: f64, phi: PhiKind },
}

/// Drift class of the simulated process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MartingaleClass {
    Martingale,
    Supermartingale,
    Submartingale,
}

/// Largest refinement level accepted for Brownian paths.
pub const MAX_REFINE: u32 = 12;

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidSpec(alloc::format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::IidSum { dist, v_per_step, .. } => {
                dist.validate()?;
                positive("v_per_step", *v_per_step)
            }
            ProcessSpec::LazyWalk { p_move, drift, v_per_step, .. } => {
                if !(0.0..=1.0).contains(p_move) {
                    return Err(Error::InvalidSpec(alloc::format!("p_move must lie in [0, 1], got {p_move}")));
                }
                if !drift.is_finite() {
                    return Err(Error::InvalidSpec("drift must be finite".into()));
                }
                positive("v_per_step", *v_per_step)
            }
            ProcessSpec::PoissonCounting { lambda, horizon, .. } => {
                positive("lambda", *lambda)?;
                positive("horizon", *horizon)
            }
            ProcessSpec::Brownian { dt, horizon, refine } => {
                positive("dt", *dt)?;
                positive("horizon", *horizon)?;
                if *refine > MAX_REFINE {
                    return Err(Error::InvalidSpec(alloc::format!("refine must be at most {MAX_REFINE}, got {refine}")));
                }
                if horizon / dt > 1e12 {
                    return Err(Error::InvalidSpec("horizon / dt is too large".into()));
                }
                Ok(())
            }
            ProcessSpec::ExpSupermartingale { base, s, phi } => {
                base.validate()?;
                if matches!(**base, ProcessSpec::ExpSupermartingale { .. }) {
                    return Err(Error::InvalidSpec("exp_supermartingale cannot wrap another exp_supermartingale".into()));
                }
                let phi = make_phi(*phi).map_err(|e| Error::InvalidSpec(alloc::format!("phi: {e}")))?;
                phi.phi(*s).map_err(|e| Error::InvalidSpec(alloc::format!("s = {s}: {e}")))?;
                Ok(())
            }
        }
    }

    /// Last time on the path grid.
    pub fn horizon(&self) -> f64 {
        match self {
            ProcessSpec::IidSum { n, .. } => *n as f64,
            ProcessSpec::LazyWalk { steps, .. } => *steps as f64,
            ProcessSpec::PoissonCounting { horizon, .. } => *horizon,
            ProcessSpec::Brownian { dt, horizon, .. } => coarse_steps(*dt, *horizon) as f64 * dt,
            ProcessSpec::ExpSupermartingale { base, .. } => base.horizon(),
        }
    }

    /// The same process run to (at least) time `t`.
    pub fn with_horizon(&self, t: f64) -> ProcessSpec {
        let steps = math::ceil(t.max(0.0)) as u64;
        match self {
            ProcessSpec::IidSum { dist, v_per_step, .. } => {
                ProcessSpec::IidSum { dist: dist.clone(), n: steps, v_per_step: *v_per_step }
            }
            ProcessSpec::LazyWalk { p_move, drift, v_per_step, .. } => {
                ProcessSpec::LazyWalk { p_move: *p_move, drift: *drift, steps, v_per_step: *v_per_step }
            }
            ProcessSpec::PoissonCounting { lambda, centered, .. } => {
                ProcessSpec::PoissonCounting { lambda: *lambda, horizon: t, centered: *centered }
            }
            ProcessSpec::Brownian { dt, refine, .. } => ProcessSpec::Brownian { dt: *dt, horizon: t, refine: *refine },
            ProcessSpec::ExpSupermartingale { base, s, phi } => {
                ProcessSpec::ExpSupermartingale { base: Box::new(base.with_horizon(t)), s: *s, phi: *phi }
            }
        }
    }

    pub fn martingale_class(&self) -> MartingaleClass {
        match self {
            ProcessSpec::IidSum { .. } | ProcessSpec::Brownian { .. } => MartingaleClass::Martingale,
            ProcessSpec::LazyWalk { drift, .. } => {
                if *drift < 0.0 {
                    MartingaleClass::Supermartingale
                } else if *drift > 0.0 {
                    MartingaleClass::Submartingale
                } else {
                    MartingaleClass::Martingale
                }
            }
            ProcessSpec::PoissonCounting { centered: true, .. } => MartingaleClass::Martingale,
            ProcessSpec::PoissonCounting { centered: false, .. } => MartingaleClass::Submartingale,
            ProcessSpec::ExpSupermartingale { base, s, phi } => {
                if self.exp_is_exact(base, *s, phi) {
                    MartingaleClass::Martingale
                } else {
                    MartingaleClass::Supermartingale
                }
            }
        }
    }

    /// True when `φ` is the exact log-MGF of the base increments per unit of `V`.
    fn exp_is_exact(&self, base: &ProcessSpec, s: f64, phi: &PhiKind) -> bool {
        match (base, phi) {
            (ProcessSpec::Brownian { .. }, PhiKind::Gaussian { v }) => *v == 1.0,
            (ProcessSpec::PoissonCounting { lambda, centered: true, .. }, PhiKind::PoissonCentered { lambda: l }) => {
                lambda == l
            }
            (ProcessSpec::IidSum { dist: StepDist::Bernoulli { p }, v_per_step, .. }, PhiKind::HoeffdingBernoulli { mu }) => {
                p == mu && *v_per_step == 1.0
            }
            _ => s == 0.0,
        }
    }

    /// Whether the sample paths are continuous (Brownian, or transforms of it).
    pub fn is_continuous(&self) -> bool {
        match self {
            ProcessSpec::Brownian { .. } => true,
            ProcessSpec::ExpSupermartingale { base, .. } => base.is_continuous(),
            _ => false,
        }
    }

    /// `(s, φ(s))` for an exponential transform, with the base process.
    pub fn exp_parts(&self) -> Option<(&ProcessSpec, f64, f64)> {
        match self {
            ProcessSpec::ExpSupermartingale { base, s, phi } => {
                let phi: MgfBound = make_phi(*phi).ok()?;
                Some((base, *s, phi.phi(*s).ok()?))
            }
            _ => None,
        }
    }
}

/// Number of coarse Brownian steps covering `[0, horizon]`.
pub(crate) fn coarse_steps(dt: f64, horizon: f64) -> u64 {
    let k = math::round(horizon / dt);
    // Accept horizons that are a multiple of dt up to rounding.
    if (k * dt - horizon).abs() <= 1e-9 * horizon {
        k as u64
    } else {
        math::floor(horizon / dt) as u64 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(ProcessSpec::Brownian { dt: 0.0, horizon: 1.0, refine: 0 }.validate().is_err());
        assert!(ProcessSpec::IidSum { dist: StepDist::Bernoulli { p: 1.5 }, n: 3, v_per_step: 1.0 }.validate().is_err());
        let custom = StepDist::BoundedCustom { values: alloc::vec![-1.0, 2.0], probs: alloc::vec![0.5, 0.4] };
        assert!(ProcessSpec::IidSum { dist: custom, n: 3, v_per_step: 1.0 }.validate().is_err());
        let bern = ProcessSpec::ExpSupermartingale {
            base: Box::new(ProcessSpec::Brownian { dt: 0.1, horizon: 1.0, refine: 0 }),
            s: 4.0,
            phi: PhiKind::Bernstein { b: 1.0 },
        };
        assert!(matches!(bern.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn custom_dist_moments() {
        let d = StepDist::BoundedCustom { values: alloc::vec![-1.0, 2.0], probs: alloc::vec![2.0 / 3.0, 1.0 / 3.0] };
        assert!(d.mean().abs() < 1e-15);
        assert!((d.variance() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn horizons() {
        let b = ProcessSpec::Brownian { dt: 1e-3, horizon: 1.0, refine: 2 };
        assert_eq!(b.horizon(), 1.0);
        assert_eq!(b.with_horizon(32.0).horizon(), 32.0);
        let w = ProcessSpec::LazyWalk { p_move: 1.0, drift: 0.0, steps: 5, v_per_step: 1.0 };
        assert_eq!(w.with_horizon(7.5).horizon(), 8.0);
        assert_eq!(coarse_steps(0.1, 0.3), 3);
        assert_eq!(coarse_steps(0.25, 1.0), 4);
    }

    #[test]
    fn classes() {
        let w = ProcessSpec::LazyWalk { p_move: 1.0, drift: -0.1, steps: 5, v_per_step: 1.0 };
        assert_eq!(w.martingale_class(), MartingaleClass::Supermartingale);
        let y = ProcessSpec::ExpSupermartingale {
            base: Box::new(ProcessSpec::Brownian { dt: 0.1, horizon: 1.0, refine: 0 }),
            s: 1.0,
            phi: PhiKind::Gaussian { v: 1.0 },
        };
        assert_eq!(y.martingale_class(), MartingaleClass::Martingale);
        assert!(y.is_continuous());
        let y = ProcessSpec::ExpSupermartingale {
            base: Box::new(ProcessSpec::Brownian { dt: 0.1, horizon: 1.0, refine: 0 }),
            s: 1.0,
            phi: PhiKind::Gaussian { v: 2.0 },
        };
        assert_eq!(y.martingale_class(), MartingaleClass::Supermartingale);
    }
}
