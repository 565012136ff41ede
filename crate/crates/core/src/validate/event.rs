//! Crossing events and their streaming trackers.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::mgf::Side;
use crate::sim::{PathPoint, ProcessSpec};

/// A boundary-crossing event on `Z_t = X_t - X_0` and the variance proxy `V_t`.
///
/// The lower-side variants describe `inf [Z + boundary] <= 0`, i.e. `-Z`
/// crossing the same boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventSpec {
    /// `±Z_t >= γ V_τ + slope (V_t - V_τ)`.
    Line { side: Side, gamma: f64, v_tau: f64, slope: f64 },
    /// `|Z_t| >= γ V_τ + slope (V_t - V_τ)`.
    TwoSidedLine { gamma: f64, v_tau: f64, slope: f64 },
    /// `±Z_t >= η + γ (V_τ ∨ V_t)`.
    Vee { side: Side, gamma: f64, v_tau: f64, eta: f64 },
    /// `±Z_t >= η + γ V_t`.
    Ray { side: Side, gamma: f64, eta: f64 },
    /// `X_t >= level` on the raw values.
    SupLevel { level: f64 },
}

impl EventSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(alloc::format!("event {name} must be finite, got {x}")))
            }
        };
        match *self {
            EventSpec::Line { gamma, v_tau, slope, .. } | EventSpec::TwoSidedLine { gamma, v_tau, slope } => {
                finite("gamma", gamma)?;
                finite("v_tau", v_tau)?;
                finite("slope", slope)
            }
            EventSpec::Vee { gamma, v_tau, eta, .. } => {
                finite("gamma", gamma)?;
                finite("v_tau", v_tau)?;
                finite("eta", eta)
            }
            EventSpec::Ray { gamma, eta, .. } => {
                finite("gamma", gamma)?;
                finite("eta", eta)
            }
            EventSpec::SupLevel { level } => finite("level", level),
        }
    }

    /// Non-negative exactly when `(x, v)` lies in the crossing region.
    pub fn margin(&self, x0: f64, x: f64, v: f64) -> f64 {
        let z = x - x0;
        match *self {
            EventSpec::Line { side, gamma, v_tau, slope } => side.sign() * z - gamma * v_tau - slope * (v - v_tau),
            EventSpec::TwoSidedLine { gamma, v_tau, slope } => z.abs() - gamma * v_tau - slope * (v - v_tau),
            EventSpec::Vee { side, gamma, v_tau, eta } => side.sign() * z - eta - gamma * v_tau.max(v),
            EventSpec::Ray { side, gamma, eta } => side.sign() * z - eta - gamma * v,
            EventSpec::SupLevel { level } => x - level,
        }
    }

    /// `V` at which the boundary has a kink.
    fn kink(&self) -> Option<f64> {
        match *self {
            EventSpec::Vee { v_tau, .. } => Some(v_tau),
            _ => None,
        }
    }
}

/// What a tracker actually compares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Probe {
    Event(EventSpec),
    /// `s x - φ(s) v >= ln(level)`: a [`EventSpec::SupLevel`] on `exp(s x - φ(s) v)`,
    /// evaluated on the base process.
    LogLevel { s: f64, phis: f64, ln_level: f64 },
}

impl Probe {
    #[inline]
    fn margin(&self, x0: f64, x: f64, v: f64) -> f64 {
        match self {
            Probe::Event(e) => e.margin(x0, x, v),
            Probe::LogLevel { s, phis, ln_level } => s * x - phis * v - ln_level,
        }
    }

    fn kink(&self) -> Option<f64> {
        match self {
            Probe::Event(e) => e.kink(),
            Probe::LogLevel { .. } => None,
        }
    }
}

/// Streams the points of one path and records the first crossing time.
///
/// Besides grid points it checks the left limit at each point and, for vee
/// boundaries, the kink at `V = V_τ` inside a segment. Along a segment the
/// path moves linearly, so these cover every local maximum of the margin.
#[derive(Debug, Clone)]
pub struct EventTracker {
    probe: Probe,
    x0: f64,
    prev: Option<(f64, f64)>,
    crossed_at: Option<f64>,
}

impl EventTracker {
    pub fn new(event: EventSpec) -> Self {
        Self::from_probe(Probe::Event(event))
    }

    pub(crate) fn from_probe(probe: Probe) -> Self {
        EventTracker { probe, x0: 0.0, prev: None, crossed_at: None }
    }

    pub fn crossed_at(&self) -> Option<f64> {
        self.crossed_at
    }

    pub fn crossed(&self) -> bool {
        self.crossed_at.is_some()
    }

    /// Feeds the next point; returns true once the event has occurred.
    pub fn observe(&mut self, p: &PathPoint) -> bool {
        if self.crossed_at.is_some() {
            return true;
        }
        let hit = match self.prev {
            None => {
                self.x0 = p.x;
                self.probe.margin(self.x0, p.x, p.v) >= 0.0
            }
            Some((xp, vp)) => {
                let jump = p.x_left != p.x || p.v_left != p.v;
                let mut hit = jump && self.probe.margin(self.x0, p.x_left, p.v_left) >= 0.0;
                if !hit {
                    if let Some(k) = self.probe.kink() {
                        if vp < k && k < p.v_left {
                            let w = (k - vp) / (p.v_left - vp);
                            let xk = xp + w * (p.x_left - xp);
                            hit = self.probe.margin(self.x0, xk, k) >= 0.0;
                        }
                    }
                }
                hit || self.probe.margin(self.x0, p.x, p.v) >= 0.0
            }
        };
        self.prev = Some((p.x, p.v));
        if hit {
            self.crossed_at = Some(p.t);
        }
        hit
    }
}

/// All trackers of one path. Levels of a single exponential transform share
/// one statistic and are crossed in level order, so they are tracked together.
#[derive(Debug, Clone)]
pub(crate) enum TrackerSet {
    General(Vec<EventTracker>),
    Levels {
        s: f64,
        phis: f64,
        /// Event indices by increasing level.
        order: Vec<usize>,
        sorted: Vec<f64>,
        crossed_at: Vec<Option<f64>>,
        n_crossed: usize,
    },
}

impl TrackerSet {
    pub(crate) fn new(probes: &[Probe]) -> Self {
        if let Some(&Probe::LogLevel { s, phis, .. }) = probes.first() {
            let same = probes.iter().all(|p| matches!(p, Probe::LogLevel { s: a, phis: b, .. } if *a == s && *b == phis));
            if same {
                let lvl = |i: usize| match probes[i] {
                    Probe::LogLevel { ln_level, .. } => ln_level,
                    Probe::Event(_) => f64::NAN,
                };
                let mut order: Vec<usize> = (0..probes.len()).collect();
                order.sort_by(|&a, &b| lvl(a).total_cmp(&lvl(b)));
                let sorted = order.iter().map(|&i| lvl(i)).collect();
                return TrackerSet::Levels { s, phis, order, sorted, crossed_at: vec![None; probes.len()], n_crossed: 0 };
            }
        }
        TrackerSet::General(probes.iter().map(|p| EventTracker::from_probe(*p)).collect())
    }

    /// Feeds the next point; returns true once every event has occurred.
    #[inline]
    pub(crate) fn observe(&mut self, p: &PathPoint) -> bool {
        match self {
            TrackerSet::General(trs) => {
                let mut all = true;
                for tr in trs {
                    all &= tr.observe(p);
                }
                all
            }
            TrackerSet::Levels { s, phis, order, sorted, crossed_at, n_crossed } => {
                let mut y = *s * p.x - *phis * p.v;
                if p.x_left != p.x || p.v_left != p.v {
                    y = y.max(*s * p.x_left - *phis * p.v_left);
                }
                while *n_crossed < sorted.len() && y >= sorted[*n_crossed] {
                    crossed_at[order[*n_crossed]] = Some(p.t);
                    *n_crossed += 1;
                }
                *n_crossed == sorted.len()
            }
        }
    }

    pub(crate) fn crossed_at(&self, i: usize) -> Option<f64> {
        match self {
            TrackerSet::General(trs) => trs[i].crossed_at(),
            TrackerSet::Levels { crossed_at, .. } => crossed_at[i],
        }
    }

    pub(crate) fn all_crossed(&self) -> bool {
        match self {
            TrackerSet::General(trs) => trs.iter().all(EventTracker::crossed),
            TrackerSet::Levels { sorted, n_crossed, .. } => *n_crossed == sorted.len(),
        }
    }
}

/// Trackers for a list of events over one process, using the log-scale
/// comparison when every event is a level on an exponential transform.
pub(crate) fn compile(spec: &ProcessSpec, events: &[EventSpec]) -> Result<(ProcessSpec, alloc::vec::Vec<Probe>)> {
    for e in events {
        e.validate()?;
    }
    let all_levels = !events.is_empty()
        && events.iter().all(|e| matches!(e, EventSpec::SupLevel { level } if *level > 0.0));
    if all_levels {
        if let Some((base, s, phis)) = spec.exp_parts() {
            let probes = events
                .iter()
                .map(|e| match e {
                    EventSpec::SupLevel { level } => Probe::LogLevel { s, phis, ln_level: math::ln(*level) },
                    _ => unreachable!(),
                })
                .collect();
            return Ok((base.clone(), probes));
        }
    }
    Ok((spec.clone(), events.iter().copied().map(Probe::Event).collect()))
}
