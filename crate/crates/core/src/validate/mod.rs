//! Monte Carlo estimates of crossing probabilities and their comparison
//! with computed bounds.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bounds::InequalityId;
use crate::error::{Error, Result};
use crate::sim::{PathPoint, PathStream, ProcessSpec};

mod event;
mod stats;

pub use event::{EventSpec, EventTracker};
pub use stats::{beta_quantile, clopper_pearson, inc_beta};

use event::{Probe, TrackerSet};

/// Outcome of comparing an empirical frequency with a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// `Violated` iff the whole interval lies above the bound; `Inconclusive`
    /// when the interval is wider than half the bound.
    pub fn judge(ci: Interval, bound: f64) -> Verdict {
        if ci.lo > bound {
            Verdict::Violated
        } else if ci.hi - ci.lo > 0.5 * bound {
            Verdict::Inconclusive
        } else {
            Verdict::Holds
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Empirical crossing frequency against a bound.
///
/// Crossings after the horizon are missed, so `p_hat` under-estimates the
/// probability: a `violated` verdict is sound, `holds` is conservative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub label: String,
    pub inequality: Option<InequalityId>,
    pub event: EventSpec,
    pub n_paths: u64,
    pub n_crossed: u64,
    pub p_hat: f64,
    pub ci: Interval,
    pub alpha: f64,
    pub bound: f64,
    pub verdict: Verdict,
    /// Fraction of paths whose first crossing fell in the second half of the horizon.
    pub truncation_fraction: f64,
    pub horizon: f64,
    /// Measured grid bias, when the run was coupled with a half-step grid.
    pub grid_allowance: Option<f64>,
    pub exact: bool,
    pub runtime_seconds: f64,
}

impl ValidationReport {
    /// Builds the report for event `i` of `counts`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_counts(
        label: &str,
        inequality: Option<InequalityId>,
        event: EventSpec,
        bound: f64,
        counts: &CrossingCounts,
        i: usize,
        alpha: f64,
        horizon: f64,
    ) -> Result<Self> {
        let n = counts.n_paths;
        let k = counts.crossed[i];
        let (lo, hi) = clopper_pearson(k, n, alpha)?;
        let ci = Interval { lo, hi };
        let grid_allowance = counts.fine_crossed.as_ref().map(|fine| {
            let p_fine = fine[i] as f64 / n as f64;
            grid_allowance(k as f64 / n as f64, p_fine)
        });
        Ok(ValidationReport {
            label: label.into(),
            inequality,
            event,
            n_paths: n,
            n_crossed: k,
            p_hat: k as f64 / n as f64,
            ci,
            alpha,
            bound,
            verdict: Verdict::judge(ci, bound),
            truncation_fraction: counts.late[i] as f64 / n as f64,
            horizon,
            grid_allowance,
            exact: false,
            runtime_seconds: 0.0,
        })
    }

    /// Whether the interval, widened upward by the grid allowance, reaches the bound.
    pub fn matches_exact_value(&self) -> bool {
        let allowance = self.grid_allowance.unwrap_or(0.0);
        self.ci.lo <= self.bound && self.bound <= self.ci.hi + allowance
    }
}

/// Grid bias of a discretely monitored continuous path, from the coarse and
/// half-step crossing frequencies.
///
/// The bias shrinks like `sqrt(dt)`, so the coarse-grid bias is the
/// half-step difference divided by `1 - 2^{-1/2}`.
pub fn grid_allowance(p_coarse: f64, p_fine: f64) -> f64 {
    (p_fine - p_coarse).max(0.0) / (1.0 - core::f64::consts::FRAC_1_SQRT_2)
}

/// Per-event crossing tallies; merging chunks in index order is exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingCounts {
    pub n_paths: u64,
    pub crossed: Vec<u64>,
    /// Crossings in the second half of the horizon.
    pub late: Vec<u64>,
    /// Crossings on the half-step grid of a coupled run.
    pub fine_crossed: Option<Vec<u64>>,
}

impl CrossingCounts {
    pub fn empty(n_events: usize, coupled: bool) -> Self {
        CrossingCounts {
            n_paths: 0,
            crossed: vec![0; n_events],
            late: vec![0; n_events],
            fine_crossed: coupled.then(|| vec![0; n_events]),
        }
    }

    pub fn merge(&mut self, other: &CrossingCounts) {
        self.n_paths += other.n_paths;
        for (a, b) in self.crossed.iter_mut().zip(&other.crossed) {
            *a += b;
        }
        for (a, b) in self.late.iter_mut().zip(&other.late) {
            *a += b;
        }
        if let (Some(a), Some(b)) = (self.fine_crossed.as_mut(), other.fine_crossed.as_ref()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn p_hat(&self, i: usize) -> f64 {
        self.crossed[i] as f64 / self.n_paths as f64
    }

    fn tally(&mut self, run: &PathRun, horizon: f64) {
        self.n_paths += 1;
        for i in 0..self.crossed.len() {
            if let Some(t) = run.crossed_at(i) {
                if t <= horizon {
                    self.crossed[i] += 1;
                    if t > 0.5 * horizon {
                        self.late[i] += 1;
                    }
                }
            }
        }
        if let Some(fine) = self.fine_crossed.as_mut() {
            for (i, f) in fine.iter_mut().enumerate() {
                if run.fine.crossed_at(i).is_some_and(|t| t <= horizon) {
                    *f += 1;
                }
            }
        }
    }
}

/// A compiled crossing experiment: which process to run and what to watch.
#[derive(Debug, Clone)]
pub struct Plan {
    spec: ProcessSpec,
    probes: Vec<Probe>,
    coupled: bool,
}

impl Plan {
    /// `coupled` adds one Brownian refinement level: events are then tracked
    /// on both the original grid and the half-step grid of the same paths.
    pub fn new(spec: &ProcessSpec, events: &[EventSpec], coupled: bool) -> Result<Self> {
        spec.validate()?;
        let (mut run_spec, probes) = event::compile(spec, events)?;
        if coupled {
            run_spec = refine_once(&run_spec)?;
        }
        Ok(Plan { spec: run_spec, probes, coupled })
    }

    pub fn n_events(&self) -> usize {
        self.probes.len()
    }

    pub fn coupled(&self) -> bool {
        self.coupled
    }

    /// The process with its horizon replaced by `horizon`.
    pub fn with_horizon(&self, horizon: f64) -> Plan {
        Plan { spec: self.spec.with_horizon(horizon), probes: self.probes.clone(), coupled: self.coupled }
    }

    pub fn start(&self, seed: u64, path_index: u64) -> Result<PathRun> {
        let fine = TrackerSet::new(&self.probes);
        Ok(PathRun {
            stream: PathStream::new(&self.spec, seed, path_index)?,
            pending: None,
            coarse: if self.coupled { fine.clone() } else { TrackerSet::new(&[]) },
            fine,
            coupled: self.coupled,
            index: 0,
            finished: false,
        })
    }

    /// Runs the paths in `range` to `horizon` and tallies crossings.
    pub fn run_range(&self, seed: u64, range: Range<u64>, horizon: f64) -> Result<CrossingCounts> {
        let mut counts = CrossingCounts::empty(self.n_events(), self.coupled);
        for idx in range {
            let mut run = self.start(seed, idx)?;
            run.advance(horizon);
            counts.tally(&run, horizon);
        }
        Ok(counts)
    }

    /// Tallies already advanced runs.
    pub fn count<'a>(&self, runs: impl IntoIterator<Item = &'a PathRun>, horizon: f64) -> CrossingCounts {
        let mut counts = CrossingCounts::empty(self.n_events(), self.coupled);
        for run in runs {
            counts.tally(run, horizon);
        }
        counts
    }
}

fn refine_once(spec: &ProcessSpec) -> Result<ProcessSpec> {
    match spec {
        ProcessSpec::Brownian { dt, horizon, refine } => {
            Ok(ProcessSpec::Brownian { dt: *dt, horizon: *horizon, refine: refine + 1 })
        }
        ProcessSpec::ExpSupermartingale { base, s, phi } => {
            Ok(ProcessSpec::ExpSupermartingale { base: alloc::boxed::Box::new(refine_once(base)?), s: *s, phi: *phi })
        }
        _ => Err(Error::InvalidSpec("grid coupling needs a Brownian-driven process".into())),
    }
}

/// One path being streamed through a set of event trackers. It can be
/// advanced in stages, which is what horizon doubling needs.
#[derive(Debug, Clone)]
pub struct PathRun {
    stream: PathStream,
    pending: Option<PathPoint>,
    fine: TrackerSet,
    coarse: TrackerSet,
    coupled: bool,
    index: u64,
    finished: bool,
}

impl PathRun {
    /// Consumes points with `t <= t_max`; stops early once every event has
    /// occurred.
    pub fn advance(&mut self, t_max: f64) {
        while !self.finished {
            let p = match self.pending.take().or_else(|| self.stream.next()) {
                Some(p) => p,
                None => {
                    self.finished = true;
                    break;
                }
            };
            if p.t > t_max * (1.0 + 1e-12) {
                self.pending = Some(p);
                break;
            }
            let mut all = self.fine.observe(&p);
            if self.coupled {
                all = if self.index.is_multiple_of(2) { self.coarse.observe(&p) } else { self.coarse.all_crossed() };
            }
            self.index += 1;
            if all {
                self.finished = true;
            }
        }
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    /// First crossing time of event `i` on the primary grid.
    pub fn crossed_at(&self, i: usize) -> Option<f64> {
        if self.coupled { self.coarse.crossed_at(i) } else { self.fine.crossed_at(i) }
    }
}

/// Result of [`double_horizon`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Doubling {
    pub horizon: f64,
    pub counts: CrossingCounts,
    pub converged: bool,
    /// `(T, p_hat per event)` at every stage.
    pub history: Vec<(f64, Vec<f64>)>,
}

/// Doubles the horizon from `t0` until every event's `p_hat` moves by less
/// than half its confidence-interval width, or `t_cap` is reached.
///
/// `advance(T)` must bring all paths to horizon `T` and return the tallies.
pub fn double_horizon<F>(t0: f64, t_cap: f64, alpha: f64, mut advance: F) -> Result<Doubling>
where
    F: FnMut(f64) -> Result<CrossingCounts>,
{
    if !(t0 > 0.0 && t_cap >= t0) {
        return Err(Error::InvalidParameter(alloc::format!("need 0 < t0 <= t_cap, got {t0}, {t_cap}")));
    }
    let mut t = t0;
    let mut counts = advance(t)?;
    let mut history = vec![(t, p_hats(&counts))];
    while 2.0 * t <= t_cap {
        let next = advance(2.0 * t)?;
        let mut stable = true;
        for i in 0..next.crossed.len() {
            let (lo, hi) = clopper_pearson(next.crossed[i], next.n_paths, alpha)?;
            if (next.p_hat(i) - counts.p_hat(i)).abs() >= 0.5 * (hi - lo) {
                stable = false;
            }
        }
        t *= 2.0;
        counts = next;
        history.push((t, p_hats(&counts)));
        if stable {
            return Ok(Doubling { horizon: t, counts, converged: true, history });
        }
    }
    Ok(Doubling { horizon: t, counts, converged: false, history })
}

fn p_hats(c: &CrossingCounts) -> Vec<f64> {
    (0..c.crossed.len()).map(|i| c.p_hat(i)).collect()
}

/// Sequential estimate of one crossing probability.
pub fn estimate_crossing(
    spec: &ProcessSpec,
    event: &EventSpec,
    bound: f64,
    n_paths: u64,
    horizon: f64,
    seed: u64,
    alpha: f64,
) -> Result<ValidationReport> {
    let mut out = sweep(spec, &[(*event, bound)], n_paths, horizon, seed, alpha)?;
    Ok(out.remove(0))
}

/// Estimates several events on one shared set of paths.
pub fn sweep(
    spec: &ProcessSpec,
    items: &[(EventSpec, f64)],
    n_paths: u64,
    horizon: f64,
    seed: u64,
    alpha: f64,
) -> Result<Vec<ValidationReport>> {
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if n_paths == 0 {
        return Err(Error::InvalidParameter("n_paths must be positive".into()));
    }
    let events: Vec<EventSpec> = items.iter().map(|(e, _)| *e).collect();
    let plan = Plan::new(&spec.with_horizon(horizon), &events, false)?;
    let counts = plan.run_range(seed, 0..n_paths, horizon)?;
    items
        .iter()
        .enumerate()
        .map(|(i, (e, b))| ValidationReport::from_counts("", None, *e, *b, &counts, i, alpha, horizon))
        .collect()
}
