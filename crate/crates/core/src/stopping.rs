//! Continuity regions, first-exit times and the optional stopping check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{sqrt, KahanSum};
use crate::sim::{MartingaleClass, Path, PathPoint, PathStream, ProcessSpec};

/// Piecewise-constant interval `(L(t), U(t))` inside `[-C, C]`.
///
/// Piece `i` applies on `[breakpoints[i], breakpoints[i + 1])`; the last
/// piece extends to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuityRegion {
    pub breakpoints: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub envelope: f64,
}

impl ContinuityRegion {
    pub fn new(breakpoints: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, envelope: f64) -> Result<Self> {
        let r = ContinuityRegion { breakpoints, lower, upper, envelope };
        r.check()?;
        Ok(r)
    }

    /// The region `(lo, hi)` for all times, with `C = max(|lo|, |hi|)`.
    pub fn constant(lo: f64, hi: f64) -> Result<Self> {
        Self::new(alloc::vec![0.0], alloc::vec![lo], alloc::vec![hi], lo.abs().max(hi.abs()))
    }

    pub fn check(&self) -> Result<()> {
        let n = self.breakpoints.len();
        if n == 0 || self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidSpec("region needs equally many breakpoints, lower and upper values".into()));
        }
        if self.breakpoints[0] != 0.0 {
            return Err(Error::InvalidSpec("first region breakpoint must be 0".into()));
        }
        if self.breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec("region breakpoints must increase".into()));
        }
        let c = self.envelope;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("envelope must be positive and finite, got {c}")));
        }
        for i in 0..n {
            let (l, u) = (self.lower[i], self.upper[i]);
            if !(-c <= l && l < u && u <= c) {
                return Err(Error::InvalidSpec(format!(
                    "region piece {i} is ({l}, {u}), which is empty or leaves [-{c}, {c}]"
                )));
            }
        }
        Ok(())
    }

    /// `(L(t), U(t))`.
    pub fn interval(&self, t: f64) -> (f64, f64) {
        let i = self.breakpoints.partition_point(|&b| b <= t).saturating_sub(1);
        (self.lower[i], self.upper[i])
    }

    /// Strict containment; the boundary itself counts as outside.
    pub fn contains(&self, t: f64, x: f64) -> bool {
        let (l, u) = self.interval(t);
        l < x && x < u
    }
}

/// Nested regions `inner ⊆ outer`, giving stopping times `τ₁ ≤ τ₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionPair {
    pub inner: ContinuityRegion,
    pub outer: ContinuityRegion,
}

impl RegionPair {
    pub fn new(inner: ContinuityRegion, outer: ContinuityRegion) -> Result<Self> {
        let p = RegionPair { inner, outer };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        self.inner.check()?;
        self.outer.check()?;
        for &t in self.inner.breakpoints.iter().chain(&self.outer.breakpoints) {
            let (li, ui) = self.inner.interval(t);
            let (lo, uo) = self.outer.interval(t);
            if li < lo || ui > uo {
                return Err(Error::InvalidSpec(format!("inner region is not inside the outer region at t = {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopResult {
    /// `None` when the path never left the region.
    pub tau: Option<f64>,
    pub value_at_stop: f64,
    pub truncated: bool,
}

/// Streaming first-exit detector.
#[derive(Debug, Clone)]
pub struct ExitTracker<'a> {
    region: &'a ContinuityRegion,
    result: Option<StopResult>,
    last: Option<f64>,
}

impl<'a> ExitTracker<'a> {
    pub fn new(region: &'a ContinuityRegion) -> Self {
        ExitTracker { region, result: None, last: None }
    }

    /// Returns true once the path has exited.
    pub fn observe(&mut self, t: f64, x: f64) -> bool {
        if self.result.is_some() {
            return true;
        }
        self.last = Some(x);
        if !self.region.contains(t, x) {
            self.result = Some(StopResult { tau: Some(t), value_at_stop: x, truncated: false });
        }
        self.result.is_some()
    }

    pub fn exited(&self) -> bool {
        self.result.is_some()
    }

    pub fn finish(&self) -> Result<StopResult> {
        match (self.result, self.last) {
            (Some(r), _) => Ok(r),
            (None, Some(x)) => Ok(StopResult { tau: None, value_at_stop: x, truncated: true }),
            (None, None) => Err(Error::EmptyPath),
        }
    }
}

/// First grid time at which the path is outside `region`.
pub fn first_exit(path: &Path, region: &ContinuityRegion) -> Result<StopResult> {
    let mut tr = ExitTracker::new(region);
    for (&t, &x) in path.times.iter().zip(&path.values) {
        if tr.observe(t, x) {
            break;
        }
    }
    tr.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// Whether some grid point reaches `boundary(t)` (closed comparison).
pub fn crossing_indicator<F: Fn(f64) -> f64>(path: &Path, boundary: F, direction: Direction) -> bool {
    path.times.iter().zip(&path.values).any(|(&t, &x)| match direction {
        Direction::Up => x >= boundary(t),
        Direction::Down => x <= boundary(t),
    })
}

/// Running sums for the two stopped values and their difference.
#[derive(Debug, Clone, Copy, Default)]
pub struct OsStats {
    pub n: u64,
    pub truncated_inner: u64,
    pub truncated_outer: u64,
    sum1: KahanSum,
    sum2: KahanSum,
    sq1: KahanSum,
    sq2: KahanSum,
    sqd: KahanSum,
}

impl OsStats {
    pub fn push(&mut self, inner: &StopResult, outer: &StopResult) {
        let (a, b) = (inner.value_at_stop, outer.value_at_stop);
        self.n += 1;
        self.truncated_inner += inner.truncated as u64;
        self.truncated_outer += outer.truncated as u64;
        self.sum1.add(a);
        self.sum2.add(b);
        self.sq1.add(a * a);
        self.sq2.add(b * b);
        self.sqd.add((b - a) * (b - a));
    }

    pub fn merge(&mut self, o: &OsStats) {
        self.n += o.n;
        self.truncated_inner += o.truncated_inner;
        self.truncated_outer += o.truncated_outer;
        self.sum1.merge(o.sum1);
        self.sum2.merge(o.sum2);
        self.sq1.merge(o.sq1);
        self.sq2.merge(o.sq2);
        self.sqd.merge(o.sqd);
    }

    /// Runs the paths in `range` and records both stopped values.
    pub fn run_range(spec: &ProcessSpec, pair: &RegionPair, seed: u64, range: Range<u64>) -> Result<OsStats> {
        let mut st = OsStats::default();
        for idx in range {
            let (a, b) = stop_pair(PathStream::new(spec, seed, idx)?, pair)?;
            st.push(&a, &b);
        }
        Ok(st)
    }
}

fn stop_pair(stream: PathStream, pair: &RegionPair) -> Result<(StopResult, StopResult)> {
    let mut inner = ExitTracker::new(&pair.inner);
    let mut outer = ExitTracker::new(&pair.outer);
    for PathPoint { t, x, .. } in stream {
        inner.observe(t, x);
        if outer.observe(t, x) {
            break;
        }
    }
    Ok((inner.finish()?, outer.finish()?))
}

/// Empirical means of `X_{τ₁}` and `X_{τ₂}` and whether they agree with
/// the optional stopping conclusion for the process class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsReport {
    pub n_paths: u64,
    pub class: MartingaleClass,
    pub mean_inner: f64,
    pub mean_outer: f64,
    pub se_inner: f64,
    pub se_outer: f64,
    /// Standard error of the paired difference `X_{τ₂} - X_{τ₁}`.
    pub se_diff: f64,
    pub z: f64,
    pub truncation_fraction: f64,
    pub consistent: bool,
    pub warning: Option<String>,
    pub horizon: f64,
    pub runtime_seconds: f64,
}

impl OsReport {
    pub const Z: f64 = 3.0;

    pub fn from_stats(st: &OsStats, class: MartingaleClass, horizon: f64) -> Result<Self> {
        if st.n < 2 {
            return Err(Error::InvalidParameter("need at least two paths".into()));
        }
        let n = st.n as f64;
        let m1 = st.sum1.total() / n;
        let m2 = st.sum2.total() / n;
        let var = |sq: f64, m: f64| ((sq - n * m * m) / (n - 1.0)).max(0.0);
        let se1 = sqrt(var(st.sq1.total(), m1) / n);
        let se2 = sqrt(var(st.sq2.total(), m2) / n);
        let se_d = sqrt(var(st.sqd.total(), m2 - m1) / n);
        let z = Self::Z;
        let consistent = match class {
            MartingaleClass::Martingale => (m2 - m1).abs() <= z * se_d,
            MartingaleClass::Supermartingale => m2 <= m1 + z * se_d,
            MartingaleClass::Submartingale => m2 >= m1 - z * se_d,
        };
        let trunc = st.truncated_outer as f64 / n;
        let warning = (trunc > 0.01).then(|| {
            format!("{:.2}% of paths did not leave the outer region before the horizon", 100.0 * trunc)
        });
        Ok(OsReport {
            n_paths: st.n,
            class,
            mean_inner: m1,
            mean_outer: m2,
            se_inner: se1,
            se_outer: se2,
            se_diff: se_d,
            z,
            truncation_fraction: trunc,
            consistent,
            warning,
            horizon,
            runtime_seconds: 0.0,
        })
    }
}

/// Sequential optional stopping check over `n_paths` paths.
pub fn verify_optional_stopping(
    spec: &ProcessSpec,
    pair: &RegionPair,
    n_paths: u64,
    horizon: f64,
    seed: u64,
) -> Result<OsReport> {
    pair.check()?;
    let spec = spec.with_horizon(horizon);
    spec.validate()?;
    let st = OsStats::run_range(&spec, pair, seed, 0..n_paths)?;
    OsReport::from_stats(&st, spec.martingale_class(), horizon)
}
