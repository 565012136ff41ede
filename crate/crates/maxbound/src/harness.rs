//! Parallel drivers over the sequential kernels in `maxbound_core`.
//!
//! Work is split into fixed chunks of path indices and merged in chunk
//! order, so results do not depend on the number of threads.

use std::time::Instant;

use anyhow::{Context, Result};
use maxbound_core::sim::ProcessSpec;
use maxbound_core::stopping::{OsReport, OsStats, RegionPair};
use maxbound_core::validate::{double_horizon, CrossingCounts, Doubling, EventSpec, PathRun, Plan, ValidationReport};
use rayon::prelude::*;

pub const CHUNK: u64 = 1024;

pub struct Harness {
    pool: rayon::ThreadPool,
}

fn chunks(n: u64) -> Vec<std::ops::Range<u64>> {
    (0..n.div_ceil(CHUNK)).map(|k| k * CHUNK..((k + 1) * CHUNK).min(n)).collect()
}

impl Harness {
    /// `threads = None` uses all available cores.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .context("building the worker pool")?;
        Ok(Harness { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Crossing tallies for paths `0..n_paths`.
    pub fn counts(&self, plan: &Plan, seed: u64, n_paths: u64, horizon: f64) -> Result<CrossingCounts> {
        let plan = plan.with_horizon(horizon);
        let parts: Vec<_> = self.pool.install(|| {
            chunks(n_paths).into_par_iter().map(|r| plan.run_range(seed, r, horizon)).collect()
        });
        let mut total = CrossingCounts::empty(plan.n_events(), plan.coupled());
        for p in parts {
            total.merge(&p?);
        }
        Ok(total)
    }

    /// Horizon doubling on one resumable set of paths.
    pub fn doubling(&self, plan: &Plan, seed: u64, n_paths: u64, t0: f64, t_cap: f64, alpha: f64) -> Result<Doubling> {
        let plan = plan.with_horizon(t_cap);
        let mut runs: Vec<Vec<PathRun>> = chunks(n_paths)
            .into_iter()
            .map(|r| r.map(|i| plan.start(seed, i)).collect::<maxbound_core::Result<Vec<_>>>())
            .collect::<maxbound_core::Result<_>>()?;
        let out = double_horizon(t0, t_cap, alpha, |t| {
            self.pool.install(|| {
                runs.par_iter_mut().for_each(|chunk| chunk.iter_mut().for_each(|r| r.advance(t)));
            });
            Ok(plan.count(runs.iter().flatten(), t))
        })?;
        Ok(out)
    }

    /// Parallel counterpart of [`maxbound_core::validate::sweep`].
    pub fn sweep(
        &self,
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
        let start = Instant::now();
        let events: Vec<EventSpec> = items.iter().map(|(e, _)| *e).collect();
        let plan = Plan::new(spec, &events, false)?;
        let counts = self.counts(&plan, seed, n_paths, horizon)?;
        let secs = start.elapsed().as_secs_f64();
        items
            .iter()
            .enumerate()
            .map(|(i, (e, b))| {
                let mut r = ValidationReport::from_counts("", None, *e, *b, &counts, i, alpha, horizon)?;
                r.runtime_seconds = secs;
                Ok(r)
            })
            .collect()
    }

    /// Parallel counterpart of [`maxbound_core::stopping::verify_optional_stopping`].
    pub fn optional_stopping(
        &self,
        spec: &ProcessSpec,
        pair: &RegionPair,
        n_paths: u64,
        horizon: f64,
        seed: u64,
    ) -> Result<OsReport> {
        let start = Instant::now();
        pair.check()?;
        let spec = spec.with_horizon(horizon);
        spec.validate()?;
        let parts: Vec<_> = self.pool.install(|| {
            chunks(n_paths).into_par_iter().map(|r| OsStats::run_range(&spec, pair, seed, r)).collect()
        });
        let mut st = OsStats::default();
        for p in parts {
            st.merge(&p?);
        }
        let mut rep = OsReport::from_stats(&st, spec.martingale_class(), horizon)?;
        rep.runtime_seconds = start.elapsed().as_secs_f64();
        Ok(rep)
    }
}
