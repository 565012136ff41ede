//! Running presets and explicit validation requests.

use std::time::Instant;

use anyhow::{Context, Result};
use maxbound_core::stopping::OsReport;
use maxbound_core::validate::{EventSpec, Plan, ValidationReport, Verdict};
use serde::Serialize;

use crate::harness::Harness;
use crate::presets::{CrossingGroup, HorizonRule, Preset};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub n_paths: u64,
    pub seed: u64,
    pub alpha: f64,
    /// Replaces every fixed horizon.
    pub horizon: Option<f64>,
}

impl RunOptions {
    pub fn for_preset(p: &Preset) -> Self {
        RunOptions { n_paths: p.n_paths, seed: p.seed, alpha: p.alpha, horizon: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StoppingRow {
    pub label: String,
    pub report: OsReport,
}

/// Horizon chosen by doubling for one group.
#[derive(Debug, Clone, Serialize)]
pub struct HorizonChoice {
    pub group: usize,
    pub horizon: f64,
    pub converged: bool,
    pub history: Vec<(f64, Vec<f64>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub preset: String,
    pub seed: u64,
    pub n_paths: u64,
    pub alpha: f64,
    pub validations: Vec<ValidationReport>,
    pub stopping: Vec<StoppingRow>,
    pub horizons: Vec<HorizonChoice>,
    pub runtime_seconds: f64,
}

impl SuiteReport {
    pub fn any_violated(&self) -> bool {
        self.validations.iter().any(|r| r.verdict == Verdict::Violated)
            || self.stopping.iter().any(|r| !r.report.consistent)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w: Vec<String> = self
            .stopping
            .iter()
            .filter_map(|r| r.report.warning.as_ref().map(|m| format!("{}: {m}", r.label)))
            .collect();
        for h in self.horizons.iter().filter(|h| !h.converged) {
            w.push(format!("group {}: horizon doubling stopped at the cap {}", h.group, h.horizon));
        }
        for r in self.validations.iter().filter(|r| r.truncation_fraction > 0.01) {
            w.push(format!("{}: {:.2}% of paths crossed late in the horizon", r.label, 100.0 * r.truncation_fraction));
        }
        w
    }
}

pub fn run_preset(h: &Harness, preset: &Preset, opts: &RunOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut validations = Vec::new();
    let mut horizons = Vec::new();
    for (gi, g) in preset.groups.iter().enumerate() {
        let (reps, choice) = run_group(h, g, opts).with_context(|| format!("group {gi} of preset {}", preset.name))?;
        validations.extend(reps);
        if let Some(mut c) = choice {
            c.group = gi;
            horizons.push(c);
        }
    }
    let mut stopping = Vec::new();
    for c in &preset.stopping {
        let horizon = opts.horizon.unwrap_or(c.horizon);
        let report = h.optional_stopping(&c.spec, &c.pair, opts.n_paths, horizon, opts.seed)?;
        stopping.push(StoppingRow { label: c.label.clone(), report });
    }
    Ok(SuiteReport {
        preset: preset.name.to_string(),
        seed: opts.seed,
        n_paths: opts.n_paths,
        alpha: opts.alpha,
        validations,
        stopping,
        horizons,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Validates one group of rows on a shared set of paths.
pub fn run_group(h: &Harness, g: &CrossingGroup, opts: &RunOptions) -> Result<(Vec<ValidationReport>, Option<HorizonChoice>)> {
    let start = Instant::now();
    let events: Vec<EventSpec> = g
        .rows
        .iter()
        .map(|r| r.bound.event.with_context(|| format!("{} has no event", r.label)))
        .collect::<Result<_>>()?;
    let plan = Plan::new(&g.spec, &events, g.coupled)?;
    let (counts, horizon, choice) = match (g.horizon, opts.horizon) {
        (HorizonRule::Fixed { .. }, Some(t)) | (HorizonRule::Fixed { horizon: t }, None) => {
            (h.counts(&plan, opts.seed, opts.n_paths, t)?, t, None)
        }
        (HorizonRule::Doubling { t0, cap }, _) => {
            let d = h.doubling(&plan, opts.seed, opts.n_paths, t0, cap, opts.alpha)?;
            let choice = HorizonChoice { group: 0, horizon: d.horizon, converged: d.converged, history: d.history };
            (d.counts, d.horizon, Some(choice))
        }
    };
    let secs = start.elapsed().as_secs_f64();
    let reports = g
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = ValidationReport::from_counts(
                &r.label,
                Some(r.bound.inequality),
                events[i],
                r.bound.bound,
                &counts,
                i,
                opts.alpha,
                horizon,
            )?;
            v.exact = r.bound.exact;
            v.runtime_seconds = secs;
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok((reports, choice))
}
