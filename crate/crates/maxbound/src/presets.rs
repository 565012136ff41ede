//! Named validation suites.

use anyhow::{bail, Result};
use maxbound_core::bounds::{
    azuma_bound, cbb_bounds, doob_exp_bound, eta_bound, expfam_bound, line_bound, optimized_line_bound,
    poisson_bounds, supermartingale_sup_bound, vee_bound, AzumaKind, BoundReport, CbbKind, EtaVariant, ExpFamily,
    ExpFamilyKind,
};
use maxbound_core::mgf::{make_phi, PhiKind, Side};
use maxbound_core::optimize::DEFAULT_TOL;
use maxbound_core::sim::{ProcessSpec, StepDist};
use maxbound_core::stopping::{ContinuityRegion, RegionPair};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum HorizonRule {
    Fixed { horizon: f64 },
    /// Doubled from `t0` until the estimates settle, at most `cap`.
    Doubling { t0: f64, cap: f64 },
}

/// A bound paired with the event it controls.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRow {
    pub label: String,
    pub bound: BoundReport,
}

/// Rows that share one set of simulated paths.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingGroup {
    pub spec: ProcessSpec,
    pub horizon: HorizonRule,
    /// Also track on the half-step grid to measure the grid allowance.
    pub coupled: bool,
    pub rows: Vec<CrossingRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingCase {
    pub label: String,
    pub spec: ProcessSpec,
    pub pair: RegionPair,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub seed: u64,
    pub n_paths: u64,
    pub alpha: f64,
    pub groups: Vec<CrossingGroup>,
    pub stopping: Vec<StoppingCase>,
}

pub const NAMES: [&str; 4] = ["expexact_brownian", "theorem9_all", "optional_stopping", "certain_crossing"];

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "expexact_brownian" => expexact_brownian(),
        "theorem9_all" => theorem9_all(),
        "optional_stopping" => optional_stopping(),
        "certain_crossing" => certain_crossing(),
        _ => bail!("unknown preset `{name}` (known: {})", NAMES.join(", ")),
    }
}

pub fn all() -> Result<Vec<Preset>> {
    NAMES.iter().map(|n| preset(n)).collect()
}

fn row(label: impl Into<String>, bound: maxbound_core::Result<BoundReport>) -> Result<CrossingRow> {
    Ok(CrossingRow { label: label.into(), bound: bound? })
}

fn exp_brownian(dt: f64) -> ProcessSpec {
    ProcessSpec::ExpSupermartingale {
        base: Box::new(ProcessSpec::Brownian { dt, horizon: 1.0, refine: 0 }),
        s: 1.0,
        phi: PhiKind::Gaussian { v: 1.0 },
    }
}

fn expexact_brownian() -> Result<Preset> {
    let rows = [1.5, 2.0, 4.0]
        .iter()
        .map(|&g| row(format!("doob_exp gamma={g}"), doob_exp_bound(g, true)))
        .collect::<Result<_>>()?;
    Ok(Preset {
        name: "expexact_brownian",
        description: "sup of exp(W_t - t/2) over Brownian paths against the exact value 1/gamma",
        seed: 7,
        n_paths: 200_000,
        alpha: 0.01,
        groups: vec![CrossingGroup {
            spec: exp_brownian(1e-3),
            horizon: HorizonRule::Doubling { t0: 1.0, cap: 1024.0 },
            coupled: true,
            rows,
        }],
        stopping: vec![],
    })
}

fn certain_crossing() -> Result<Preset> {
    let rows = [0.5, 1.0, 2.0]
        .iter()
        .map(|&g| row(format!("supermartingale_sup gamma={g}"), supermartingale_sup_bound(1.0, 0.0, g, true)))
        .collect::<Result<_>>()?;
    Ok(Preset {
        name: "certain_crossing",
        description: "sup of a continuous positive martingale started at 1 (certain crossing for gamma <= 1)",
        seed: 5,
        n_paths: 20_000,
        alpha: 0.01,
        groups: vec![CrossingGroup {
            spec: exp_brownian(1e-2),
            horizon: HorizonRule::Fixed { horizon: 64.0 },
            coupled: false,
            rows,
        }],
        stopping: vec![],
    })
}

fn optional_stopping() -> Result<Preset> {
    let walk = |drift| ProcessSpec::LazyWalk { p_move: 1.0, drift, steps: 10_000, v_per_step: 1.0 };
    let sym = RegionPair::new(ContinuityRegion::constant(-3.0, 3.0)?, ContinuityRegion::constant(-5.0, 5.0)?)?;
    let y = RegionPair::new(ContinuityRegion::constant(1e-3, 4.0)?, ContinuityRegion::constant(5e-4, 8.0)?)?;
    Ok(Preset {
        name: "optional_stopping",
        description: "means of X at nested exit times: symmetric walk, drifting walk, exponential martingale",
        seed: 3,
        n_paths: 100_000,
        alpha: 0.01,
        groups: vec![],
        stopping: vec![
            StoppingCase { label: "symmetric walk |x|<3 in |x|<5".into(), spec: walk(0.0), pair: sym.clone(), horizon: 10_000.0 },
            StoppingCase { label: "walk with drift -0.1".into(), spec: walk(-0.1), pair: sym, horizon: 10_000.0 },
            StoppingCase {
                label: "exp(W - t/2) in (0.001, 4) and (0.0005, 8)".into(),
                spec: exp_brownian(1e-2),
                pair: y,
                horizon: 256.0,
            },
        ],
    })
}

fn theorem9_all() -> Result<Preset> {
    let tol = DEFAULT_TOL;
    let mut groups = Vec::new();

    // Brownian motion with its exact log-MGF.
    let gauss = make_phi(PhiKind::Gaussian { v: 1.0 })?;
    let mut rows = Vec::new();
    for (g, vt) in [(1.0, 1.0), (0.5, 4.0), (1.5, 1.0), (2.0, 0.5)] {
        for side in [Side::Upper, Side::Lower] {
            rows.push(row(format!("bm line {side:?} g={g} vt={vt}"), optimized_line_bound(&gauss, g, vt, side, tol))?);
        }
    }
    rows.push(row("bm line s=0.5 g=1 vt=2", line_bound(&gauss, 0.5, 1.0, 2.0, Side::Upper))?);
    rows.push(row("bm azuma upper g=2 v=1", azuma_bound(2.0, 1.0, AzumaKind::Upper))?);
    rows.push(row("bm azuma lower g=1.5 v=1", azuma_bound(1.5, 1.0, AzumaKind::Lower))?);
    rows.push(row("bm azuma two-sided g=2 v=1", azuma_bound(2.0, 1.0, AzumaKind::TwoSided))?);
    rows.push(row("bm vee g=1 vt=1", vee_bound(&gauss, 1.0, 1.0, Side::Upper, tol))?);
    rows.push(row("bm ray g=0.5 eta=1", eta_bound(&gauss, 0.5, 1.0, 0.0, Side::Upper, EtaVariant::Ray, tol))?);
    rows.push(row("bm eta-vee lower g=0.5 eta=1 vt=2", eta_bound(&gauss, 0.5, 1.0, 2.0, Side::Lower, EtaVariant::Vee, tol))?);
    groups.push(CrossingGroup {
        spec: ProcessSpec::Brownian { dt: 0.01, horizon: 64.0, refine: 0 },
        horizon: HorizonRule::Fixed { horizon: 64.0 },
        coupled: false,
        rows,
    });

    // Sums of uniform(-1/2, 1/2) steps.
    let unif = make_phi(PhiKind::Uniform24)?;
    let rows = vec![
        row("uniform line upper g=0.1 vt=20", optimized_line_bound(&unif, 0.1, 20.0, Side::Upper, tol))?,
        row("uniform line lower g=0.1 vt=20", optimized_line_bound(&unif, 0.1, 20.0, Side::Lower, tol))?,
        row("uniform line upper g=0.05 vt=100", optimized_line_bound(&unif, 0.05, 100.0, Side::Upper, tol))?,
        row("uniform vee g=0.1 vt=20", vee_bound(&unif, 0.1, 20.0, Side::Upper, tol))?,
        row("uniform ray g=0.05 eta=2", eta_bound(&unif, 0.05, 2.0, 0.0, Side::Upper, EtaVariant::Ray, tol))?,
    ];
    groups.push(CrossingGroup {
        spec: ProcessSpec::IidSum { dist: StepDist::Uniform, n: 2000, v_per_step: 1.0 },
        horizon: HorizonRule::Fixed { horizon: 2000.0 },
        coupled: false,
        rows,
    });

    // Centered Bernoulli(0.3) sums.
    let hoeff = make_phi(PhiKind::HoeffdingBernoulli { mu: 0.3 })?;
    let bennett = make_phi(PhiKind::Bennett { sigma2: 0.21, b: 0.7 })?;
    let bern = ExpFamily::builtin(ExpFamilyKind::Bernoulli);
    let rows = vec![
        row("bernoulli line upper g=0.1 vt=60", optimized_line_bound(&hoeff, 0.1, 60.0, Side::Upper, tol))?,
        row("bernoulli line lower g=0.1 vt=60", optimized_line_bound(&hoeff, 0.1, 60.0, Side::Lower, tol))?,
        row("bernoulli expfam upper g=0.1 m=50", expfam_bound(&bern, 0.3, 0.1, 50, Side::Upper))?,
        row("bernoulli expfam upper g=0.1 m=100", expfam_bound(&bern, 0.3, 0.1, 100, Side::Upper))?,
        row("bernoulli expfam lower g=0.1 m=50", expfam_bound(&bern, 0.3, 0.1, 50, Side::Lower))?,
        row("bernoulli bennett-phi line g=0.1 vt=60", optimized_line_bound(&bennett, 0.1, 60.0, Side::Upper, tol))?,
        row("bernoulli ray g=0.05 eta=3", eta_bound(&hoeff, 0.05, 3.0, 0.0, Side::Upper, EtaVariant::Ray, tol))?,
    ];
    groups.push(CrossingGroup {
        spec: ProcessSpec::IidSum { dist: StepDist::Bernoulli { p: 0.3 }, n: 2000, v_per_step: 1.0 },
        horizon: HorizonRule::Fixed { horizon: 2000.0 },
        coupled: false,
        rows,
    });

    // Lazy walk with V = sum of conditional variances.
    let cbb = make_phi(PhiKind::CbbExp { b: 1.0 })?;
    let rows = vec![
        row("walk bennett g=0.5 vm=5", cbb_bounds(0.5, 5.0, 1.0, CbbKind::Bennett))?,
        row("walk bernstein g=3 vm=5", cbb_bounds(3.0, 5.0, 1.0, CbbKind::Bernstein))?,
        row("walk chernoff_sub g=3 vm=5", cbb_bounds(3.0, 5.0, 1.0, CbbKind::ChernoffSub))?,
        row("walk cbb-phi line g=0.4 vt=10", optimized_line_bound(&cbb, 0.4, 10.0, Side::Upper, tol))?,
        row("walk cbb-phi vee g=0.5 vt=5", vee_bound(&cbb, 0.5, 5.0, Side::Upper, tol))?,
    ];
    groups.push(CrossingGroup {
        spec: ProcessSpec::LazyWalk { p_move: 0.5, drift: 0.0, steps: 2000, v_per_step: 0.5 },
        horizon: HorizonRule::Fixed { horizon: 2000.0 },
        coupled: false,
        rows,
    });

    // Centered Poisson process, rate 1.
    let pois = make_phi(PhiKind::PoissonCentered { lambda: 1.0 })?;
    let rows = vec![
        row("poisson upper g=1 tau=1", poisson_bounds(1.0, 1.0, 1.0, Side::Upper))?,
        row("poisson upper g=0.5 tau=4", poisson_bounds(1.0, 0.5, 4.0, Side::Upper))?,
        row("poisson lower g=0.5 tau=6", poisson_bounds(1.0, 0.5, 6.0, Side::Lower))?,
        row("poisson phi line lower g=0.3 tau=10", optimized_line_bound(&pois, 0.3, 10.0, Side::Lower, tol))?,
        row("poisson ray g=0.5 eta=2", eta_bound(&pois, 0.5, 2.0, 0.0, Side::Upper, EtaVariant::Ray, tol))?,
    ];
    groups.push(CrossingGroup {
        spec: ProcessSpec::PoissonCounting { lambda: 1.0, horizon: 64.0, centered: true },
        horizon: HorizonRule::Fixed { horizon: 64.0 },
        coupled: false,
        rows,
    });

    // Exponential supermartingales.
    let rows = vec![
        row("uniform exp doob g=1.5", doob_exp_bound(1.5, false))?,
        row("uniform exp doob g=3", doob_exp_bound(3.0, false))?,
        row("uniform exp doob g=10", doob_exp_bound(10.0, false))?,
        row("uniform exp supermartingale g=4", supermartingale_sup_bound(1.0, 0.0, 4.0, false))?,
    ];
    groups.push(CrossingGroup {
        spec: ProcessSpec::ExpSupermartingale {
            base: Box::new(ProcessSpec::IidSum { dist: StepDist::Uniform, n: 2000, v_per_step: 1.0 }),
            s: 1.0,
            phi: PhiKind::Uniform24,
        },
        horizon: HorizonRule::Fixed { horizon: 2000.0 },
        coupled: false,
        rows,
    });
    let rows = vec![
        row("poisson exp doob g=2", doob_exp_bound(2.0, true))?,
        row("poisson exp doob g=5", doob_exp_bound(5.0, true))?,
    ];
    groups.push(CrossingGroup {
        spec: ProcessSpec::ExpSupermartingale {
            base: Box::new(ProcessSpec::PoissonCounting { lambda: 1.0, horizon: 64.0, centered: true }),
            s: std::f64::consts::LN_2,
            phi: PhiKind::PoissonCentered { lambda: 1.0 },
        },
        horizon: HorizonRule::Fixed { horizon: 64.0 },
        coupled: false,
        rows,
    });
    let rows = vec![row("walk exp doob g=2", doob_exp_bound(2.0, false))?];
    groups.push(CrossingGroup {
        spec: ProcessSpec::ExpSupermartingale {
            base: Box::new(ProcessSpec::LazyWalk { p_move: 1.0, drift: 0.0, steps: 2000, v_per_step: 1.0 }),
            s: 0.5,
            phi: PhiKind::Gaussian { v: 1.0 },
        },
        horizon: HorizonRule::Fixed { horizon: 2000.0 },
        coupled: false,
        rows,
    });

    Ok(Preset {
        name: "theorem9_all",
        description: "every bound family against simulated crossing frequencies on matching processes",
        seed: 9,
        n_paths: 50_000,
        alpha: 0.01,
        groups,
        stopping: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        for p in all().unwrap() {
            assert!(NAMES.contains(&p.name));
            for g in &p.groups {
                g.spec.validate().unwrap();
                for r in &g.rows {
                    assert!(r.bound.event.is_some(), "{}", r.label);
                }
            }
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn suite_rows_are_informative() {
        let p = preset("theorem9_all").unwrap();
        let rows: Vec<&CrossingRow> = p.groups.iter().flat_map(|g| &g.rows).collect();
        assert!(rows.len() >= 40, "{}", rows.len());
        for r in rows {
            assert!(r.bound.bound >= 0.05 && r.bound.bound < 1.0, "{}: {}", r.label, r.bound.bound);
        }
    }
}
