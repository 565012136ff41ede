//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.
//!
//! `MAXBOUND_ACCEPTANCE=quick` runs the Monte Carlo criteria at 1/20 of the
//! path counts for a smoke check; the verdicts are only meaningful at full size.

use std::process::ExitCode;
use std::time::Instant;

use maxbound::harness::Harness;
use maxbound::presets::preset;
use maxbound::suite::{run_preset, RunOptions, SuiteReport};
use maxbound_core::bounds::{azuma_bound, cbb_bounds, optimized_line_bound, poisson_bounds, AzumaKind, CbbKind, ExpFamily, ExpFamilyKind};
use maxbound_core::mgf::{make_phi, PhiKind, Side};
use maxbound_core::optimize::{minimize_tail_exponent, DEFAULT_TOL};
use maxbound_core::validate::Verdict;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn scale() -> u64 {
    match std::env::var("MAXBOUND_ACCEPTANCE").as_deref() {
        Ok("quick") => 20,
        _ => 1,
    }
}

fn suite(h: &Harness, name: &str, n_paths: u64) -> SuiteReport {
    let p = preset(name).expect("preset builds");
    let mut opts = RunOptions::for_preset(&p);
    opts.n_paths = n_paths / scale();
    run_preset(h, &p, &opts).expect("preset runs")
}

fn exactness(h: &Harness) -> Outcome {
    let r = suite(h, "expexact_brownian", 200_000);
    let mut pass = r.validations.len() == 3;
    let mut parts = Vec::new();
    for v in &r.validations {
        let target = v.bound;
        let ok = v.matches_exact_value() && (v.p_hat - target).abs() <= 0.02;
        pass &= ok;
        parts.push(format!(
            "1/g={target:.4} p={:.4} ci=[{:.4},{:.4}] allow={:.4}{}",
            v.p_hat,
            v.ci.lo,
            v.ci.hi,
            v.grid_allowance.unwrap_or(0.0),
            if ok { "" } else { " (miss)" }
        ));
    }
    let horizon = r.horizons.first().map(|c| c.horizon).unwrap_or(f64::NAN);
    outcome(pass, format!("T={horizon} {}", parts.join("; ")))
}

fn domination(h: &Harness) -> Outcome {
    let r = suite(h, "theorem9_all", 50_000);
    let violated: Vec<&str> = r.validations.iter().filter(|v| v.verdict == Verdict::Violated).map(|v| v.label.as_str()).collect();
    let inconclusive = r.validations.iter().filter(|v| v.verdict == Verdict::Inconclusive).count();
    outcome(
        violated.is_empty() && r.validations.len() >= 40,
        format!(
            "{} rows, {} violated {:?}, {} inconclusive, {:.0}s",
            r.validations.len(),
            violated.len(),
            violated,
            inconclusive,
            r.runtime_seconds
        ),
    )
}

fn optional_stopping(h: &Harness) -> Outcome {
    let r = suite(h, "optional_stopping", 100_000);
    let (Some(sym), Some(drift)) = (r.stopping.first(), r.stopping.get(1)) else {
        return outcome(false, "missing stopping cases");
    };
    let s = &sym.report;
    let d = &drift.report;
    let sym_ok = s.mean_inner.abs() <= 3.0 * s.se_inner && s.mean_outer.abs() <= 3.0 * s.se_outer && s.truncation_fraction < 1e-3;
    let drift_ok = d.mean_outer <= d.mean_inner + 3.0 * d.se_diff;
    outcome(
        sym_ok && drift_ok,
        format!(
            "sym E1={:.4}±{:.4} E2={:.4}±{:.4} trunc={:.5}; drift E1={:.4} E2={:.4} se_diff={:.4}",
            s.mean_inner, s.se_inner, s.mean_outer, s.se_outer, s.truncation_fraction, d.mean_inner, d.mean_outer, d.se_diff
        ),
    )
}

const GAMMAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

fn closed_forms() -> Outcome {
    let mut worst = 0.0f64;
    let mut check = |kind: PhiKind, exact: &dyn Fn(f64) -> f64| {
        let phi = make_phi(kind).unwrap();
        for g in GAMMAS {
            let r = minimize_tail_exponent(&phi, g, Side::Upper, DEFAULT_TOL).unwrap();
            let s = r.s_opt.value().unwrap_or(f64::NAN);
            let err = (s - exact(g)).abs();
            worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
        }
    };
    for b in [0.5, 1.0, 2.0] {
        check(PhiKind::CbbExp { b }, &|g| (1.0 + b * g).ln() / b);
    }
    for l in [0.5, 1.0, 3.0] {
        check(PhiKind::PoissonCentered { lambda: l }, &|g| ((l + g) / l).ln());
    }
    check(PhiKind::Gaussian { v: 1.0 }, &|g| g);
    outcome(worst <= 1e-8, format!("max |s - s*| = {worst:.2e}"))
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn identities() -> Outcome {
    let mut worst = 0.0f64;
    let gauss = make_phi(PhiKind::Gaussian { v: 1.0 }).unwrap();
    for g in GAMMAS {
        for v in [0.25, 1.0, 4.0, 30.0] {
            let a = azuma_bound(g, v, AzumaKind::Upper).unwrap();
            let o = optimized_line_bound(&gauss, g / v, v, Side::Upper, DEFAULT_TOL).unwrap();
            worst = worst.max(rel(a.raw, o.raw));
            for b in [0.5, 1.0, 2.0] {
                let phi = make_phi(PhiKind::CbbExp { b }).unwrap();
                let c = cbb_bounds(g, v, b, CbbKind::Bennett).unwrap();
                let o = optimized_line_bound(&phi, g, v, Side::Upper, DEFAULT_TOL).unwrap();
                worst = worst.max(rel(c.raw, o.raw));
            }
            for l in [0.5, 1.0, 5.0] {
                let phi = make_phi(PhiKind::PoissonCentered { lambda: l }).unwrap();
                let p = poisson_bounds(l, g, v, Side::Upper).unwrap();
                let o = optimized_line_bound(&phi, g, v, Side::Upper, DEFAULT_TOL).unwrap();
                worst = worst.max(rel(p.raw, o.raw));
            }
        }
    }
    outcome(worst <= 1e-12, format!("max relative difference {worst:.2e}"))
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn lemmas() -> Outcome {
    let sinh = grid(-50.0, 50.0, 10_000).all(|s| {
        let h = 0.5 * s;
        let lhs = if h == 0.0 { 0.0 } else { (h.sinh() / h).ln() };
        lhs <= s * s / 24.0
    });
    let aux = grid(1e-4, 3.0 - 1e-4, 10_000).all(|s| (s.exp_m1() - s) / (s * s) <= 1.0 / (2.0 * (1.0 - s / 3.0)));
    let sub = grid(1e-4, 1.75, 10_000).all(|s| s.exp_m1() - s <= s * s);
    let fam = ExpFamily::builtin(ExpFamilyKind::Bernoulli);
    let slope = (1..40).all(|i| {
        let theta = i as f64 / 40.0;
        (1..40).all(|j| {
            let gamma = (1.0 - theta) * j as f64 / 40.0;
            let k = fam.rho_slope(theta + gamma, theta) - theta;
            k > 0.0 && k < gamma
        })
    });
    outcome(sinh && aux && sub && slope, format!("sinh {sinh}, cbb aux {aux}, e^s-1-s {sub}, expfam slope {slope}"))
}

fn certain_crossing(h: &Harness) -> Outcome {
    let r = suite(h, "certain_crossing", 20_000);
    match r.validations.iter().find(|v| v.label == "supermartingale_sup gamma=1") {
        Some(v) => outcome(v.p_hat >= 0.999, format!("frequency {:.5} over {} paths", v.p_hat, v.n_paths)),
        None => outcome(false, "gamma=1 row missing"),
    }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let h = Harness::new(None).expect("worker pool");
    let criteria: [Criterion; 7] = [
        ("exactness of 1/gamma for the Brownian exponential martingale", Box::new(|| exactness(&h))),
        ("bound domination across the preset suite", Box::new(|| domination(&h))),
        ("optional stopping on nested regions", Box::new(|| optional_stopping(&h))),
        ("optimizer closed forms", Box::new(closed_forms)),
        ("pipeline identities", Box::new(identities)),
        ("numeric lemmas", Box::new(lemmas)),
        ("certain crossing at gamma = 1", Box::new(|| certain_crossing(&h))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        println!("{} [{}] {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    if scale() != 1 {
        println!("note: quick mode, Monte Carlo criteria ran at reduced path counts");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
