//! `maxbound` command-line interface.
//!
//! Exit codes: 0 success, 1 a validation verdict was `violated`, 2 configuration
//! or IO error, 3 domain violation in the numerics.

use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use maxbound::config::{parse_phi, BoundConfig, ConfigError, Format, RowConfig, RunConfig, SimulateConfig, ValidateConfig, OUT_DIR_ENV};
use maxbound::harness::Harness;
use maxbound::presets::{self, CrossingGroup, CrossingRow, HorizonRule};
use maxbound::report;
use maxbound::suite::{run_group, run_preset, RunOptions, SuiteReport};
use maxbound_core::bounds::{ExpFamilyKind, InequalityId};
use maxbound_core::sim::{generate, ProcessSpec, StepDist};

#[derive(Parser)]
#[command(name = "maxbound", version, about = "Maximal-inequality bounds and their Monte Carlo validation")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the merged configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one inequality.
    Bound(BoundArgs),
    /// Run a validation preset or explicit rows from the config file.
    Validate(ValidateArgs),
    /// Dump simulated paths as CSV.
    Simulate(SimulateArgs),
    /// Preset suites.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List preset names and descriptions.
    List,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_parser = parse_ineq)]
    ineq: Option<InequalityId>,
    /// `kind` or `kind:key=value,...`, e.g. `bennett:sigma2=1,b=1`.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Variance proxy level `V_tau`; step count for the exp-family bound is `--m`.
    #[arg(long)]
    vtau: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, value_parser = parse_family)]
    family: Option<ExpFamilyKind>,
    #[arg(long, allow_negative_numbers = true)]
    mean0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    continuous: bool,
    #[arg(long)]
    claims_equality: bool,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Fixed horizon; overrides the preset's horizon rule.
    #[arg(long)]
    horizon: Option<f64>,
    /// Directory for the CSV and JSON reports (default: `$MAXBOUND_OUT_DIR`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// What goes to stdout.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcessKind {
    Brownian,
    Poisson,
    Uniform,
    Bernoulli,
    Walk,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    process: Option<ProcessKind>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_move: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    drift: Option<f64>,
    #[arg(long)]
    centered: bool,
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_ineq(s: &str) -> Result<InequalityId, String> {
    s.parse().map_err(|e: maxbound_core::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<ExpFamilyKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

enum Failure {
    Violated,
    Config(String),
    Io(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violated => 1,
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Domain(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let msg = format!("{e:#}");
        if e.chain().any(|c| c.is::<ConfigError>()) {
            Failure::Config(msg)
        } else if e.chain().any(|c| c.is::<maxbound_core::Error>()) {
            Failure::Domain(msg)
        } else {
            Failure::Io(msg)
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Violated => eprintln!("maxbound: at least one verdict is `violated`"),
                Failure::Config(m) | Failure::Io(m) | Failure::Domain(m) => eprintln!("maxbound: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Presets { action: PresetsAction::List } => {
            let mut out = io::stdout().lock();
            for p in presets::all()? {
                writeln!(out, "{}\t{}", p.name, p.description).context("writing stdout")?;
            }
            Ok(())
        }
        Command::Bound(args) => {
            let cfg = merge_bound(file.bound.unwrap_or_default(), args)?;
            if cli.print_config {
                return print_config(RunConfig { bound: Some(cfg), ..Default::default() });
            }
            cmd_bound(&cfg)
        }
        Command::Validate(args) => {
            let format = args.format;
            let cfg = merge_validate(file.validate.unwrap_or_default(), args);
            if cli.print_config {
                return print_config(RunConfig { validate: Some(cfg), ..Default::default() });
            }
            cmd_validate(&cfg, format, cli.threads)
        }
        Command::Simulate(args) => {
            let cfg = merge_simulate(file.simulate.unwrap_or_default(), args)?;
            if cli.print_config {
                return print_config(RunConfig { simulate: Some(cfg), ..Default::default() });
            }
            cmd_simulate(&cfg)
        }
    }
}

fn print_config(cfg: RunConfig) -> Result<(), Failure> {
    print!("{}", cfg.to_toml());
    Ok(())
}

fn merge_bound(mut c: BoundConfig, a: BoundArgs) -> Result<BoundConfig, ConfigError> {
    macro_rules! over {
        ($($f:ident),*) => { $(if a.$f.is_some() { c.$f = a.$f; })* };
    }
    over!(ineq, gamma, eta, vtau, tau, s, b, lambda, theta, m, family, mean0, c, tol, format, output);
    if let Some(p) = &a.phi {
        c.phi = Some(parse_phi(p)?);
    }
    if a.continuous {
        c.continuous = Some(true);
    }
    if a.claims_equality {
        c.claims_equality = Some(true);
    }
    Ok(c)
}

fn merge_validate(mut c: ValidateConfig, a: ValidateArgs) -> ValidateConfig {
    macro_rules! over {
        ($($f:ident),*) => { $(if a.$f.is_some() { c.$f = a.$f; })* };
    }
    over!(preset, paths, seed, alpha, horizon, out_dir);
    c
}

fn merge_simulate(mut c: SimulateConfig, a: SimulateArgs) -> Result<SimulateConfig, ConfigError> {
    if a.paths.is_some() {
        c.paths = a.paths;
    }
    if a.seed.is_some() {
        c.seed = a.seed;
    }
    if a.output.is_some() {
        c.output = a.output;
    }
    if let Some(kind) = a.process {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| ConfigError::new(key, "is required for this process"));
        let steps = || a.steps.ok_or_else(|| ConfigError::new("steps", "is required for this process"));
        c.process = Some(match kind {
            ProcessKind::Brownian => ProcessSpec::Brownian { dt: need(a.dt, "dt")?, horizon: need(a.horizon, "horizon")?, refine: 0 },
            ProcessKind::Poisson => ProcessSpec::PoissonCounting {
                lambda: need(a.lambda, "lambda")?,
                horizon: need(a.horizon, "horizon")?,
                centered: a.centered,
            },
            ProcessKind::Uniform => ProcessSpec::IidSum { dist: StepDist::Uniform, n: steps()?, v_per_step: 1.0 / 12.0 },
            ProcessKind::Bernoulli => {
                let p = need(a.p, "p")?;
                ProcessSpec::IidSum { dist: StepDist::Bernoulli { p }, n: steps()?, v_per_step: p * (1.0 - p) }
            }
            ProcessKind::Walk => ProcessSpec::LazyWalk {
                p_move: a.p_move.unwrap_or(1.0),
                drift: a.drift.unwrap_or(0.0),
                steps: steps()?,
                v_per_step: a.p_move.unwrap_or(1.0),
            },
        });
    }
    Ok(c)
}

fn write_to(path: Option<&FsPath>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?);
            f(&mut file)?;
            file.flush().with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = io::stdout().lock();
            f(&mut out)?;
            out.flush().context("writing stdout")
        }
    }
}

fn cmd_bound(cfg: &BoundConfig) -> Result<(), Failure> {
    let r = match cfg.compute() {
        Ok(r) => r,
        Err(maxbound::config::BoundError::Config(e)) => return Err(e.into()),
        Err(maxbound::config::BoundError::Core(e)) => return Err(Failure::Domain(e.to_string())),
    };
    write_to(cfg.output.as_deref(), |w| match cfg.format.unwrap_or_default() {
        Format::Csv => report::bounds_csv(w, std::slice::from_ref(&r)),
        Format::Json => Ok(writeln!(w, "{}", report::to_json(&r)?)?),
    })?;
    Ok(())
}

fn cmd_validate(cfg: &ValidateConfig, format: Format, threads: Option<usize>) -> Result<(), Failure> {
    let h = Harness::new(threads)?;
    let report = match (&cfg.preset, cfg.rows.is_empty()) {
        (Some(name), _) => {
            if !presets::NAMES.contains(&name.as_str()) {
                return Err(ConfigError::new("preset", format!("unknown preset `{name}`; see `presets list`")).into());
            }
            let preset = presets::preset(name)?;
            let mut opts = RunOptions::for_preset(&preset);
            if let Some(n) = cfg.paths {
                opts.n_paths = n;
            }
            if let Some(s) = cfg.seed {
                opts.seed = s;
            } else {
                eprintln!("maxbound: no --seed given, using the preset seed {}", opts.seed);
            }
            if let Some(a) = cfg.alpha {
                opts.alpha = a;
            }
            opts.horizon = cfg.horizon;
            check_options(&opts)?;
            run_preset(&h, &preset, &opts)?
        }
        (None, false) => explicit_rows(&h, cfg)?,
        (None, true) => return Err(ConfigError::new("preset", "name a preset or give explicit [[validate.rows]]").into()),
    };
    for line in report::summary_lines(&report) {
        eprintln!("{line}");
    }
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    let out_dir = cfg.out_dir.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = out_dir {
        write_reports(&dir, &report)?;
    }
    write_to(None, |w| match format {
        Format::Json => Ok(writeln!(w, "{}", report::to_json(&report)?)?),
        Format::Csv if report.validations.is_empty() && !report.stopping.is_empty() => report::stopping_csv(w, &report.stopping),
        Format::Csv => report::validations_csv(w, &report.validations),
    })?;
    if report.any_violated() {
        return Err(Failure::Violated);
    }
    Ok(())
}

fn check_options(o: &RunOptions) -> Result<(), ConfigError> {
    if o.n_paths == 0 {
        return Err(ConfigError::new("paths", "must be positive"));
    }
    if !(o.alpha > 0.0 && o.alpha < 1.0) {
        return Err(ConfigError::new("alpha", "must lie in (0, 1)"));
    }
    if let Some(t) = o.horizon {
        if !(t.is_finite() && t > 0.0) {
            return Err(ConfigError::new("horizon", "must be positive and finite"));
        }
    }
    Ok(())
}

fn explicit_rows(h: &Harness, cfg: &ValidateConfig) -> Result<SuiteReport, Failure> {
    let spec = cfg.process.clone().ok_or_else(|| ConfigError::new("process", "is required with explicit rows"))?;
    let seed = cfg.seed.ok_or_else(|| ConfigError::new("seed", "is required with explicit rows"))?;
    let opts = RunOptions {
        n_paths: cfg.paths.ok_or_else(|| ConfigError::new("paths", "is required with explicit rows"))?,
        seed,
        alpha: cfg.alpha.unwrap_or(0.01),
        horizon: cfg.horizon,
    };
    check_options(&opts)?;
    let rows = cfg
        .rows
        .iter()
        .enumerate()
        .map(|(i, r): (usize, &RowConfig)| {
            let bound = r.bound.compute().map_err(|e| match e {
                maxbound::config::BoundError::Config(e) => Failure::Config(format!("row {i}: {e}")),
                maxbound::config::BoundError::Core(e) => Failure::Domain(format!("row {i}: {e}")),
            })?;
            let label = r.label.clone().unwrap_or_else(|| format!("row{i}:{}", bound.inequality));
            Ok(CrossingRow { label, bound })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let group = CrossingGroup { horizon: HorizonRule::Fixed { horizon: spec.horizon() }, spec, coupled: false, rows };
    let start = std::time::Instant::now();
    let (validations, _) = run_group(h, &group, &opts)?;
    Ok(SuiteReport {
        preset: "explicit".into(),
        seed,
        n_paths: opts.n_paths,
        alpha: opts.alpha,
        validations,
        stopping: Vec::new(),
        horizons: Vec::new(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn write_reports(dir: &FsPath, r: &SuiteReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let base = dir.join(&r.preset);
    let with = |suffix: &str| PathBuf::from(format!("{}{suffix}", base.display()));
    write_to(Some(&with("_validation.csv")), |w| report::validations_csv(w, &r.validations))?;
    if !r.stopping.is_empty() {
        write_to(Some(&with("_stopping.csv")), |w| report::stopping_csv(w, &r.stopping))?;
    }
    write_to(Some(&with(".json")), |w| Ok(writeln!(w, "{}", report::to_json(r)?)?))?;
    eprintln!("reports written to {}", dir.display());
    Ok(())
}

fn cmd_simulate(cfg: &SimulateConfig) -> Result<(), Failure> {
    let spec = cfg.process.clone().ok_or_else(|| ConfigError::new("process", "is required"))?;
    let n = cfg.paths.unwrap_or(1);
    let seed = cfg.seed.unwrap_or(0);
    let paths = (0..n).map(|i| generate(&spec, seed, i)).collect::<Result<Vec<_>, _>>().map_err(|e| Failure::Domain(e.to_string()))?;
    write_to(cfg.output.as_deref(), |w| report::paths_csv(w, &paths))?;
    Ok(())
}
