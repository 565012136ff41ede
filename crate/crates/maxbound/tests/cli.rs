use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use maxbound::config::RunConfig;

fn maxbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxbound"))
        .args(args)
        .env_remove("MAXBOUND_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Rows of a CSV document as header-keyed maps.
fn records(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().unwrap().clone();
    rd.records()
        .map(|r| headers.iter().map(String::from).zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

fn bound_value(args: &[&str]) -> f64 {
    let mut full = vec!["bound"];
    full.extend_from_slice(args);
    let o = maxbound(&full);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = records(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["schema_version"], "1");
    rows[0]["bound"].parse().unwrap()
}

#[test]
fn bound_examples() {
    let v = bound_value(&["--ineq", "azuma_two_sided", "--gamma", "2", "--vtau", "1"]);
    assert!((v - 2.0 * (-2f64).exp()).abs() < 1e-14);
    assert!((v - 0.27067).abs() < 5e-6);
    assert_eq!(bound_value(&["--ineq", "doob_exp", "--gamma", "2"]), 0.5);
    let v = bound_value(&["--ineq", "poisson_upper", "--lambda", "1", "--gamma", "1", "--tau", "1"]);
    assert!((v - std::f64::consts::E / 4.0).abs() < 1e-14);
    let v = bound_value(&["--ineq", "gen_line_upper", "--phi", "gaussian", "--gamma", "1", "--vtau", "1"]);
    assert!((v - (-0.5f64).exp()).abs() < 1e-12);
}

#[test]
fn bound_json_is_versioned() {
    let o = maxbound(&["bound", "--ineq", "doob_exp", "--gamma", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["bound"], 0.25);
    assert_eq!(v["event"]["kind"], "sup_level");
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let o = maxbound(&["bound", "--ineq", "poisson_upper", "--gamma", "1", "--tau", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`lambda`"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[bound]\nineq = \"doob_exp\"\ngama = 2.0\n").unwrap();
    let o = maxbound(&["--config", cfg.to_str().unwrap(), "bound"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`gama`"));

    let o = maxbound(&["--config", dir.path().join("absent.toml").to_str().unwrap(), "bound"]);
    assert_eq!(o.status.code(), Some(2));

    let o = maxbound(&["validate", "--preset", "no_such_preset"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`preset`"));
}

#[test]
fn domain_violations_exit_3() {
    let o = maxbound(&["bound", "--ineq", "azuma_upper", "--gamma", "-1", "--vtau", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = maxbound(&["bound", "--ineq", "gen_line_lower", "--phi", "bernstein:b=1", "--gamma", "1", "--vtau", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = maxbound(&["simulate", "--process", "brownian", "--dt", "0", "--horizon", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[bound]\nineq = \"poisson_upper\"\nlambda = 1.0\ngamma = 5.0\ntau = 1.0\n").unwrap();
    let o = maxbound(&["--config", cfg.to_str().unwrap(), "bound", "--gamma", "1"]);
    let rows = records(&stdout(&o));
    let v: f64 = rows[0]["bound"].parse().unwrap();
    assert!((v - std::f64::consts::E / 4.0).abs() < 1e-14);
}

#[test]
fn print_config_round_trips() {
    let cases: [&[&str]; 3] = [
        &["bound", "--ineq", "gen_line_upper", "--phi", "bennett:sigma2=0.5,b=2", "--gamma", "0.3", "--vtau", "4", "--format", "json"],
        &["validate", "--preset", "theorem9_all", "--paths", "1000", "--seed", "11", "--alpha", "0.05"],
        &["simulate", "--process", "poisson", "--lambda", "2", "--horizon", "10", "--centered", "--paths", "3", "--seed", "1"],
    ];
    let dir = tempfile::tempdir().unwrap();
    for args in cases {
        let mut full = args.to_vec();
        full.push("--print-config");
        let o = maxbound(&full);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = stdout(&o);
        let parsed = RunConfig::parse(&text).unwrap();
        assert_eq!(parsed.to_toml(), text);

        // Feeding the printed config back in reproduces it.
        let path = dir.path().join("c.toml");
        fs::write(&path, &text).unwrap();
        let o = maxbound(&["--config", path.to_str().unwrap(), args[0], "--print-config"]);
        assert_eq!(RunConfig::parse(&stdout(&o)).unwrap(), parsed);
    }
}

#[test]
fn simulate_brownian_grid() {
    let o = maxbound(&["simulate", "--process", "brownian", "--dt", "0.25", "--horizon", "1", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = records(&stdout(&o));
    assert_eq!(rows.len(), 5);
    let times: Vec<f64> = rows.iter().map(|r| r["time"].parse().unwrap()).collect();
    assert_eq!(times, [0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(rows[0]["value"], "0");
    assert_eq!(rows[4]["vproxy"], "1");
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = maxbound(&["simulate", "--process", "poisson", "--lambda", "2", "--horizon", "10", "--paths", "4", "--seed", "9", "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn simulate_poisson_counts() {
    let o = maxbound(&["simulate", "--process", "poisson", "--lambda", "2", "--horizon", "10", "--paths", "400", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = records(&stdout(&o));
    let mut per_path = vec![Vec::new(); 400];
    for r in &rows {
        per_path[r["path"].parse::<usize>().unwrap()].push(r["value"].parse::<f64>().unwrap());
    }
    let mut total = 0.0;
    for values in &per_path {
        let jumps = *values.last().unwrap();
        // One row per jump plus the two endpoints.
        assert_eq!(values.len() as f64, jumps + 2.0);
        total += jumps;
    }
    let mean = total / 400.0;
    // sd of the mean is sqrt(20 / 400) ≈ 0.22.
    assert!((mean - 20.0).abs() < 1.0, "mean jumps {mean}");
}

fn explicit_config(dir: &Path, process: &str, ineq_lines: &str, seed: Option<u64>) -> String {
    let path = dir.join("validate.toml");
    let seed = seed.map(|s| format!("seed = {s}\n")).unwrap_or_default();
    fs::write(&path, format!("[validate]\npaths = 4000\n{seed}\n[validate.process]\n{process}\n\n[[validate.rows]]\n[validate.rows.bound]\n{ineq_lines}\n")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn explicit_rows_hold_on_the_matching_process() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = explicit_config(
        dir.path(),
        "process = \"brownian\"\ndt = 0.01\nhorizon = 4.0",
        "ineq = \"azuma_upper\"\ngamma = 1.5\nvtau = 1.0",
        Some(5),
    );
    let o = maxbound(&["--config", &cfg, "validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = records(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["verdict"], "holds");
    assert_eq!(rows[0]["n_paths"], "4000");
}

#[test]
fn mismatched_process_is_violated_and_exits_1() {
    // A Gaussian bound at unit variance against a Poisson process of rate 5.
    let dir = tempfile::tempdir().unwrap();
    let cfg = explicit_config(
        dir.path(),
        "process = \"poisson_counting\"\nlambda = 5.0\nhorizon = 8.0\ncentered = true",
        "ineq = \"azuma_upper\"\ngamma = 2.0\nvtau = 1.0",
        Some(5),
    );
    let o = maxbound(&["--config", &cfg, "validate"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(records(&stdout(&o))[0]["verdict"], "violated");
}

#[test]
fn explicit_rows_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = explicit_config(dir.path(), "process = \"brownian\"\ndt = 0.01\nhorizon = 1.0", "ineq = \"doob_exp\"\ngamma = 2.0", None);
    let o = maxbound(&["--config", &cfg, "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`seed`"));
}

#[test]
fn validate_preset_writes_reports_and_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = Command::new(env!("CARGO_BIN_EXE_maxbound"))
            .args(["validate", "--preset", "optional_stopping", "--paths", "3000", "--seed", "3", "--threads", threads])
            .env("MAXBOUND_OUT_DIR", &out)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (o.stdout, out)
    };
    let (a, out_a) = run("1", "a");
    let (b, _) = run("2", "b");
    let strip = |s: &[u8]| -> Vec<String> {
        records(std::str::from_utf8(s).unwrap())
            .into_iter()
            .map(|mut r| {
                r.remove("runtime_seconds");
                let mut v: Vec<_> = r.into_iter().collect();
                v.sort();
                format!("{v:?}")
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(strip(&a).len(), 3);
    for f in ["optional_stopping_stopping.csv", "optional_stopping.json", "optional_stopping_validation.csv"] {
        assert!(out_a.join(f).exists(), "{f}");
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_a.join("optional_stopping.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["seed"], 3);
}

#[test]
fn presets_list_names_every_preset() {
    let o = maxbound(&["presets", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split('\t').next().unwrap().to_string()).collect();
    assert_eq!(names, maxbound::presets::NAMES);
}
