use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use averaging::engine::run_finite;
use averaging::{sample_finite, seed, ClockConfig, Graph, InitialLaw, MuLaw};
use serde_json::Value;
use tempfile::TempDir;

fn avgsim(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avgsim"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// `(t, vertex, value)` rows of a snapshot CSV, skipping the config line.
fn rows(path: &Path) -> Vec<(f64, String, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config={"));
    assert_eq!(lines.next().unwrap(), "t,vertex,value");
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].to_string(), f[2].parse().unwrap())
        })
        .collect()
}

fn same_files(a: &Path, b: &Path) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?} differs");
    }
}

#[test]
fn simulate_is_deterministic_and_rerunnable() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let args = ["simulate", "--graph", "cycle:n=10", "--law", "uniform:0,1", "--t", "50", "--seed", "7"];
    assert_eq!(code(&avgsim(&a, &args)), 0);
    assert_eq!(code(&avgsim(&b, &args)), 0);
    same_files(&a, &b);
    let o = avgsim(&c, &["rerun", a.join("config.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    same_files(&a, &c);

    let summary = read_json(&a.join("summary.json"));
    assert_eq!(summary["config"]["seed"], 7);
    assert_eq!(summary["config"]["job"]["graph"], "cycle:n=10");
    let s = &summary["summary"];
    assert!((s["sum"].as_f64().unwrap() - rows(&a.join("snapshots.csv")).iter().filter(|r| r.0 == 0.0).map(|r| r.2).sum::<f64>()).abs() < 1e-12);
}

#[test]
fn different_seeds_differ() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    avgsim(&a, &["simulate", "--graph", "cycle:n=10", "--t", "5", "--seed", "1"]);
    avgsim(&b, &["simulate", "--graph", "cycle:n=10", "--t", "5", "--seed", "2"]);
    assert_ne!(rows(&a.join("snapshots.csv")), rows(&b.join("snapshots.csv")));
}

#[test]
fn zero_horizon_outputs_the_initial_profile() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&avgsim(dir.path(), &["simulate", "--graph", "cycle:n=8", "--t", "0", "--seed", "3"])), 0);
    let g = Graph::generate(&"cycle:n=8".parse().unwrap()).unwrap();
    let law = InitialLaw::parse("uniform:0,1", &g, seed::derive(3, "law", 0)).unwrap();
    let rows = rows(&dir.path().join("snapshots.csv"));
    assert_eq!(rows.len(), 8);
    for (t, v, value) in rows {
        assert_eq!(t, 0.0);
        assert_eq!(value, law.sample_at(g.parse_vertex(&v).unwrap()));
    }
}

#[test]
fn lazy_root_matches_eager_ball_run() {
    let dir = TempDir::new().unwrap();
    let o = avgsim(
        dir.path(),
        &["simulate", "--graph", "lattice:d=2", "--law", "gaussian:0,1", "--t", "4", "--root", "0,0", "--seed", "11"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lazy = rows(&dir.path().join("snapshots.csv"));
    let (t, _, value) = lazy.last().unwrap().clone();
    assert_eq!(t, 4.0);

    let z2 = Graph::generate(&"lattice:d=2".parse().unwrap()).unwrap();
    let ball = z2.ball_subgraph(z2.origin(), 40).unwrap();
    let f = ball.as_finite().unwrap();
    let cfg = ClockConfig::new(1.0, MuLaw::Half, seed::derive(11, "clock", 0));
    let law = InitialLaw::parse("gaussian:0,1", &z2, seed::derive(11, "law", 0)).unwrap();
    let init: Vec<f64> = f.vertices().iter().map(|&v| law.sample_at(v)).collect();
    let seq = sample_finite(&ball, &cfg, 4.0).unwrap();
    let eager = run_finite(f, &init, &seq).unwrap();
    assert_eq!(value.to_bits(), eager[f.index_of(z2.origin()).unwrap()].to_bits());
}

#[test]
fn trace_replay_reproduces_the_final_snapshot() {
    let dir = TempDir::new().unwrap();
    let (sim, rep) = (dir.path().join("sim"), dir.path().join("rep"));
    let common = ["--graph", "random-regular:n=12,d=3,seed=4", "--law", "bernoulli:0.3", "--mu", "uniform:0.1,0.5", "--seed", "9"];
    let mut args = vec!["simulate", "--t", "6", "--trace"];
    args.extend(common);
    assert_eq!(code(&avgsim(&sim, &args)), 0);
    let trace = sim.join("trace.csv");
    let mut args = vec!["trace-replay", "--trace", trace.to_str().unwrap()];
    args.extend(common);
    let o = avgsim(&rep, &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let last: Vec<_> = rows(&sim.join("snapshots.csv")).into_iter().filter(|r| r.0 == 6.0).collect();
    assert_eq!(last, rows(&rep.join("final.csv")));
}

#[test]
fn json_format_writes_json_tables() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&avgsim(dir.path(), &["--format", "json", "simulate", "--graph", "path:n=4", "--t", "2"])), 0);
    let v = read_json(&dir.path().join("snapshots.json"));
    assert_eq!(v["config"]["format"], "json");
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn check_duality_passes_with_report() {
    let dir = TempDir::new().unwrap();
    let o = avgsim(dir.path(), &["check", "duality", "--graph", "random-regular:n=20,d=3", "--trials", "200"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_json(&dir.path().join("report.json"));
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["job"]["suite"], "duality");
    let float = r["invariants"].as_array().unwrap().iter().find(|i| i["name"] == "duality_float").unwrap();
    assert!(float["worst"].as_f64().unwrap() <= 1e-10);
    assert!(dir.path().join("invariants.csv").exists());
}

#[test]
fn check_bounds_and_simplif_pass() {
    let dir = TempDir::new().unwrap();
    let o = avgsim(&dir.path().join("b"), &["check", "bounds", "--graph", "tree:b=3", "--t", "8", "--lambda", "0.25", "--trials", "50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = avgsim(&dir.path().join("s"), &["check", "simplif", "--graph", "path:n=3", "--n-updates", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = read_json(&dir.path().join("s/report.json"));
    assert_eq!(r["passed"], true);
}

#[test]
fn experiment_mean_of_dirac_is_exact_and_rerunnable() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = avgsim(&a, &["experiment", "mean", "--law", "dirac:3", "--replicas", "100", "--horizons", "1,2"]);
    assert_eq!(code(&o), 0);
    let r = read_json(&a.join("report.json"));
    for p in r["series"][0]["points"].as_array().unwrap() {
        assert_eq!(p["estimate"].as_f64().unwrap(), 3.0);
    }
    avgsim(&b, &["rerun", a.join("config.json").to_str().unwrap()]);
    same_files(&a, &b);
}

#[test]
fn experiment_symmetry_on_star_passes() {
    let dir = TempDir::new().unwrap();
    let o = avgsim(dir.path(), &["experiment", "symmetry", "--graph", "star:n=6", "--u", "center", "--v", "leaf0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn verdict_failure_exits_one() {
    // At level 0.99 almost every KS p-value is a rejection.
    let dir = TempDir::new().unwrap();
    let o = avgsim(
        dir.path(),
        &["experiment", "symmetry", "--graph", "star:n=6", "--u", "center", "--v", "leaf0", "--alpha", "0.99", "--seed", "1"],
    );
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(read_json(&dir.path().join("report.json"))["status"], "fail");
}

#[test]
fn usage_errors_exit_two_and_name_the_token() {
    let dir = TempDir::new().unwrap();
    let o = avgsim(dir.path(), &["simulate", "--graph", "cycle:n=10", "--law", "weibull:2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("weibull:2"));
    let o = avgsim(dir.path(), &["check", "energy", "--graph", "lattice:d=2"]);
    assert_eq!(code(&o), 2);
    let o = avgsim(dir.path(), &["simulate", "--bogus-flag"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn region_cap_override_is_a_resource_error() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_avgsim"))
        .env("AVGSIM_REGION_CAP", "10")
        .args(["--out", dir.path().to_str().unwrap(), "simulate", "--graph", "lattice:d=2", "--t", "8"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("safety cap"));
}
