//! Command implementations.

use std::fs;

use averaging::checks::{bounds_suite, duality_suite, energy_suite, simplif_suite, DiagnosticReport, InvariantResult};
use averaging::engine::{run, run_at_root, run_snapshots, Summary};
use averaging::experiments::{
    contribution_decay, finite_consensus, geometric_grid, l2_convergence, mean_preservation, symmetry_test, ExperimentReport, Status,
};
use averaging::graph::FiniteGraph;
use averaging::{
    explore_region, sample_finite, seed, ClockConfig, Dyadic, GeneratorSpec, Graph, InitialLaw, MuLaw, Profile, UpdateSequence, VertexId,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CheckArgs, ClockArgs, ExperimentArgs, ExperimentName, Format, Job, ReplayArgs, RunConfig, SimulateArgs, Suite};
use crate::output::Output;
use crate::CliError;

/// Whether the run's verdicts passed.
pub type Verdict = bool;

fn build_graph(clock: &mut ClockArgs, run_seed: u64) -> Result<Graph, CliError> {
    let spec: GeneratorSpec = clock.graph.parse()?;
    let spec = spec.with_default_seed(seed::derive(run_seed, "graph", 0));
    clock.graph = spec.to_string();
    Ok(Graph::generate(&spec)?)
}

fn clock_config(clock: &mut ClockArgs, default_mu: &str, run_seed: u64, region_cap: usize) -> Result<ClockConfig, CliError> {
    let mu: MuLaw = clock.mu.get_or_insert_with(|| default_mu.into()).parse()?;
    let mut cfg = ClockConfig::new(clock.lambda, mu, seed::derive(run_seed, "clock", 0));
    cfg.region_cap = region_cap;
    cfg.validate()?;
    Ok(cfg)
}

fn law(spec: &mut Option<String>, default: &str, g: &Graph, run_seed: u64) -> Result<InitialLaw, CliError> {
    let spec = spec.get_or_insert_with(|| default.into());
    Ok(InitialLaw::parse(spec, g, seed::derive(run_seed, "law", 0))?)
}

/// Parses an optional vertex label, storing the resolved label back.
fn vertex(label: &mut Option<String>, g: &Graph, default: VertexId) -> Result<VertexId, CliError> {
    let v = match label {
        Some(s) => g.parse_vertex(s)?,
        None => default,
    };
    *label = Some(g.label(v));
    Ok(v)
}

fn finite(g: &Graph, what: &str) -> Result<FiniteGraph, CliError> {
    g.as_finite()
        .cloned()
        .ok_or_else(|| CliError::Usage(format!("{what} needs a finite graph")))
}

/// Resolves the job in place, runs it and writes every output file.
pub fn execute(config: &mut RunConfig, out: &Output) -> Result<Verdict, CliError> {
    let (run_seed, cap, format) = (config.seed, config.region_cap, config.format);
    match &mut config.job {
        Job::Simulate(a) => {
            let prepared = simulate_prepare(a, run_seed, cap)?;
            out.set_config(config)?;
            simulate(prepared, format, out)
        }
        Job::Check(a) => {
            let prepared = check_prepare(a, run_seed, cap)?;
            out.set_config(config)?;
            check(prepared, format, out)
        }
        Job::Experiment(a) => {
            let prepared = experiment_prepare(a, run_seed, cap)?;
            out.set_config(config)?;
            experiment(prepared, format, out)
        }
        Job::TraceReplay(a) => {
            let prepared = replay_prepare(a, run_seed, cap)?;
            out.set_config(config)?;
            replay(prepared, format, out)
        }
    }
}

#[derive(Serialize)]
struct Row {
    t: f64,
    vertex: String,
    value: f64,
}

fn write_rows(out: &Output, name: &str, format: Format, rows: &[Row]) -> Result<(), CliError> {
    match format {
        Format::Csv => out.csv(name, |w| {
            let mut w = csv::Writer::from_writer(w);
            w.write_record(["t", "vertex", "value"])?;
            for r in rows {
                w.write_record([r.t.to_string(), r.vertex.clone(), r.value.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }),
        Format::Json => out.json(name, &json!({ "rows": rows })),
    }
}

struct SimulateRun {
    g: Graph,
    cfg: ClockConfig,
    law: InitialLaw,
    t: f64,
    root: Option<VertexId>,
    times: Vec<f64>,
    trace: bool,
}

fn simulate_prepare(a: &mut SimulateArgs, run_seed: u64, cap: usize) -> Result<SimulateRun, CliError> {
    let g = build_graph(&mut a.clock, run_seed)?;
    let cfg = clock_config(&mut a.clock, "half", run_seed, cap)?;
    let law = law(&mut a.law, "uniform:0,1", &g, run_seed)?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return Err(CliError::Usage(format!("--t must be a finite non-negative time, got {}", a.t)));
    }
    let root = if g.is_finite() {
        a.root.as_ref().map(|r| g.parse_vertex(r)).transpose()?
    } else {
        Some(vertex(&mut a.root, &g, g.origin())?)
    };
    let mut times = a.snapshots.take().unwrap_or_else(|| vec![0.0, a.t]);
    times.sort_by(f64::total_cmp);
    times.dedup();
    if let Some(&bad) = times.iter().find(|&&s| !(0.0..=a.t).contains(&s)) {
        return Err(CliError::Usage(format!("snapshot time {bad} is outside [0, {}]", a.t)));
    }
    a.snapshots = Some(times.clone());
    if a.trace && !g.is_finite() {
        return Err(CliError::Usage("--trace needs a finite graph".into()));
    }
    Ok(SimulateRun {
        g,
        cfg,
        law,
        t: a.t,
        root,
        times,
        trace: a.trace,
    })
}

fn simulate(r: SimulateRun, format: Format, out: &Output) -> Result<Verdict, CliError> {
    let SimulateRun { g, cfg, law, t, root, times, trace } = r;
    let summary = if let Some(f) = g.as_finite() {
        let seq = sample_finite(&g, &cfg, t)?;
        let init = Profile::<f64>::sampled(law);
        let snaps = run_snapshots(&g, &init, &seq, &times)?;
        let mut rows = Vec::new();
        let mut last = Vec::new();
        for s in &snaps {
            last = s.profile.materialize(&g)?;
            for (&v, &value) in f.vertices().iter().zip(&last) {
                if root.is_none_or(|r| r == v) {
                    rows.push(Row { t: s.time, vertex: g.label(v), value });
                }
            }
        }
        if trace {
            out.csv("trace.csv", |w| Ok(seq.write_csv(&g, w)?))?;
        }
        write_rows(out, &format!("snapshots.{}", format.ext()), format, &rows)?;
        serde_json::to_value(Summary::of(&last, t, seq.len()))?
    } else {
        let root = root.expect("resolved for lazy graphs");
        let mut rows = Vec::new();
        for &s in &times {
            let value = run_at_root(&g, &law, &cfg, s, root)?;
            rows.push(Row { t: s, vertex: g.label(root), value });
        }
        let (region, seq) = explore_region(&g, root, &cfg, t)?;
        write_rows(out, &format!("snapshots.{}", format.ext()), format, &rows)?;
        json!({
            "horizon": t,
            "n_steps": seq.len(),
            "region_size": region.len(),
            "root": g.label(root),
            "value": rows.last().map(|r| r.value),
        })
    };
    println!("simulate: {summary}");
    out.json("summary.json", &json!({ "summary": summary }))?;
    Ok(true)
}

struct CheckRun {
    suite: Suite,
    g: Graph,
    cfg: ClockConfig,
    law: Option<InitialLaw>,
    t: f64,
    trials: usize,
    max_steps: usize,
    random_subsets: usize,
    exact: bool,
    n_updates: usize,
    resolution: f64,
    budget: u128,
}

fn check_prepare(a: &mut CheckArgs, run_seed: u64, cap: usize) -> Result<CheckRun, CliError> {
    let g = build_graph(&mut a.clock, run_seed)?;
    let default_mu = if a.suite == Suite::Duality { "uniform:0,0.5" } else { "half" };
    let cfg = clock_config(&mut a.clock, default_mu, run_seed, cap)?;
    let rate = |what: &str| -> Result<f64, CliError> { Ok(cfg.intensity * finite(&g, what)?.edge_count() as f64) };
    let mut law_out = None;
    match a.suite {
        Suite::Duality => {
            let steps = *a.max_steps.get_or_insert(500);
            a.trials.get_or_insert(1000);
            if a.t.is_none() {
                a.t = Some(steps as f64 / rate("the duality suite")?);
            }
        }
        Suite::Bounds => {
            a.trials.get_or_insert(200);
            a.t.get_or_insert(4.0);
        }
        Suite::Energy => {
            let steps = *a.max_steps.get_or_insert(100_000);
            law_out = Some(law(&mut a.law, "uniform:0,1", &g, run_seed)?);
            if a.t.is_none() {
                // Enough time for the expected step count to exceed the cap.
                a.t = Some((1.05 * steps as f64 + 100.0) / rate("the energy suite")?);
            }
        }
        Suite::Simplif => {
            finite(&g, "the simplif suite")?;
        }
    }
    Ok(CheckRun {
        suite: a.suite,
        cfg,
        law: law_out,
        t: a.t.unwrap_or(0.0),
        trials: a.trials.unwrap_or(0),
        max_steps: a.max_steps.unwrap_or(0),
        random_subsets: a.random_subsets,
        exact: a.exact,
        n_updates: a.n_updates,
        resolution: a.resolution,
        budget: a.budget,
        g,
    })
}

fn check(r: CheckRun, format: Format, out: &Output) -> Result<Verdict, CliError> {
    let (name, invariants) = match r.suite {
        Suite::Duality => ("duality", duality_suite(&r.g, &r.cfg, r.t, r.trials, r.max_steps)?),
        Suite::Bounds => ("bounds", bounds_suite(&r.g, &r.cfg, r.t, r.trials, r.random_subsets)?),
        Suite::Energy => {
            let law = r.law.as_ref().expect("resolved for energy");
            let inv = if r.exact {
                energy_suite::<Dyadic>(&r.g, law, &r.cfg, r.t, r.max_steps)?
            } else {
                energy_suite::<f64>(&r.g, law, &r.cfg, r.t, r.max_steps)?
            };
            ("energy", inv)
        }
        Suite::Simplif => ("simplif", simplif_suite(&r.g, r.n_updates, r.resolution, r.budget)?),
    };
    let report = DiagnosticReport::new(name, out.config_json(), invariants);
    for inv in &report.invariants {
        println!(
            "{} {}: checked {}, violations {}, worst {:e} (tol {:e})",
            if inv.passed { "PASS" } else { "FAIL" },
            inv.name,
            inv.checked,
            inv.violations,
            inv.worst,
            inv.tolerance
        );
    }
    out.json("report.json", &report)?;
    if format == Format::Csv {
        out.csv("invariants.csv", |w| write_invariants(w, &report.invariants))?;
    }
    Ok(report.passed)
}

fn write_invariants(w: &mut Vec<u8>, invariants: &[InvariantResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["name", "passed", "checked", "violations", "worst", "tolerance"])?;
    for i in invariants {
        w.write_record([
            i.name.clone(),
            i.passed.to_string(),
            i.checked.to_string(),
            i.violations.to_string(),
            format!("{:e}", i.worst),
            format!("{:e}", i.tolerance),
        ])?;
    }
    w.flush()?;
    Ok(())
}

struct ExperimentRun {
    name: ExperimentName,
    g: Graph,
    cfg: ClockConfig,
    law: Option<InitialLaw>,
    horizons: Vec<f64>,
    t: f64,
    replicas: usize,
    root: VertexId,
    u: VertexId,
    v: VertexId,
    args: ExperimentArgs,
}

fn experiment_prepare(a: &mut ExperimentArgs, run_seed: u64, cap: usize) -> Result<ExperimentRun, CliError> {
    use ExperimentName::*;
    let g = build_graph(&mut a.clock, run_seed)?;
    let cfg = clock_config(&mut a.clock, "half", run_seed, cap)?;
    let o = g.origin();
    let (mut law_out, mut root, mut u, mut v) = (None, o, o, o);
    match a.name {
        Mean | L2 => {
            law_out = Some(law(&mut a.law, "gaussian:0,1", &g, run_seed)?);
            let k = if a.name == Mean { 3 } else { 5 };
            a.horizons.get_or_insert_with(|| geometric_grid(k));
            a.replicas.get_or_insert(if a.name == Mean { 10_000 } else { 1000 });
            root = vertex(&mut a.root, &g, o)?;
        }
        Decay => {
            a.horizons.get_or_insert_with(|| geometric_grid(6));
            a.replicas.get_or_insert(1000);
            u = vertex(&mut a.u, &g, o)?;
            v = vertex(&mut a.v, &g, o)?;
        }
        Symmetry => {
            a.t.get_or_insert(2.0);
            a.replicas.get_or_insert(1000);
            u = vertex(&mut a.u, &g, o)?;
            let first = g
                .neighbors(u)
                .into_iter()
                .min()
                .ok_or_else(|| CliError::Usage("the symmetry test needs a vertex with a neighbor".into()))?;
            v = vertex(&mut a.v, &g, first)?;
        }
        Consensus => {
            finite(&g, "the consensus experiment")?;
            law_out = Some(law(&mut a.law, "uniform:0,1", &g, run_seed)?);
        }
    }
    Ok(ExperimentRun {
        name: a.name,
        cfg,
        law: law_out,
        horizons: a.horizons.clone().unwrap_or_default(),
        t: a.t.unwrap_or(0.0),
        replicas: a.replicas.unwrap_or(0),
        root,
        u,
        v,
        args: a.clone(),
        g,
    })
}

fn experiment(r: ExperimentRun, format: Format, out: &Output) -> Result<Verdict, CliError> {
    use ExperimentName::*;
    let a = &r.args;
    let report: ExperimentReport = match r.name {
        Mean => mean_preservation(&r.g, r.law.as_ref().unwrap(), &r.cfg, r.root, &r.horizons, r.replicas)?,
        L2 => l2_convergence(&r.g, r.law.as_ref().unwrap(), &r.cfg, r.root, &r.horizons, r.replicas)?,
        Decay => contribution_decay(&r.g, &r.cfg, r.u, r.v, &r.horizons, r.replicas, a.epsilon)?,
        Symmetry => symmetry_test(&r.g, &r.cfg, r.u, r.v, r.t, r.replicas, a.alpha, a.pairs)?,
        Consensus => {
            let f = finite(&r.g, "the consensus experiment")?;
            let law = r.law.as_ref().unwrap();
            let init: Vec<f64> = f.vertices().iter().map(|&v| law.sample_at(v)).collect();
            finite_consensus(&r.g, &init, &r.cfg, a.tolerance, a.budget)?
        }
    };
    let report = report.with_config(out.config_json());
    for v in &report.verdicts {
        println!(
            "{} {}{}: statistic {:e} (tol {:e})",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            if v.gating { "" } else { " [non-gating]" },
            v.statistic,
            v.tolerance
        );
    }
    println!("{}: {:?}", report.experiment, report.status);
    out.json("report.json", &report)?;
    if format == Format::Csv {
        for s in &report.series {
            out.csv(&format!("{}.csv", s.name), |w| Ok(report.write_series_csv(&s.name, w)?))?;
        }
    }
    if report.status == Status::Inconclusive {
        eprintln!("warning: experiment was inconclusive");
    }
    Ok(report.passed())
}

struct ReplayRun {
    g: Graph,
    law: InitialLaw,
    seq: UpdateSequence,
}

fn replay_prepare(a: &mut ReplayArgs, run_seed: u64, _cap: usize) -> Result<ReplayRun, CliError> {
    let g = build_graph(&mut a.clock, run_seed)?;
    let law = law(&mut a.law, "uniform:0,1", &g, run_seed)?;
    let text = fs::read_to_string(&a.trace).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.trace.display())))?;
    let seq = UpdateSequence::read_csv(&g, &text)?;
    Ok(ReplayRun { g, law, seq })
}

fn replay(r: ReplayRun, format: Format, out: &Output) -> Result<Verdict, CliError> {
    let ReplayRun { g, law, seq } = r;
    let init = Profile::<f64>::sampled(law);
    let fin = run(&g, &init, &seq)?;
    let t = seq.horizon;
    let (rows, summary): (Vec<Row>, Value) = match g.as_finite() {
        Some(f) => {
            let values = fin.materialize(&g)?;
            let rows = f
                .vertices()
                .iter()
                .zip(&values)
                .map(|(&v, &value)| Row { t, vertex: g.label(v), value })
                .collect();
            (rows, serde_json::to_value(Summary::of(&values, t, seq.len()))?)
        }
        None => {
            let rows: Vec<Row> = fin
                .entries()
                .map(|(v, &value)| Row { t, vertex: g.label(v), value })
                .collect();
            let touched = rows.len();
            (rows, json!({ "horizon": t, "n_steps": seq.len(), "touched": touched }))
        }
    };
    write_rows(out, &format!("final.{}", format.ext()), format, &rows)?;
    println!("trace-replay: {summary}");
    out.json("summary.json", &json!({ "summary": summary }))?;
    Ok(true)
}
