//! Diagnostic suites: each runs many randomized instances of one family of
//! invariants and reports pass/fail with the worst case found.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagnostics::{
    distances_from, max_sad_levels, subset_sweep, EnergyTracker, MuMode, PotentialFunction, BOUND_TOLERANCE,
};
use crate::engine::{localize, run_dense};
use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Graph, VertexId};
use crate::par;
use crate::profile::InitialLaw;
use crate::sad::{dual_contributions, dual_on_region, run_sad, SadProfile};
use crate::scalar::{Dyadic, Scalar};
use crate::schedule::{reverse, sample_finite, ClockConfig, UpdateSequence};
use crate::seed;

/// Absolute tolerance of the float-mode duality comparison.
pub const DUALITY_TOLERANCE: f64 = 1e-10;
/// Rounding slack allowed when comparing grid and half-weight optima.
pub const LEVEL_SLACK: f64 = 1e-12;

/// One invariant family within a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub violations: u64,
    /// Largest error, or smallest slack, depending on the invariant.
    pub worst: f64,
    pub tolerance: f64,
    pub witness: Option<Value>,
}

impl InvariantResult {
    fn new(name: &str, tolerance: f64, worst: f64) -> Self {
        InvariantResult {
            name: name.into(),
            passed: true,
            checked: 0,
            violations: 0,
            worst,
            tolerance,
            witness: None,
        }
    }

    fn fail(&mut self, witness: impl FnOnce() -> Value) {
        self.violations += 1;
        self.passed = false;
        if self.witness.is_none() {
            self.witness = Some(witness());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub suite: String,
    pub config: Value,
    pub passed: bool,
    pub invariants: Vec<InvariantResult>,
}

impl DiagnosticReport {
    pub fn new(suite: &str, config: Value, invariants: Vec<InvariantResult>) -> Self {
        DiagnosticReport {
            suite: suite.into(),
            config,
            passed: invariants.iter().all(|i| i.passed),
            invariants,
        }
    }

    pub fn get(&self, name: &str) -> Option<&InvariantResult> {
        self.invariants.iter().find(|i| i.name == name)
    }
}

fn trace_json(g: &Graph, seq: &UpdateSequence) -> Value {
    let steps: Vec<Value> = seq
        .steps
        .iter()
        .map(|s| {
            let (u, w) = s.edge.endpoints();
            json!([s.time, g.label(u), g.label(w), s.mu])
        })
        .collect();
    json!({ "horizon": seq.horizon, "seed": seq.rng_seed, "steps": steps })
}

/// Outcome of comparing the forward value at a root with its dual expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualityOutcome {
    pub steps: usize,
    /// `|eta_t(root) - sum xi(v) eta_0(v)|` in floating point.
    pub float_error: f64,
    /// The same identity holds exactly with exact arithmetic.
    pub exact_equal: bool,
    /// Forward run from `other`, read at the root, equals the dual run from
    /// the root, read at `other`, exactly.
    pub consistent: bool,
    /// Reversing twice restores edges and weights, and times to rounding.
    pub involution: bool,
}

/// Checks the duality identity for one sequence, integer initial values
/// `init` (indexed like `f.vertices()`), a root and one more vertex.
pub fn duality_trial(g: &Graph, seq: &UpdateSequence, init: &[i64], root: VertexId, other: VertexId) -> Result<DualityOutcome> {
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("duality trials need a finite graph".into()))?;
    let steps = localize(f, seq)?;
    let r = f.index_of(root).ok_or_else(|| Error::InvalidParameter(format!("root {root} not in graph")))?;

    let mut fv: Vec<f64> = init.iter().map(|&x| x as f64).collect();
    run_dense(&mut fv, &steps);
    let fdual: SadProfile<f64> = dual_contributions(g, root, seq)?;
    let fsum = fdual.pair_with(|v| init[f.index_of(v).expect("vertex of g")] as f64);
    let float_error = (fv[r] - fsum).abs();

    let mut ev: Vec<Dyadic> = init.iter().map(|&x| Dyadic::from_int(x)).collect();
    run_dense(&mut ev, &steps);
    let edual: SadProfile<Dyadic> = dual_contributions(g, root, seq)?;
    let esum = edual.pair_with(|v| Dyadic::from_int(init[f.index_of(v).expect("vertex of g")]));
    let exact_equal = ev[r] == esum;

    let forward: SadProfile<Dyadic> = run_sad(g, other, seq)?;
    let consistent = forward.get(root) == edual.get(other);

    let twice = reverse(&reverse(seq));
    let tol = 4.0 * f64::EPSILON * seq.horizon.max(1.0);
    let involution = twice.steps.len() == seq.steps.len()
        && twice
            .steps
            .iter()
            .zip(&seq.steps)
            .all(|(a, b)| a.edge == b.edge && a.mu == b.mu && (a.time - b.time).abs() <= tol);

    Ok(DualityOutcome {
        steps: seq.len(),
        float_error,
        exact_equal,
        consistent,
        involution,
    })
}

/// Random instance for a duality trial on `g`: a sequence of at most
/// `max_steps` steps, integer initial values in `[-9, 9]`, and two vertices.
pub fn duality_instance(
    f: &FiniteGraph,
    g: &Graph,
    cfg: &ClockConfig,
    horizon: f64,
    max_steps: usize,
    seed: u64,
) -> Result<(UpdateSequence, Vec<i64>, VertexId, VertexId)> {
    let seq = sample_finite(g, cfg, horizon)?.take(max_steps);
    let mut rng = seed::rng(seed);
    let init = (0..f.vertex_count()).map(|_| rng.random_range(-9..=9)).collect();
    let ids = f.vertices();
    let root = ids[rng.random_range(0..ids.len())];
    let other = ids[rng.random_range(0..ids.len())];
    Ok((seq, init, root, other))
}

/// Duality suite on a finite graph.
pub fn duality_suite(g: &Graph, cfg: &ClockConfig, horizon: f64, trials: usize, max_steps: usize) -> Result<Vec<InvariantResult>> {
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("the duality suite needs a finite graph".into()))?;
    let outcomes = par::try_replicate(trials, |i| {
        let c = cfg.with_seed(seed::derive(cfg.seed, "duality-clock", i as u64));
        let (seq, init, root, other) = duality_instance(f, g, &c, horizon, max_steps, seed::derive(cfg.seed, "duality-init", i as u64))?;
        let out = duality_trial(g, &seq, &init, root, other)?;
        Ok::<_, Error>((out, seq, init, root, other))
    })?;

    let mut float = InvariantResult::new("duality_float", DUALITY_TOLERANCE, 0.0);
    let mut exact = InvariantResult::new("duality_exact", 0.0, 0.0);
    let mut consistent = InvariantResult::new("forward_dual_consistency", 0.0, 0.0);
    let mut involution = InvariantResult::new("reverse_involution", 4.0 * f64::EPSILON, 0.0);
    for (out, seq, init, root, other) in &outcomes {
        let witness = || json!({ "root": g.label(*root), "other": g.label(*other), "init": init, "trace": trace_json(g, seq) });
        float.checked += 1;
        float.worst = float.worst.max(out.float_error);
        if out.float_error > DUALITY_TOLERANCE {
            float.fail(witness);
        }
        exact.checked += 1;
        if !out.exact_equal {
            exact.fail(witness);
        }
        consistent.checked += 1;
        if !out.consistent {
            consistent.fail(witness);
        }
        involution.checked += 1;
        if !out.involution {
            involution.fail(witness);
        }
    }
    Ok(vec![float, exact, consistent, involution])
}

/// Tallies of the bound checks on dual profiles.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTally {
    pub level_bound: InvariantResult,
    pub subset: InvariantResult,
    pub mass: InvariantResult,
    pub pair_margin: InvariantResult,
}

impl Default for BoundTally {
    fn default() -> Self {
        BoundTally {
            level_bound: InvariantResult::new("level_bound", BOUND_TOLERANCE, f64::INFINITY),
            subset: InvariantResult::new("subset_inequality", BOUND_TOLERANCE, f64::INFINITY),
            mass: InvariantResult::new("unit_mass", BOUND_TOLERANCE, 0.0),
            pair_margin: InvariantResult::new("potential_pair_step", BOUND_TOLERANCE, f64::INFINITY),
        }
    }
}

impl BoundTally {
    pub fn into_vec(self) -> Vec<InvariantResult> {
        vec![self.level_bound, self.subset, self.mass, self.pair_margin]
    }

    /// Adds all checks for one SAD profile started at `root`.
    pub fn check_profile(&mut self, g: &Graph, root: VertexId, profile: &SadProfile, random_subsets: usize, sweep_seed: u64) -> Result<()> {
        let support: Vec<VertexId> = profile.support().collect();
        let mut nbrs = Vec::new();
        let mut probe: Vec<VertexId> = support.clone();
        for &u in support.iter().take(64) {
            g.neighbors_into(u, &mut nbrs);
        }
        probe.extend_from_slice(&nbrs);
        probe.sort_unstable();
        probe.dedup();
        let dist = distances_from(g, root, &probe)?;
        let d_of = |v: VertexId| dist[probe.binary_search(&v).expect("probed")];

        let witness_profile = || {
            json!({
                "root": g.label(root),
                "profile": profile.levels().map(|(v, x)| json!([g.label(v), x])).collect::<Vec<_>>(),
            })
        };

        for &v in &support {
            let bound = 1.0 / (d_of(v) as f64 + 1.0);
            let slack = bound - profile.get(v);
            self.level_bound.checked += 1;
            self.level_bound.worst = self.level_bound.worst.min(slack);
            if slack < -BOUND_TOLERANCE {
                let w = witness_profile();
                self.level_bound.fail(|| json!({ "vertex": g.label(v), "bound": bound, "run": w }));
            }
        }

        let err = (profile.total() - 1.0).abs();
        self.mass.checked += 1;
        self.mass.worst = self.mass.worst.max(err);
        if err > BOUND_TOLERANCE {
            self.mass.fail(witness_profile);
        }

        let f = PotentialFunction::new(g, root);
        let sweep = subset_sweep(&f, profile, random_subsets, sweep_seed)?;
        self.subset.checked += sweep.checked;
        self.subset.worst = self.subset.worst.min(sweep.worst_slack);
        if sweep.violations > 0 {
            self.subset.violations += sweep.violations - 1;
            let w = witness_profile();
            let set: Vec<String> = sweep.witness.iter().map(|&v| g.label(v)).collect();
            self.subset.fail(|| json!({ "set": set, "slack": sweep.worst_slack, "run": w }));
        }

        for &u in support.iter().take(64) {
            nbrs.clear();
            g.neighbors_into(u, &mut nbrs);
            for &w in &nbrs {
                let (du, dw) = (d_of(u), d_of(w));
                if du > dw + 1 {
                    continue;
                }
                let (fu, fw) = (PotentialFunction::factor(du), PotentialFunction::factor(dw));
                let margin = fu * fw + 1.0 - 2.0 * fu;
                self.pair_margin.checked += 1;
                self.pair_margin.worst = self.pair_margin.worst.min(margin);
                if margin < -BOUND_TOLERANCE {
                    self.pair_margin.fail(|| json!({ "root": g.label(root), "u": g.label(u), "w": g.label(w) }));
                }
            }
        }
        Ok(())
    }
}

/// Bound suite: dual profiles at the origin (or random roots on finite
/// graphs) checked against `1/(d+1)`, the subset inequality, unit mass and
/// the potential step inequality.
pub fn bounds_suite(g: &Graph, cfg: &ClockConfig, horizon: f64, trials: usize, random_subsets: usize) -> Result<Vec<InvariantResult>> {
    let profiles = par::try_replicate(trials, |i| {
        let c = cfg.with_seed(seed::derive(cfg.seed, "bounds-clock", i as u64));
        let root = match g.as_finite() {
            Some(f) => {
                let mut rng = seed::rng(seed::derive(cfg.seed, "bounds-root", i as u64));
                f.vertices()[rng.random_range(0..f.vertex_count())]
            }
            None => g.origin(),
        };
        let dual = dual_on_region::<f64>(g, &c, horizon, root)?;
        Ok::<_, Error>((root, dual.to_profile()))
    })?;
    let mut tally = BoundTally::default();
    for (i, (root, p)) in profiles.iter().enumerate() {
        tally.check_profile(g, *root, p, random_subsets, seed::derive(cfg.seed, "bounds-sweep", i as u64))?;
    }
    Ok(tally.into_vec())
}

/// Energy suite on a finite graph: the first `max_steps` steps of a sampled
/// sequence, tracked in the given scalar type.
pub fn energy_suite<T: Scalar>(g: &Graph, law: &InitialLaw, cfg: &ClockConfig, horizon: f64, max_steps: usize) -> Result<Vec<InvariantResult>> {
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("the energy suite needs a finite graph".into()))?;
    let seq = sample_finite(g, cfg, horizon)?.take(max_steps);
    let steps = localize(f, &seq)?;
    let mut values: Vec<T> = f.vertices().iter().map(|&v| T::from_f64(law.sample_at(v))).collect();
    let mut tracker = EnergyTracker::new(&values);
    for s in &steps {
        tracker.step(&mut values, s);
    }
    let r = tracker.report();
    let gap = tracker.ledger_gap(&values);

    let mut identity = InvariantResult::new("decrement_identity", BOUND_TOLERANCE, r.max_rel_error);
    identity.checked = r.steps;
    identity.violations = r.mismatches;
    identity.passed = r.mismatches == 0;
    let mut monotone = InvariantResult::new("energy_non_increasing", 0.0, 0.0);
    monotone.checked = r.steps;
    monotone.violations = r.increases;
    monotone.passed = r.increases == 0;
    let scale = r.initial.max(f64::MIN_POSITIVE);
    let mut ledger = InvariantResult::new("cumulative_ledger", BOUND_TOLERANCE, gap / scale);
    ledger.checked = 1;
    if gap / scale > BOUND_TOLERANCE {
        ledger.violations = 1;
        ledger.passed = false;
    }
    for inv in [&mut identity, &mut monotone, &mut ledger] {
        if !inv.passed {
            inv.witness = Some(json!({ "report": r, "trace_seed": seq.rng_seed, "steps": seq.len() }));
        }
    }
    Ok(vec![identity, monotone, ledger])
}

/// Grid-weight and half-weight optima of the SAD level from one source.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplifComparison {
    pub source: VertexId,
    pub target: VertexId,
    pub half: f64,
    pub grid: f64,
}

/// Exhaustive comparison for every source and target of a small graph.
pub fn simplif_compare(f: &FiniteGraph, n: usize, resolution: f64, budget: u128) -> Result<Vec<SimplifComparison>> {
    let mut out = Vec::new();
    for &s in f.vertices() {
        let half = max_sad_levels(f, s, n, MuMode::FixedHalf, budget)?;
        let grid = max_sad_levels(f, s, n, MuMode::Grid { resolution }, budget)?;
        for (h, gr) in half.iter().zip(&grid) {
            out.push(SimplifComparison {
                source: s,
                target: h.target,
                half: h.level,
                grid: gr.level,
            });
        }
    }
    Ok(out)
}

/// Simplification suite: grid optimum never beats the half-weight optimum
/// beyond [`LEVEL_SLACK`], and optima grow with the number of updates.
pub fn simplif_suite(g: &Graph, n: usize, resolution: f64, budget: u128) -> Result<Vec<InvariantResult>> {
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("the simplification suite needs a finite graph".into()))?;
    let mut dominated = InvariantResult::new("grid_within_half_optimum", LEVEL_SLACK, f64::NEG_INFINITY);
    let mut equal = InvariantResult::new("grid_equals_half_optimum", LEVEL_SLACK, 0.0);
    for c in simplif_compare(f, n, resolution, budget)? {
        let excess = c.grid - c.half;
        dominated.checked += 1;
        dominated.worst = dominated.worst.max(excess);
        let witness = || json!({ "source": g.label(c.source), "target": g.label(c.target), "half": c.half, "grid": c.grid });
        if excess > LEVEL_SLACK {
            dominated.fail(witness);
        }
        equal.checked += 1;
        equal.worst = equal.worst.max(excess.abs());
        if excess.abs() > LEVEL_SLACK {
            equal.fail(witness);
        }
    }
    let mut monotone = InvariantResult::new("optimum_non_decreasing_in_n", 0.0, 0.0);
    for &s in f.vertices() {
        let mut prev: Option<Vec<f64>> = None;
        for k in 0..=n {
            let cur: Vec<f64> = max_sad_levels(f, s, k, MuMode::FixedHalf, budget)?.iter().map(|o| o.level).collect();
            if let Some(p) = &prev {
                for (i, (a, b)) in p.iter().zip(&cur).enumerate() {
                    monotone.checked += 1;
                    if b < a {
                        monotone.fail(|| json!({ "source": g.label(s), "target": g.label(f.vertices()[i]), "n": k }));
                    }
                }
            }
            prev = Some(cur);
        }
    }
    Ok(vec![dominated, equal, monotone])
}
