//! Executable forms of the bound arguments: the potential function, the
//! subset inequality, energy and extrema trackers, and an exhaustive search
//! for the largest reachable SAD level.

use std::collections::hash_map::Entry;
use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::engine::{apply_local, localize, mix_pair};
use crate::error::{Error, Result};
use crate::graph::{Distance, FiniteGraph, Graph, VertexId};
use crate::par;
use crate::region::LocalStep;
use crate::sad::SadProfile;
use crate::scalar::Scalar;
use crate::schedule::UpdateSequence;
use crate::seed;

/// Absolute slack allowed for rounding in the bound checks.
pub const BOUND_TOLERANCE: f64 = 1e-12;
/// Supports up to this size are swept exhaustively.
pub const EXHAUSTIVE_SUPPORT: usize = 15;
/// Default node budget for [`max_sad_levels`].
pub const DEFAULT_SEARCH_BUDGET: u128 = 1_000_000_000;

/// Distances from `root` to each of `targets`.
pub fn distances_from(g: &Graph, root: VertexId, targets: &[VertexId]) -> Result<Vec<u64>> {
    if !g.is_finite() {
        return targets
            .iter()
            .map(|&v| match g.distance(root, v, u64::MAX)? {
                Distance::Within(d) => Ok(d),
                Distance::ExceedsCap => unreachable!("uncapped search"),
            })
            .collect();
    }
    let mut dist: FxHashMap<VertexId, u64> = FxHashMap::default();
    dist.insert(root, 0);
    let mut missing = targets.iter().filter(|v| **v != root).count();
    let mut queue = VecDeque::from([root]);
    let mut nbrs = Vec::new();
    let wanted: rustc_hash::FxHashSet<VertexId> = targets.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        if missing == 0 {
            break;
        }
        let d = dist[&x];
        nbrs.clear();
        g.neighbors_into(x, &mut nbrs);
        for &y in &nbrs {
            if let Entry::Vacant(slot) = dist.entry(y) {
                slot.insert(d + 1);
                if wanted.contains(&y) {
                    missing -= 1;
                }
                queue.push_back(y);
            }
        }
    }
    targets
        .iter()
        .map(|v| dist.get(v).copied().ok_or_else(|| Error::InvalidParameter(format!("vertex {v} is not reachable"))))
        .collect()
}

/// `f(S)`: product of `d/(d+1)` over `S`, distances taken from `root`.
#[derive(Clone, Debug)]
pub struct PotentialFunction {
    pub root: VertexId,
    graph: Graph,
}

impl PotentialFunction {
    pub fn new(graph: &Graph, root: VertexId) -> Self {
        PotentialFunction { root, graph: graph.clone() }
    }

    #[inline]
    pub fn factor(d: u64) -> f64 {
        d as f64 / (d as f64 + 1.0)
    }

    /// Value on a set; repeated vertices count once.
    pub fn potential(&self, set: &[VertexId]) -> Result<f64> {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        let d = distances_from(&self.graph, self.root, &s)?;
        Ok(d.into_iter().map(Self::factor).product())
    }

    /// `f({u, w}) + 1 - 2 f({u})`, non-negative for neighbours with
    /// `d(r, u) <= d(r, w) + 1`.
    pub fn pair_margin(&self, u: VertexId, w: VertexId) -> Result<f64> {
        let d = distances_from(&self.graph, self.root, &[u, w])?;
        let fu = Self::factor(d[0]);
        let fw = Self::factor(d[1]);
        Ok(fu * fw + 1.0 - 2.0 * fu)
    }
}

/// Result of testing `sum_{v in S} xi(v) <= 1 - f(S)` on one set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetCheck {
    pub holds: bool,
    /// `(1 - f(S)) - sum`; negative on violation.
    pub slack: f64,
    pub sum: f64,
    pub potential: f64,
}

pub fn check_subset_inequality(f: &PotentialFunction, profile: &SadProfile, set: &[VertexId]) -> Result<SubsetCheck> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    let sum: f64 = s.iter().map(|&v| profile.get(v)).sum();
    let potential = f.potential(&s)?;
    let slack = (1.0 - potential) - sum;
    Ok(SubsetCheck {
        holds: slack >= -BOUND_TOLERANCE,
        slack,
        sum,
        potential,
    })
}

/// Aggregate of a subset sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub checked: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub exhaustive: bool,
    /// The set with the smallest slack.
    pub witness: Vec<VertexId>,
}

/// Checks the subset inequality over subsets of the profile's support:
/// all of them when the support has at most [`EXHAUSTIVE_SUPPORT`] vertices,
/// otherwise the top-k sets by level for every k plus `random` random sets.
/// Vertices off the support only loosen the inequality.
pub fn subset_sweep(f: &PotentialFunction, profile: &SadProfile, random: usize, rng_seed: u64) -> Result<SweepReport> {
    let support: Vec<VertexId> = profile.support().collect();
    let levels: Vec<f64> = support.iter().map(|&v| profile.get(v)).collect();
    let factors: Vec<f64> = distances_from(&f.graph, f.root, &support)?
        .into_iter()
        .map(PotentialFunction::factor)
        .collect();
    let mut report = SweepReport {
        worst_slack: f64::INFINITY,
        ..Default::default()
    };
    let k = support.len();
    let record = |report: &mut SweepReport, sum: f64, pot: f64, members: &dyn Fn() -> Vec<VertexId>| {
        let slack = (1.0 - pot) - sum;
        report.checked += 1;
        if slack < -BOUND_TOLERANCE {
            report.violations += 1;
        }
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.witness = members();
        }
    };

    if k <= EXHAUSTIVE_SUPPORT {
        report.exhaustive = true;
        let n = 1usize << k;
        let mut sum = vec![0.0; n];
        let mut pot = vec![1.0; n];
        for mask in 1..n {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            sum[mask] = sum[rest] + levels[low];
            pot[mask] = pot[rest] * factors[low];
            record(&mut report, sum[mask], pot[mask], &|| {
                (0..k).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect()
            });
        }
        return Ok(report);
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| levels[b].total_cmp(&levels[a]));
    let (mut sum, mut pot) = (0.0, 1.0);
    for (j, &i) in order.iter().enumerate() {
        sum += levels[i];
        pot *= factors[i];
        record(&mut report, sum, pot, &|| order[..=j].iter().map(|&i| support[i]).collect());
    }
    let mut rng = seed::rng(rng_seed);
    for _ in 0..random {
        let size = rng.random_range(1..=k);
        let picked = sample(&mut rng, k, size).into_vec();
        let sum: f64 = picked.iter().map(|&i| levels[i]).sum();
        let pot: f64 = picked.iter().map(|&i| factors[i]).product();
        record(&mut report, sum, pot, &|| picked.iter().map(|&i| support[i]).collect());
    }
    Ok(report)
}

/// Tracks `W = sum of squares` through a run and compares each step's
/// decrease with `2 mu (1 - mu) (a - b)^2`.
#[derive(Clone, Debug)]
pub struct EnergyTracker<T = f64> {
    initial: T,
    energy: T,
    cumulative: T,
    steps: u64,
    increases: u64,
    mismatches: u64,
    max_rel_error: f64,
    log: Option<Vec<(f64, f64)>>,
}

/// Final state of an [`EnergyTracker`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub steps: u64,
    pub initial: f64,
    pub final_energy: f64,
    pub cumulative_decrement: f64,
    /// Steps where the energy went up.
    pub increases: u64,
    /// Steps where observed and predicted decrements differ beyond tolerance.
    pub mismatches: u64,
    /// Largest `|observed - predicted| / (a^2 + b^2)`.
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl<T: Scalar> EnergyTracker<T> {
    pub fn new(values: &[T]) -> Self {
        let w = values.iter().fold(T::zero(), |acc, x| acc.plus(&x.times(x)));
        EnergyTracker {
            initial: w.clone(),
            energy: w,
            cumulative: T::zero(),
            steps: 0,
            increases: 0,
            mismatches: 0,
            max_rel_error: 0.0,
            log: None,
        }
    }

    /// Keeps every `(predicted, observed)` pair.
    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn energy(&self) -> &T {
        &self.energy
    }

    pub fn log(&self) -> Option<&[(f64, f64)]> {
        self.log.as_deref()
    }

    /// Records one update of a pair from `(a, b)` to `(a2, b2)` with weight
    /// `mu`. With an exact scalar the comparison is exact.
    pub fn observe(&mut self, a: &T, b: &T, a2: &T, b2: &T, mu: f64) {
        let mu_t = T::from_f64(mu);
        let diff = a.minus(b);
        let predicted = T::from_f64(2.0)
            .times(&mu_t)
            .times(&T::one().minus(&mu_t))
            .times(&diff)
            .times(&diff);
        let local = a.times(a).plus(&b.times(b));
        let after = a2.times(a2).plus(&b2.times(b2));
        let observed = local.minus(&after);
        self.steps += 1;
        if observed < T::zero() {
            self.increases += 1;
        }
        let scale = local.to_f64();
        let err = observed.abs_diff_f64(&predicted);
        let rel = if scale > 0.0 { err / scale } else { err };
        self.max_rel_error = self.max_rel_error.max(rel);
        if rel > BOUND_TOLERANCE {
            self.mismatches += 1;
        }
        if let Some(log) = &mut self.log {
            log.push((predicted.to_f64(), observed.to_f64()));
        }
        self.energy = self.energy.minus(&observed);
        self.cumulative = self.cumulative.plus(&observed);
    }

    /// Applies a step to dense values and records it.
    pub(crate) fn step(&mut self, values: &mut [T], s: &LocalStep) {
        let (i, j) = (s.a as usize, s.b as usize);
        let (a2, b2) = mix_pair(&values[i], &values[j], &T::from_f64(s.mu));
        self.observe(&values[i], &values[j], &a2, &b2, s.mu);
        values[i] = a2;
        values[j] = b2;
    }

    /// Recomputes `W` from `values` and returns `|W0 - W - cumulative|`.
    pub fn ledger_gap(&self, values: &[T]) -> f64 {
        let w = values.iter().fold(T::zero(), |acc, x| acc.plus(&x.times(x)));
        self.initial.minus(&w).abs_diff_f64(&self.cumulative)
    }

    pub fn report(&self) -> EnergyReport {
        EnergyReport {
            steps: self.steps,
            initial: self.initial.to_f64(),
            final_energy: self.energy.to_f64(),
            cumulative_decrement: self.cumulative.to_f64(),
            increases: self.increases,
            mismatches: self.mismatches,
            max_rel_error: self.max_rel_error,
            tolerance: BOUND_TOLERANCE,
        }
    }
}

/// Sender maxima `X_t(u)` and recipient maxima `Y_t(v)` on an observation grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtremaTracker {
    pub times: Vec<f64>,
    pub sender: Vec<f64>,
    pub recipient: Vec<f64>,
}

impl ExtremaTracker {
    pub fn push(&mut self, t: f64, sender: f64, recipient: f64) {
        self.times.push(t);
        self.sender.push(sender);
        self.recipient.push(recipient);
    }

    /// Whether the sender maxima never increase.
    pub fn sender_monotone(&self) -> bool {
        self.sender.windows(2).all(|w| w[1] <= w[0])
    }

    /// `sup_{s >= t} Y_s` restricted to the grid.
    pub fn recipient_running_sup(&self) -> Vec<f64> {
        let mut out = self.recipient.clone();
        for i in (0..out.len().saturating_sub(1)).rev() {
            out[i] = out[i].max(out[i + 1]);
        }
        out
    }
}

/// Step-by-step monotonicity along one trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub steps: u64,
    /// Steps after which the largest value went up.
    pub max_increases: u64,
    /// Steps after which the smallest value went down.
    pub min_decreases: u64,
    /// Steps after which the highest level of the SAD run from the source
    /// went up.
    pub sender_increases: u64,
}

impl TrajectoryReport {
    pub fn monotone(&self) -> bool {
        self.max_increases == 0 && self.min_decreases == 0 && self.sender_increases == 0
    }
}

/// Runs `seq` on a finite graph from `init` (indexed like its vertex list)
/// and, alongside, the SAD run from `source`, recomputing the envelope of
/// the first and the maximum of the second after every step.
pub fn check_trajectory(g: &Graph, init: &[f64], seq: &UpdateSequence, source: VertexId) -> Result<TrajectoryReport> {
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("trajectory checks need a finite graph".into()))?;
    if init.len() != f.vertex_count() {
        return Err(Error::InvalidParameter(format!("{} initial values for {} vertices", init.len(), f.vertex_count())));
    }
    let src = f
        .index_of(source)
        .ok_or_else(|| Error::InvalidParameter(format!("source {source} is not in the graph")))?;
    let steps = localize(f, seq)?;
    let envelope = |v: &[f64]| v.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &x| (hi.max(x), lo.min(x)));
    let mut values = init.to_vec();
    let mut levels = vec![0.0; init.len()];
    levels[src] = 1.0;
    let (mut hi, mut lo) = envelope(&values);
    let mut top = 1.0f64;
    let mut r = TrajectoryReport::default();
    for s in &steps {
        apply_local(&mut values, s);
        apply_local(&mut levels, s);
        let (h, l) = envelope(&values);
        let t = levels.iter().copied().fold(0.0, f64::max);
        r.steps += 1;
        r.max_increases += u64::from(h > hi);
        r.min_decreases += u64::from(l < lo);
        r.sender_increases += u64::from(t > top);
        (hi, lo, top) = (h, l, t);
    }
    Ok(r)
}

/// Weights allowed in [`max_sad_levels`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MuMode {
    FixedHalf,
    /// `mu` in `{r, 2r, .., 1/2}` with `r` rounded so the grid ends at 1/2.
    Grid { resolution: f64 },
}

impl MuMode {
    pub fn weights(&self) -> Result<Vec<f64>> {
        match *self {
            MuMode::FixedHalf => Ok(vec![0.5]),
            MuMode::Grid { resolution } => {
                if !(resolution > 0.0 && resolution <= 0.5) {
                    return Err(Error::InvalidParameter(format!("grid resolution must be in (0, 1/2], got {resolution}")));
                }
                let m = (0.5 / resolution).round().max(1.0) as u32;
                Ok((1..=m).map(|k| 0.5 * k as f64 / m as f64).collect())
            }
        }
    }
}

/// Best level found for one target, with a sequence attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelOptimum {
    pub target: VertexId,
    pub level: f64,
    /// `(u, w, mu)` updates in order.
    pub witness: Vec<(VertexId, VertexId, f64)>,
}

/// Nodes in the search tree for `edges` edges, `weights` weights and `n` steps.
pub fn search_cost(edges: usize, weights: usize, n: usize) -> u128 {
    let b = (edges * weights) as u128;
    (1..=n as u32).fold((0u128, 1u128), |(sum, p), _| {
        let p = p.saturating_mul(b);
        (sum.saturating_add(p), p)
    })
    .0
}

struct Search<'a> {
    edges: &'a [(u32, u32)],
    weights: &'a [f64],
    best: Vec<f64>,
    witness: Vec<Vec<(u32, u32, f64)>>,
    path: Vec<(u32, u32, f64)>,
}

impl Search<'_> {
    fn visit(&mut self, levels: &mut [f64], remaining: usize) {
        for (i, &x) in levels.iter().enumerate() {
            if x > self.best[i] {
                self.best[i] = x;
                self.witness[i] = self.path.clone();
            }
        }
        if remaining == 0 {
            return;
        }
        for &(a, b) in self.edges {
            let (ia, ib) = (a as usize, b as usize);
            let (x, y) = (levels[ia], levels[ib]);
            // Both glasses empty: the step changes nothing and is covered by
            // the shorter sequence.
            if x == 0.0 && y == 0.0 {
                continue;
            }
            for &mu in self.weights {
                let (x2, y2) = mix_pair(&x, &y, &mu);
                levels[ia] = x2;
                levels[ib] = y2;
                self.path.push((a, b, mu));
                self.visit(levels, remaining - 1);
                self.path.pop();
            }
            levels[ia] = x;
            levels[ib] = y;
        }
    }
}

/// Largest level reachable at every vertex from a full glass at `source`
/// with at most `n` updates. Exhaustive over edges and weights, split over
/// the first update. Results are indexed like `g.vertices()`.
pub fn max_sad_levels(g: &FiniteGraph, source: VertexId, n: usize, mode: MuMode, budget: u128) -> Result<Vec<LevelOptimum>> {
    let src = g
        .index_of(source)
        .ok_or_else(|| Error::InvalidParameter(format!("source {source} is not in the graph")))?;
    let weights = mode.weights()?;
    let edges = g.local_edges();
    let needed = search_cost(edges.len(), weights.len(), n);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let nv = g.vertex_count();
    let mut start = vec![0.0; nv];
    start[src] = 1.0;

    let firsts: Vec<(u32, u32, f64)> = if n == 0 {
        Vec::new()
    } else {
        edges
            .iter()
            .filter(|&&(a, b)| a as usize == src || b as usize == src)
            .flat_map(|&(a, b)| weights.iter().map(move |&mu| (a, b, mu)))
            .collect()
    };
    let branches = par::map(&firsts, |&(a, b, mu)| {
        let mut levels = start.clone();
        let (x, y) = mix_pair(&levels[a as usize], &levels[b as usize], &mu);
        levels[a as usize] = x;
        levels[b as usize] = y;
        let mut s = Search {
            edges,
            weights: &weights,
            best: vec![0.0; nv],
            witness: vec![Vec::new(); nv],
            path: vec![(a, b, mu)],
        };
        s.visit(&mut levels, n - 1);
        (s.best, s.witness)
    });

    let ids = g.vertices();
    let mut out: Vec<LevelOptimum> = ids
        .iter()
        .enumerate()
        .map(|(i, &v)| LevelOptimum {
            target: v,
            level: start[i],
            witness: Vec::new(),
        })
        .collect();
    for (best, witness) in branches {
        for i in 0..nv {
            if best[i] > out[i].level {
                out[i].level = best[i];
                out[i].witness = witness[i]
                    .iter()
                    .map(|&(a, b, mu)| (ids[a as usize], ids[b as usize], mu))
                    .collect();
            }
        }
    }
    Ok(out)
}

/// Largest level reachable at `target`; see [`max_sad_levels`].
pub fn max_sad_level(g: &Graph, source: VertexId, target: VertexId, n: usize, mode: MuMode) -> Result<f64> {
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("the level search needs a finite graph".into()))?;
    let t = f
        .index_of(target)
        .ok_or_else(|| Error::InvalidParameter(format!("target {target} is not in the graph")))?;
    Ok(max_sad_levels(f, source, n, mode, DEFAULT_SEARCH_BUDGET)?[t].level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;
    use crate::sad::run_sad;
    use crate::scalar::Dyadic;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    fn path(n: usize) -> Graph {
        Graph::generate(&GeneratorSpec::Path { n }).unwrap()
    }

    #[test]
    fn potential_examples() {
        let g = path(3);
        let f = PotentialFunction::new(&g, v(0));
        assert_eq!(f.potential(&[]).unwrap(), 1.0);
        assert_eq!(f.potential(&[v(0)]).unwrap(), 0.0);
        assert!((f.potential(&[v(1), v(2)]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn subset_check_on_delta_and_singleton() {
        let g = path(4);
        let f = PotentialFunction::new(&g, v(0));
        let p = SadProfile::initial(v(0));
        let c = check_subset_inequality(&f, &p, &[v(0), v(2)]).unwrap();
        assert!(c.holds);
        assert_eq!(c.potential, 0.0);
        // A singleton set gives 1 - d/(d+1) = 1/(d+1).
        let c = check_subset_inequality(&f, &p, &[v(3)]).unwrap();
        assert!((1.0 - c.potential - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sweep_counts_all_subsets() {
        let g = path(5);
        let seq = UpdateSequence::discrete(&[
            (crate::graph::Edge::new(v(0), v(1)).unwrap(), 0.5),
            (crate::graph::Edge::new(v(1), v(2)).unwrap(), 0.5),
            (crate::graph::Edge::new(v(2), v(3)).unwrap(), 0.5),
        ])
        .unwrap();
        let p = run_sad(&g, v(0), &seq).unwrap();
        let r = subset_sweep(&PotentialFunction::new(&g, v(0)), &p, 0, 0).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.checked, 15);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn energy_tracker_exact_and_float() {
        let mut xs = vec![Dyadic::from_int(3), Dyadic::from_int(-1)];
        let mut t = EnergyTracker::new(&xs).with_log();
        let s = LocalStep { a: 0, b: 1, mu: 0.3, time: 1.0 };
        t.step(&mut xs, &s);
        let r = t.report();
        assert_eq!(r.mismatches, 0);
        assert_eq!(r.max_rel_error, 0.0);
        assert_eq!(t.ledger_gap(&xs), 0.0);
        let (pred, obs) = t.log().unwrap()[0];
        assert_eq!(pred, obs);

        let mut ys = vec![3.0, -1.0];
        let mut tf = EnergyTracker::new(&ys);
        tf.step(&mut ys, &s);
        assert!(tf.report().max_rel_error < 1e-15);
    }

    #[test]
    fn extrema_running_sup() {
        let mut e = ExtremaTracker::default();
        for (t, x, y) in [(0.0, 1.0, 1.0), (1.0, 0.5, 0.3), (2.0, 0.5, 0.4), (3.0, 0.2, 0.1)] {
            e.push(t, x, y);
        }
        assert!(e.sender_monotone());
        assert_eq!(e.recipient_running_sup(), vec![1.0, 0.4, 0.4, 0.1]);
    }

    #[test]
    fn trajectory_is_monotone() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 10 }).unwrap();
        let cfg = crate::schedule::ClockConfig::new(1.0, crate::schedule::MuLaw::Uniform { lo: 0.0, hi: 0.5 }, 2);
        let seq = crate::schedule::sample_finite(&g, &cfg, 5.0).unwrap();
        let init: Vec<f64> = (0..10).map(|i| (i * 7 % 10) as f64).collect();
        let r = check_trajectory(&g, &init, &seq, v(0)).unwrap();
        assert_eq!(r.steps, seq.len() as u64);
        assert!(r.monotone());
    }

    #[test]
    fn grid_ends_at_half() {
        let w = MuMode::Grid { resolution: 0.05 }.weights().unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(*w.last().unwrap(), 0.5);
        assert!((w[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn max_level_small_cases() {
        let g = path(2);
        assert_eq!(max_sad_level(&g, v(0), v(1), 0, MuMode::FixedHalf).unwrap(), 0.0);
        assert_eq!(max_sad_level(&g, v(0), v(1), 1, MuMode::FixedHalf).unwrap(), 0.5);
        assert_eq!(max_sad_level(&g, v(0), v(1), 1, MuMode::Grid { resolution: 0.05 }).unwrap(), 0.5);
        let g = path(3);
        // Two steps along the path reach 1/4 at the far end.
        assert_eq!(max_sad_level(&g, v(0), v(2), 2, MuMode::FixedHalf).unwrap(), 0.25);
    }

    #[test]
    fn budget_is_enforced() {
        let g = Graph::generate(&GeneratorSpec::Complete { n: 4 }).unwrap();
        let err = max_sad_levels(g.as_finite().unwrap(), v(0), 6, MuMode::Grid { resolution: 0.05 }, 1000).unwrap_err();
        assert!(err.is_resource());
    }
}
