//! Sharing-a-Drink: the averaging update applied to a unit mass.
//!
//! Run forward from `u`, the level at `v` is the contribution of the initial
//! value at `u` to the value at `v`. Run on the reversed sequence from `v`,
//! the level at `u` is the same coefficient.

use std::collections::BTreeMap;
use std::io::Write;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::engine::{apply_local, check_edges, mix_pair};
use crate::error::{Error, Result};
use crate::graph::{Distance, Graph, VertexId};
use crate::par;
use crate::region::{explore, Direction, ExploredRegion};
use crate::scalar::Scalar;
use crate::schedule::{ClockConfig, UpdateSequence, UpdateStep};

/// Largest distance written to contribution exports.
const DISTANCE_CAP: u64 = 1 << 24;

/// Water levels after a run started from a full glass at `source`.
/// Vertices without an entry hold exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SadProfile<T = f64> {
    pub source: VertexId,
    levels: BTreeMap<VertexId, T>,
}

impl<T: Scalar> SadProfile<T> {
    pub fn initial(source: VertexId) -> Self {
        SadProfile {
            source,
            levels: BTreeMap::from([(source, T::one())]),
        }
    }

    pub fn get(&self, v: VertexId) -> T {
        self.levels.get(&v).cloned().unwrap_or_else(T::zero)
    }

    pub fn levels(&self) -> impl Iterator<Item = (VertexId, &T)> {
        self.levels.iter().map(|(&v, x)| (v, x))
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.levels.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.levels.len()
    }

    pub fn total(&self) -> T {
        self.levels.values().fold(T::zero(), |acc, x| acc.plus(x))
    }

    /// Highest level and a vertex holding it.
    pub fn max(&self) -> (VertexId, T) {
        let mut best = (self.source, T::zero());
        for (&v, x) in &self.levels {
            if *x > best.1 {
                best = (v, x.clone());
            }
        }
        best
    }

    /// Weighted sum of `values` with the levels as weights.
    pub fn pair_with(&self, values: impl Fn(VertexId) -> T) -> T {
        self.levels
            .iter()
            .fold(T::zero(), |acc, (&v, x)| acc.plus(&x.times(&values(v))))
    }
}

fn fold<'a, T: Scalar>(source: VertexId, steps: impl Iterator<Item = &'a UpdateStep>) -> SadProfile<T> {
    let mut levels: FxHashMap<VertexId, T> = FxHashMap::default();
    levels.insert(source, T::one());
    for s in steps {
        let (u, w) = s.edge.endpoints();
        let (a, b) = match (levels.get(&u), levels.get(&w)) {
            (None, None) => continue,
            (a, b) => (a.cloned().unwrap_or_else(T::zero), b.cloned().unwrap_or_else(T::zero)),
        };
        let (a, b) = mix_pair(&a, &b, &T::from_f64(s.mu));
        levels.insert(u, a);
        levels.insert(w, b);
    }
    SadProfile {
        source,
        levels: levels.into_iter().collect(),
    }
}

/// Runs the sequence forward from a full glass at `source`.
pub fn run_sad<T: Scalar>(g: &Graph, source: VertexId, seq: &UpdateSequence) -> Result<SadProfile<T>> {
    check_edges(g, seq)?;
    Ok(fold(source, seq.steps.iter()))
}

/// Coefficients of the initial values in the value at `target` after `seq`:
/// the run on the reversed sequence from `target`.
pub fn dual_contributions<T: Scalar>(g: &Graph, target: VertexId, seq: &UpdateSequence) -> Result<SadProfile<T>> {
    check_edges(g, seq)?;
    Ok(fold(target, seq.steps.iter().rev()))
}

/// SAD levels on an explored region, indexed like `region.vertices()`.
#[derive(Clone, Debug)]
pub struct RegionSad<T = f64> {
    pub region: ExploredRegion,
    pub levels: Vec<T>,
}

impl<T: Scalar> RegionSad<T> {
    pub fn get(&self, v: VertexId) -> T {
        self.region.local(v).map_or_else(T::zero, |i| self.levels[i].clone())
    }

    pub fn max(&self) -> T {
        self.levels.iter().fold(T::zero(), |m, x| if *x > m { x.clone() } else { m })
    }

    pub fn to_profile(&self) -> SadProfile<T> {
        let zero = T::zero();
        SadProfile {
            source: self.region.root,
            levels: self
                .region
                .vertices()
                .iter()
                .zip(&self.levels)
                .filter(|(_, x)| **x != zero)
                .map(|(&v, x)| (v, x.clone()))
                .collect(),
        }
    }
}

/// Dual run at `target` on a possibly infinite graph: `levels[u]` is the
/// contribution of `u` to `target` at time `horizon`.
pub fn dual_on_region<T: Scalar>(g: &Graph, cfg: &ClockConfig, horizon: f64, target: VertexId) -> Result<RegionSad<T>> {
    let ex = explore(g, target, cfg, horizon, Direction::Influence)?;
    let mut levels = vec![T::zero(); ex.region.len()];
    levels[0] = T::one();
    for s in ex.steps.iter().rev() {
        apply_local(&mut levels, s);
    }
    Ok(RegionSad { region: ex.region, levels })
}

/// Forward run from `source` on a possibly infinite graph.
pub fn forward_on_region<T: Scalar>(g: &Graph, cfg: &ClockConfig, horizon: f64, source: VertexId) -> Result<RegionSad<T>> {
    let ex = explore(g, source, cfg, horizon, Direction::Spread)?;
    let mut levels = vec![T::zero(); ex.region.len()];
    levels[0] = T::one();
    for s in &ex.steps {
        apply_local(&mut levels, s);
    }
    Ok(RegionSad { region: ex.region, levels })
}

/// Highest level of the forward run from `source` at each of `times`
/// (non-decreasing), from a single exploration up to the last time.
pub fn forward_maxima(g: &Graph, cfg: &ClockConfig, source: VertexId, times: &[f64]) -> Result<Vec<f64>> {
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("observation times must be non-decreasing".into()));
    }
    let Some(&last) = times.last() else {
        return Ok(Vec::new());
    };
    let ex = explore(g, source, cfg, last, Direction::Spread)?;
    let mut levels = vec![0.0; ex.region.len()];
    levels[0] = 1.0;
    let mut max = 1.0f64;
    let mut steps = ex.steps.iter().peekable();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut touched = false;
        while let Some(s) = steps.next_if(|s| s.time <= t) {
            apply_local(&mut levels, s);
            touched = true;
        }
        if touched {
            max = levels.iter().copied().fold(0.0, f64::max);
        }
        out.push(max);
    }
    Ok(out)
}

/// Contributions for chosen sources and targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContributionMatrix {
    pub horizon: f64,
    entries: BTreeMap<(VertexId, VertexId), f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContributionEntry {
    pub source: VertexId,
    pub target: VertexId,
    pub distance: u64,
    pub xi: f64,
    pub bound: f64,
}

impl ContributionMatrix {
    pub fn get(&self, source: VertexId, target: VertexId) -> Option<f64> {
        self.entries.get(&(source, target)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((VertexId, VertexId), f64)> + '_ {
        self.entries.iter().map(|(&k, &x)| (k, x))
    }

    /// Sum of the entries with the given source.
    pub fn row_sum(&self, source: VertexId) -> f64 {
        self.entries.range((source, VertexId(0))..=(source, VertexId(u64::MAX))).map(|(_, x)| x).sum()
    }

    pub fn column_sum(&self, target: VertexId) -> f64 {
        self.entries.iter().filter(|((_, t), _)| *t == target).map(|(_, x)| x).sum()
    }

    /// Entries with graph distances and the matching `1/(d+1)` bound.
    pub fn annotated(&self, g: &Graph) -> Result<Vec<ContributionEntry>> {
        self.iter()
            .map(|((source, target), xi)| {
                let distance = match g.distance(source, target, DISTANCE_CAP)? {
                    Distance::Within(d) => d,
                    Distance::ExceedsCap => {
                        return Err(Error::InvalidParameter(format!("distance from {source} to {target} exceeds {DISTANCE_CAP}")))
                    }
                };
                Ok(ContributionEntry {
                    source,
                    target,
                    distance,
                    xi,
                    bound: 1.0 / (distance as f64 + 1.0),
                })
            })
            .collect()
    }

    /// CSV with header `source,target,distance,xi,bound`.
    pub fn write_csv<W: Write>(&self, g: &Graph, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["source", "target", "distance", "xi", "bound"])?;
        for e in self.annotated(g)? {
            w.write_record([
                g.label(e.source),
                g.label(e.target),
                e.distance.to_string(),
                format!("{:e}", e.xi),
                format!("{:e}", e.bound),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Contributions of every source to every target, one dual run per target.
pub fn contribution_matrix(g: &Graph, sources: &[VertexId], targets: &[VertexId], seq: &UpdateSequence) -> Result<ContributionMatrix> {
    check_edges(g, seq)?;
    let columns = par::map(targets, |&t| fold::<f64>(t, seq.steps.iter().rev()));
    let mut entries = BTreeMap::new();
    for (col, &t) in columns.iter().zip(targets) {
        for &s in sources {
            entries.insert((s, t), col.get(s));
        }
    }
    Ok(ContributionMatrix {
        horizon: seq.horizon,
        entries,
    })
}

/// Forward runs from each source; the rows of the contribution matrix.
pub fn forward_profiles(g: &Graph, sources: &[VertexId], seq: &UpdateSequence) -> Result<Vec<SadProfile>> {
    check_edges(g, seq)?;
    Ok(par::map(sources, |&s| fold(s, seq.steps.iter())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, GeneratorSpec};
    use crate::scalar::Dyadic;
    use crate::schedule::{reverse, sample_finite, MuLaw};

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    fn e(a: u64, b: u64) -> Edge {
        Edge::new(v(a), v(b)).unwrap()
    }

    #[test]
    fn path_example() {
        let g = Graph::generate(&GeneratorSpec::Path { n: 3 }).unwrap();
        let seq = UpdateSequence::discrete(&[(e(0, 1), 0.5), (e(1, 2), 0.5)]).unwrap();
        let p: SadProfile = run_sad(&g, v(0), &seq).unwrap();
        assert_eq!((p.get(v(0)), p.get(v(1)), p.get(v(2))), (0.5, 0.25, 0.25));
        assert_eq!(p.total(), 1.0);
    }

    #[test]
    fn empty_and_single_step() {
        let g = Graph::generate(&GeneratorSpec::Path { n: 2 }).unwrap();
        let empty = UpdateSequence::discrete(&[]).unwrap();
        assert_eq!(dual_contributions::<f64>(&g, v(1), &empty).unwrap(), SadProfile::initial(v(1)));
        let one = UpdateSequence::discrete(&[(e(0, 1), 0.3)]).unwrap();
        let d: SadProfile = dual_contributions(&g, v(0), &one).unwrap();
        assert_eq!(d.get(v(0)), 0.7);
        assert_eq!(d.get(v(1)), 0.3);
    }

    #[test]
    fn dual_equals_forward_on_reversed_sequence() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 8 }).unwrap();
        let cfg = ClockConfig::new(1.0, MuLaw::Uniform { lo: 0.0, hi: 0.5 }, 4);
        let seq = sample_finite(&g, &cfg, 3.0).unwrap();
        let a: SadProfile<Dyadic> = dual_contributions(&g, v(2), &seq).unwrap();
        let b: SadProfile<Dyadic> = run_sad(&g, v(2), &reverse(&seq)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matrix_is_doubly_stochastic() {
        let g = Graph::generate(&GeneratorSpec::Complete { n: 5 }).unwrap();
        let cfg = ClockConfig::new(1.0, MuLaw::Uniform { lo: 0.0, hi: 0.5 }, 11);
        let seq = sample_finite(&g, &cfg, 2.0).unwrap();
        let all: Vec<_> = (0..5).map(v).collect();
        let m = contribution_matrix(&g, &all, &all, &seq).unwrap();
        for &u in &all {
            assert!((m.row_sum(u) - 1.0).abs() < 1e-12);
            assert!((m.column_sum(u) - 1.0).abs() < 1e-12);
        }
        let rows = forward_profiles(&g, &all, &seq).unwrap();
        for (row, &u) in rows.iter().zip(&all) {
            for &w in &all {
                assert!((row.get(w) - m.get(u, w).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_horizon_matrix_is_identity() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 4 }).unwrap();
        let seq = sample_finite(&g, &ClockConfig::default(), 0.0).unwrap();
        let all: Vec<_> = (0..4).map(v).collect();
        let m = contribution_matrix(&g, &all, &all, &seq).unwrap();
        for &a in &all {
            for &b in &all {
                assert_eq!(m.get(a, b), Some(if a == b { 1.0 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn csv_export() {
        let g = Graph::generate(&GeneratorSpec::Path { n: 3 }).unwrap();
        let seq = UpdateSequence::discrete(&[(e(0, 1), 0.5), (e(1, 2), 0.5)]).unwrap();
        let m = contribution_matrix(&g, &[v(0)], &[v(2)], &seq).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "source,target,distance,xi,bound\n0,2,2,2.5e-1,3.333333333333333e-1\n");
    }

    #[test]
    fn region_dual_matches_finite_dual() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 40 }).unwrap();
        for seed in 0..10 {
            let cfg = ClockConfig::new(1.0, MuLaw::Uniform { lo: 0.0, hi: 0.5 }, seed);
            let seq = sample_finite(&g, &cfg, 3.0).unwrap();
            let full: SadProfile = dual_contributions(&g, v(0), &seq).unwrap();
            let lazy: RegionSad = dual_on_region(&g, &cfg, 3.0, v(0)).unwrap();
            assert_eq!(lazy.to_profile(), full);
            let fwd: RegionSad = forward_on_region(&g, &cfg, 3.0, v(0)).unwrap();
            assert_eq!(fwd.to_profile(), run_sad::<f64>(&g, v(0), &seq).unwrap());
        }
    }

    #[test]
    fn forward_maxima_track_prefixes() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 30 }).unwrap();
        let cfg = ClockConfig::new(1.0, MuLaw::Uniform { lo: 0.0, hi: 0.5 }, 3);
        let times = [0.0, 0.5, 1.0, 2.0, 4.0];
        let seq = sample_finite(&g, &cfg, 4.0).unwrap();
        let got = forward_maxima(&g, &cfg, v(0), &times).unwrap();
        for (t, m) in times.iter().zip(got) {
            let p: SadProfile = run_sad(&g, v(0), &seq.truncate(*t)).unwrap();
            assert_eq!(m, p.max().1);
        }
    }
}
