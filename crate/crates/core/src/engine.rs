//! The averaging process.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, Graph, Topology, VertexId};
use crate::profile::{InitialLaw, Profile};
use crate::region::{explore, Direction, LocalStep};
use crate::scalar::Scalar;
use crate::schedule::{ClockConfig, UpdateSequence, UpdateStep};

/// One update of the pair `(a, b)` with weight `mu`.
///
/// Written as a transfer `d = mu (b - a)` so that equal values are an exact
/// fixed point and swapping the endpoints gives the mirrored result.
#[inline]
pub fn mix_pair<T: Scalar>(a: &T, b: &T, mu: &T) -> (T, T) {
    let d = mu.times(&b.minus(a));
    (a.plus(&d), b.minus(&d))
}

/// Applies one step to a sparse profile.
pub fn apply_step<T: Scalar>(p: &mut Profile<T>, step: &UpdateStep) {
    let (u, w) = step.edge.endpoints();
    let (a, b) = mix_pair(&p.get(u), &p.get(w), &T::from_f64(step.mu));
    p.set(u, a);
    p.set(w, b);
}

pub(crate) fn check_edges(g: &Graph, seq: &UpdateSequence) -> Result<()> {
    for s in &seq.steps {
        let (u, w) = s.edge.endpoints();
        if !g.is_edge(u, w) {
            return Err(Error::NotAnEdge(format!("{}-{}", g.label(u), g.label(w))));
        }
    }
    Ok(())
}

/// Left fold of [`apply_step`] over `seq`.
pub fn run<T: Scalar>(g: &Graph, init: &Profile<T>, seq: &UpdateSequence) -> Result<Profile<T>> {
    check_edges(g, seq)?;
    let mut p = init.clone();
    for s in &seq.steps {
        apply_step(&mut p, s);
    }
    Ok(p)
}

/// Profile after all steps with time <= `t`, for each requested time.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T = f64> {
    pub time: f64,
    pub profile: Profile<T>,
}

/// Runs `seq` and records the profile at each of `times` (which must be
/// non-decreasing).
pub fn run_snapshots<T: Scalar>(g: &Graph, init: &Profile<T>, seq: &UpdateSequence, times: &[f64]) -> Result<Vec<Snapshot<T>>> {
    check_edges(g, seq)?;
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("snapshot times must be non-decreasing".into()));
    }
    let mut p = init.clone();
    let mut out = Vec::with_capacity(times.len());
    let mut steps = seq.steps.iter().peekable();
    for &t in times {
        while let Some(s) = steps.next_if(|s| s.time <= t) {
            apply_step(&mut p, s);
        }
        out.push(Snapshot { time: t, profile: p.clone() });
    }
    Ok(out)
}

/// Dense positions of the steps of `seq` in a finite graph.
pub(crate) fn localize(f: &FiniteGraph, seq: &UpdateSequence) -> Result<Vec<LocalStep>> {
    seq.steps
        .iter()
        .map(|s| {
            let (u, w) = s.edge.endpoints();
            match (f.index_of(u), f.index_of(w)) {
                (Some(a), Some(b)) if f.local_adjacency()[a].contains(&(b as u32)) => Ok(LocalStep {
                    a: a as u32,
                    b: b as u32,
                    mu: s.mu,
                    time: s.time,
                }),
                _ => Err(Error::NotAnEdge(format!("{}-{}", f.label(u), f.label(w)))),
            }
        })
        .collect()
}

/// Applies `steps` in order to a dense value vector.
#[inline]
pub(crate) fn run_dense<T: Scalar>(values: &mut [T], steps: &[LocalStep]) {
    for s in steps {
        apply_local(values, s);
    }
}

#[inline]
pub(crate) fn apply_local<T: Scalar>(values: &mut [T], s: &LocalStep) {
    let (a, b) = (s.a as usize, s.b as usize);
    let (x, y) = mix_pair(&values[a], &values[b], &T::from_f64(s.mu));
    values[a] = x;
    values[b] = y;
}

/// Dense run on a finite graph; `init` is indexed like `f.vertices()`.
pub fn run_finite<T: Scalar>(f: &FiniteGraph, init: &[T], seq: &UpdateSequence) -> Result<Vec<T>> {
    if init.len() != f.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "initial vector has {} entries for {} vertices",
            init.len(),
            f.vertex_count()
        )));
    }
    let steps = localize(f, seq)?;
    let mut values = init.to_vec();
    run_dense(&mut values, &steps);
    Ok(values)
}

/// Exact sample of the value at `root` at time `horizon`, on a finite or
/// infinite graph. Only the region that can influence the root is generated.
pub fn run_at_root(g: &Graph, law: &InitialLaw, cfg: &ClockConfig, horizon: f64, root: VertexId) -> Result<f64> {
    let ex = explore(g, root, cfg, horizon, Direction::Influence)?;
    let mut values: Vec<f64> = ex.region.vertices().iter().map(|&v| law.sample_at(v)).collect();
    run_dense(&mut values, &ex.steps);
    Ok(values[0])
}

/// Aggregate statistics of a finite profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub horizon: f64,
    pub n_steps: usize,
    pub sum: f64,
    pub energy: f64,
    pub max: f64,
    pub min: f64,
}

impl Summary {
    pub fn of(values: &[f64], horizon: f64, n_steps: usize) -> Self {
        Summary {
            horizon,
            n_steps,
            sum: values.iter().sum(),
            energy: values.iter().map(|x| x * x).sum(),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}
