//! Exact lazy generation on infinite graphs.
//!
//! Mass in a Sharing-a-Drink run can only cross an edge at one of the edge's
//! events, and only after reaching one of its endpoints. The set of vertices
//! that can exchange mass with a root within a horizon is therefore the
//! first-passage cluster of a time-dependent Dijkstra search over the
//! realized clocks. Clocks are drawn edge by edge from their keyed streams
//! as the search touches them, so the result equals what an eager
//! generation over any finite graph containing the cluster would produce.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexId};
use crate::schedule::{ClockConfig, UpdateSequence, UpdateStep};

/// Which way information flows from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Vertices whose initial values can reach the root by the horizon (the
    /// support of the dual run started at the root).
    Influence,
    /// Vertices the root's initial value can reach by the horizon (the support
    /// of the forward run started at the root).
    Spread,
}

/// Vertices reached from `root` within the horizon, with their passage times.
#[derive(Clone, Debug)]
pub struct ExploredRegion {
    pub root: VertexId,
    pub horizon: f64,
    pub direction: Direction,
    vertices: Vec<VertexId>,
    passage: Vec<f64>,
    index: FxHashMap<VertexId, u32>,
}

impl ExploredRegion {
    /// Region vertices in order of settlement; the root comes first.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn passage_time(&self, v: VertexId) -> Option<f64> {
        self.index.get(&v).map(|&i| self.passage[i as usize])
    }

    pub(crate) fn local(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).map(|&i| i as usize)
    }
}

/// Update with endpoints given as positions in the region's vertex list.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LocalStep {
    pub a: u32,
    pub b: u32,
    pub mu: f64,
    pub time: f64,
}

/// Region plus its restricted event list in dense form.
#[derive(Clone, Debug)]
pub(crate) struct Exploration {
    pub region: ExploredRegion,
    pub steps: Vec<LocalStep>,
    pub edges: Vec<Edge>,
    pub ties: usize,
}

impl Exploration {
    pub fn sequence(&self, cfg: &ClockConfig) -> UpdateSequence {
        UpdateSequence {
            steps: self
                .steps
                .iter()
                .zip(&self.edges)
                .map(|(s, &edge)| UpdateStep { edge, mu: s.mu, time: s.time })
                .collect(),
            horizon: self.region.horizon,
            rng_seed: cfg.seed,
            intensity: cfg.intensity,
            ties: self.ties,
        }
    }
}

#[derive(PartialEq)]
struct Candidate {
    time: f64,
    v: VertexId,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (time, id).
        other.time.total_cmp(&self.time).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct EdgeClock {
    lo: VertexId,
    hi: VertexId,
    start: u32,
    len: u32,
}

/// Whether an event at `t` on an edge whose earlier endpoint settles at
/// `first` can move mass relevant to the root. Earlier events only touch
/// values that never reach the root (or, forward, carry none of its mass).
#[inline]
fn carries(direction: Direction, horizon: f64, t: f64, first: f64) -> bool {
    match direction {
        Direction::Influence => horizon - t >= first,
        Direction::Spread => t >= first,
    }
}

pub(crate) fn explore(g: &Graph, root: VertexId, cfg: &ClockConfig, horizon: f64, direction: Direction) -> Result<Exploration> {
    cfg.validate()?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    if !g.contains(root) {
        return Err(Error::InvalidParameter(format!("root {root} is not in the graph")));
    }

    let mut vertices = Vec::new();
    let mut passage = Vec::new();
    let mut index: FxHashMap<VertexId, u32> = FxHashMap::default();
    let mut clocks: Vec<EdgeClock> = Vec::new();
    let mut pool: Vec<(f64, f64)> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut nbrs = Vec::new();
    heap.push(Candidate { time: 0.0, v: root });

    while let Some(Candidate { time, v }) = heap.pop() {
        if index.contains_key(&v) {
            continue;
        }
        if vertices.len() >= cfg.region_cap {
            return Err(Error::RegionCap { cap: cfg.region_cap });
        }
        index.insert(v, vertices.len() as u32);
        vertices.push(v);
        passage.push(time);

        nbrs.clear();
        g.try_neighbors_into(v, &mut nbrs)?;
        for &w in &nbrs {
            // An edge to a settled vertex was drawn when that vertex settled.
            if index.contains_key(&w) {
                continue;
            }
            let start = pool.len();
            cfg.edge_events(v, w, horizon, &mut pool);
            let events = &pool[start..];
            let (lo, hi) = if v < w { (v, w) } else { (w, v) };
            clocks.push(EdgeClock {
                lo,
                hi,
                start: start as u32,
                len: events.len() as u32,
            });
            let next = match direction {
                // First event strictly after `time` in reversed time, i.e. the
                // last event strictly before `horizon - time`.
                Direction::Influence => {
                    let k = events.partition_point(|e| e.0 < horizon - time);
                    (k > 0).then(|| horizon - events[k - 1].0)
                }
                Direction::Spread => {
                    let k = events.partition_point(|e| e.0 <= time);
                    events.get(k).map(|e| e.0)
                }
            };
            if let Some(t) = next {
                if t <= horizon {
                    heap.push(Candidate { time: t, v: w });
                }
            }
        }
    }

    let mut events: Vec<(f64, Edge, f64, u32, u32)> = Vec::new();
    for c in &clocks {
        if let (Some(&a), Some(&b)) = (index.get(&c.lo), index.get(&c.hi)) {
            let edge = Edge::canonical(c.lo, c.hi);
            let first = passage[a as usize].min(passage[b as usize]);
            for &(t, mu) in &pool[c.start as usize..(c.start + c.len) as usize] {
                if carries(direction, horizon, t, first) {
                    events.push((t, edge, mu, a, b));
                }
            }
        }
    }
    events.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let ties = events.windows(2).filter(|w| w[0].0 == w[1].0).count();

    let steps = events
        .iter()
        .map(|&(time, _, mu, a, b)| LocalStep { a, b, mu, time })
        .collect();
    let edges = events.iter().map(|e| e.1).collect();
    Ok(Exploration {
        region: ExploredRegion {
            root,
            horizon,
            direction,
            vertices,
            passage,
            index,
        },
        steps,
        edges,
        ties,
    })
}

/// Region of vertices that can influence `root` by `horizon`, with the events
/// on edges inside it that can still carry mass toward the root. The sequence
/// determines the value at `root` at the horizon exactly.
pub fn explore_region(g: &Graph, root: VertexId, cfg: &ClockConfig, horizon: f64) -> Result<(ExploredRegion, UpdateSequence)> {
    explore_directed(g, root, cfg, horizon, Direction::Influence)
}

pub fn explore_directed(
    g: &Graph,
    root: VertexId,
    cfg: &ClockConfig,
    horizon: f64,
    direction: Direction,
) -> Result<(ExploredRegion, UpdateSequence)> {
    let ex = explore(g, root, cfg, horizon, direction)?;
    let seq = ex.sequence(cfg);
    Ok((ex.region, seq))
}
