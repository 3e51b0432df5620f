//! Graph representations.
//!
//! A [`Graph`] is either an explicit finite graph or a lazy topology that
//! answers neighbor queries on demand (the integer lattice, regular trees).
//! Both are immutable and cheap to clone, so simulation replicas can share
//! them freely.

mod finite;
mod generators;
mod io;
mod lattice;
mod tree;

use std::collections::hash_map::Entry;
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use finite::{FiniteGraph, Labeling};
pub use generators::GeneratorSpec;
pub use io::{read_edge_list, parse_edge_list};
pub use lattice::Lattice;
pub use tree::RegularTree;

/// Opaque vertex identifier; lazy topologies pack coordinates into it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unordered pair of distinct vertices, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    lo: VertexId,
    hi: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Edge { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::InvalidGraph(format!("self-loop at vertex {a}"))),
        }
    }

    /// Caller guarantees `a != b`.
    pub(crate) fn canonical(a: VertexId, b: VertexId) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.lo == v || self.hi == v
    }
}

/// Neighborhood oracle for a bounded-degree graph.
///
/// Implementations must be pure: the same vertex always yields the same
/// neighbors, in the same order.
pub trait Topology: Send + Sync + fmt::Debug {
    /// Appends the neighbors of `v` to `out`.
    fn neighbors(&self, v: VertexId, out: &mut Vec<VertexId>);

    /// Like [`Topology::neighbors`], but reports vertices whose neighbors
    /// cannot be encoded instead of panicking.
    fn try_neighbors(&self, v: VertexId, out: &mut Vec<VertexId>) -> Result<()> {
        self.neighbors(v, out);
        Ok(())
    }

    fn degree_bound(&self) -> usize;

    /// Distinguished vertex used as the default root.
    fn origin(&self) -> VertexId;

    fn contains(&self, v: VertexId) -> bool;

    /// Human-readable vertex name, accepted back by [`Topology::parse_vertex`].
    fn label(&self, v: VertexId) -> String {
        v.0.to_string()
    }

    fn parse_vertex(&self, token: &str) -> Result<VertexId> {
        let v = token
            .trim()
            .parse::<u64>()
            .map(VertexId)
            .map_err(|e| Error::parse(token, e.to_string()))?;
        if self.contains(v) {
            Ok(v)
        } else {
            Err(Error::parse(token, "no such vertex"))
        }
    }

    /// Closed-form graph distance, when the topology has one.
    fn metric(&self, _u: VertexId, _v: VertexId) -> Option<u64> {
        None
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Finite(Arc<FiniteGraph>),
    Lazy(Arc<dyn Topology>),
}

/// A finite or lazily generated graph.
#[derive(Clone, Debug)]
pub struct Graph {
    kind: Kind,
}

/// Result of a capped distance query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Within(u64),
    /// The vertices are further apart than the cap allowed the search to look.
    ExceedsCap,
}

impl Distance {
    pub fn value(self) -> Option<u64> {
        match self {
            Distance::Within(d) => Some(d),
            Distance::ExceedsCap => None,
        }
    }
}

impl Graph {
    pub fn finite(g: FiniteGraph) -> Self {
        Graph { kind: Kind::Finite(Arc::new(g)) }
    }

    pub fn lazy(t: impl Topology + 'static) -> Self {
        Graph { kind: Kind::Lazy(Arc::new(t)) }
    }

    /// Validates and wraps an adjacency list.
    pub fn build_finite(adjacency: Vec<(VertexId, Vec<VertexId>)>) -> Result<Self> {
        FiniteGraph::from_adjacency(adjacency).map(Graph::finite)
    }

    pub fn generate(spec: &GeneratorSpec) -> Result<Self> {
        spec.build()
    }

    fn topology(&self) -> &dyn Topology {
        match &self.kind {
            Kind::Finite(g) => g.as_ref(),
            Kind::Lazy(t) => t.as_ref(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteGraph> {
        match &self.kind {
            Kind::Finite(g) => Some(g),
            Kind::Lazy(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, Kind::Finite(_))
    }

    #[inline]
    pub fn neighbors_into(&self, v: VertexId, out: &mut Vec<VertexId>) {
        self.topology().neighbors(v, out)
    }

    #[inline]
    pub fn try_neighbors_into(&self, v: VertexId, out: &mut Vec<VertexId>) -> Result<()> {
        self.topology().try_neighbors(v, out)
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        self.neighbors_into(v, &mut out);
        out
    }

    pub fn is_edge(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.contains(a) && self.neighbors(a).contains(&b)
    }

    pub fn degree_bound(&self) -> usize {
        self.topology().degree_bound()
    }

    pub fn origin(&self) -> VertexId {
        self.topology().origin()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.topology().contains(v)
    }

    pub fn label(&self, v: VertexId) -> String {
        self.topology().label(v)
    }

    pub fn parse_vertex(&self, token: &str) -> Result<VertexId> {
        self.topology().parse_vertex(token)
    }

    /// Breadth-first distance, searching at most `cap` steps from `u`.
    pub fn distance(&self, u: VertexId, v: VertexId, cap: u64) -> Result<Distance> {
        for w in [u, v] {
            if !self.contains(w) {
                return Err(Error::InvalidParameter(format!("vertex {w} is not in the graph")));
            }
        }
        if let Some(d) = self.topology().metric(u, v) {
            return Ok(if d <= cap { Distance::Within(d) } else { Distance::ExceedsCap });
        }
        Ok(self.bfs_distance(u, v, cap))
    }

    /// Plain BFS, ignoring any closed-form metric.
    pub fn bfs_distance(&self, u: VertexId, v: VertexId, cap: u64) -> Distance {
        if u == v {
            return Distance::Within(0);
        }
        let mut seen = FxHashSet::default();
        seen.insert(u);
        let mut frontier = vec![u];
        let mut nbrs = Vec::new();
        for d in 1..=cap {
            let mut next = Vec::new();
            for &x in &frontier {
                nbrs.clear();
                self.neighbors_into(x, &mut nbrs);
                for &y in &nbrs {
                    if y == v {
                        return Distance::Within(d);
                    }
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Distance::ExceedsCap
    }

    /// Distances from `root` to every vertex within `radius`.
    pub fn ball(&self, root: VertexId, radius: u64) -> FxHashMap<VertexId, u64> {
        let mut dist = FxHashMap::default();
        dist.insert(root, 0);
        let mut queue = VecDeque::from([root]);
        let mut nbrs = Vec::new();
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == radius {
                continue;
            }
            nbrs.clear();
            self.neighbors_into(x, &mut nbrs);
            for &y in &nbrs {
                if let Entry::Vacant(slot) = dist.entry(y) {
                    slot.insert(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Finite induced subgraph on the ball of the given radius. Vertex ids
    /// (and labels, for lattices) are preserved.
    pub fn ball_subgraph(&self, root: VertexId, radius: u64) -> Result<Graph> {
        let dist = self.ball(root, radius);
        let mut vertices: Vec<VertexId> = dist.keys().copied().collect();
        vertices.sort_unstable();
        let mut adjacency = Vec::with_capacity(vertices.len());
        let mut nbrs = Vec::new();
        for &v in &vertices {
            nbrs.clear();
            self.neighbors_into(v, &mut nbrs);
            let inside: Vec<VertexId> = nbrs.iter().copied().filter(|w| dist.contains_key(w)).collect();
            adjacency.push((v, inside));
        }
        let labeling = match &self.kind {
            Kind::Lazy(t) => Labeling::Borrowed(t.clone()),
            Kind::Finite(g) => g.labeling().clone(),
        };
        FiniteGraph::from_adjacency(adjacency).map(|g| Graph::finite(g.with_labeling(labeling)))
    }
}
