use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Edge, Topology, VertexId};
use crate::error::{Error, Result};

/// How a finite graph names its vertices.
#[derive(Clone, Debug, Default)]
pub enum Labeling {
    /// Vertex ids printed as integers.
    #[default]
    Integer,
    /// One name per vertex, in ascending id order.
    Named(Arc<Vec<String>>),
    /// Names (and parsing) delegated to the topology the graph was cut from.
    Borrowed(Arc<dyn Topology>),
}

/// Explicit simple, connected graph.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    ids: Vec<VertexId>,
    index: FxHashMap<VertexId, u32>,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    max_degree: usize,
    labeling: Labeling,
}

impl FiniteGraph {
    /// Builds a graph from `(vertex, neighbors)` entries, rejecting self-loops,
    /// repeated edges, asymmetric adjacency and disconnected input.
    pub fn from_adjacency(adjacency: Vec<(VertexId, Vec<VertexId>)>) -> Result<Self> {
        if adjacency.is_empty() {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut ids: Vec<VertexId> = adjacency.iter().map(|(v, _)| *v).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("vertex {} listed twice", w[0])));
        }
        let index: FxHashMap<VertexId, u32> = ids.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();

        let mut adj = vec![Vec::new(); ids.len()];
        let mut directed = FxHashSet::default();
        for (v, nbrs) in &adjacency {
            let i = index[v];
            for w in nbrs {
                if w == v {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {v}")));
                }
                let j = *index
                    .get(w)
                    .ok_or_else(|| Error::InvalidGraph(format!("vertex {v} lists unknown neighbor {w}")))?;
                if !directed.insert((i, j)) {
                    return Err(Error::InvalidGraph(format!("edge {v}-{w} listed twice (multigraph)")));
                }
                adj[i as usize].push(j);
            }
        }
        for &(i, j) in &directed {
            if !directed.contains(&(j, i)) {
                return Err(Error::InvalidGraph(format!(
                    "asymmetric adjacency: {} lists {} but not conversely",
                    ids[i as usize], ids[j as usize]
                )));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut edges: Vec<(u32, u32)> = directed.into_iter().filter(|(i, j)| i < j).collect();
        edges.sort_unstable();
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);

        let g = FiniteGraph {
            ids,
            index,
            adj,
            edges,
            max_degree,
            labeling: Labeling::Integer,
        };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        Ok(g)
    }

    /// Convenience constructor from an edge list over the given vertices.
    pub fn from_edges(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut map: FxHashMap<VertexId, Vec<VertexId>> = vertices.iter().map(|v| (*v, Vec::new())).collect();
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                map.get_mut(&x)
                    .ok_or_else(|| Error::InvalidGraph(format!("edge mentions unknown vertex {x}")))?
                    .push(y);
            }
        }
        let mut adjacency: Vec<_> = map.into_iter().collect();
        adjacency.sort_unstable_by_key(|(v, _)| *v);
        Self::from_adjacency(adjacency)
    }

    pub fn with_labeling(mut self, labeling: Labeling) -> Self {
        self.labeling = labeling;
        self
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in &self.adj[i as usize] {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.ids.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices in ascending id order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    /// Edges in canonical order: ascending `(lo, hi)`.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = Edge> + '_ {
        self.edges
            .iter()
            .map(|&(i, j)| Edge::canonical(self.ids[i as usize], self.ids[j as usize]))
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).map(|&i| i as usize)
    }

    pub fn degree(&self, v: VertexId) -> Option<usize> {
        self.index_of(v).map(|i| self.adj[i].len())
    }

    /// Dense neighbor lists by position in [`FiniteGraph::vertices`].
    pub fn local_adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    /// Edges as pairs of positions in [`FiniteGraph::vertices`], canonical order.
    pub fn local_edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

impl Topology for FiniteGraph {
    fn neighbors(&self, v: VertexId, out: &mut Vec<VertexId>) {
        if let Some(&i) = self.index.get(&v) {
            out.extend(self.adj[i as usize].iter().map(|&j| self.ids[j as usize]));
        }
    }

    fn degree_bound(&self) -> usize {
        self.max_degree
    }

    fn origin(&self) -> VertexId {
        if let Labeling::Borrowed(t) = &self.labeling {
            let o = t.origin();
            if self.index.contains_key(&o) {
                return o;
            }
        }
        self.ids[0]
    }

    fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    fn label(&self, v: VertexId) -> String {
        match &self.labeling {
            Labeling::Integer => v.0.to_string(),
            Labeling::Named(names) => match self.index.get(&v) {
                Some(&i) => names[i as usize].clone(),
                None => v.0.to_string(),
            },
            Labeling::Borrowed(t) => t.label(v),
        }
    }

    fn parse_vertex(&self, token: &str) -> Result<VertexId> {
        let token = token.trim();
        let v = match &self.labeling {
            Labeling::Named(names) => match names.iter().position(|n| n == token) {
                Some(i) => self.ids[i],
                None => VertexId(token.parse::<u64>().map_err(|_| Error::parse(token, "unknown vertex name"))?),
            },
            Labeling::Borrowed(t) => t.parse_vertex(token)?,
            Labeling::Integer => VertexId(token.parse::<u64>().map_err(|e| Error::parse(token, e.to_string()))?),
        };
        if self.index.contains_key(&v) {
            Ok(v)
        } else {
            Err(Error::parse(token, "no such vertex in this graph"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn path_of_three() {
        let g = FiniteGraph::from_adjacency(vec![(v(0), vec![v(1)]), (v(1), vec![v(0), v(2)]), (v(2), vec![v(1)])]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree_bound(), 2);
    }

    #[test]
    fn single_vertex_is_connected() {
        let g = FiniteGraph::from_adjacency(vec![(v(7), vec![])]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_disconnected() {
        let err = FiniteGraph::from_edges(&[v(0), v(1), v(2), v(3)], &[(v(0), v(1)), (v(2), v(3))]).unwrap_err();
        assert!(err.to_string().contains("disconnected"), "{err}");
    }

    #[test]
    fn rejects_asymmetric_and_loops() {
        let err = FiniteGraph::from_adjacency(vec![(v(0), vec![v(1)]), (v(1), vec![])]).unwrap_err();
        assert!(err.to_string().contains("asymmetric"), "{err}");
        let err = FiniteGraph::from_adjacency(vec![(v(0), vec![v(0)])]).unwrap_err();
        assert!(err.to_string().contains("self-loop"), "{err}");
        let err = FiniteGraph::from_adjacency(vec![(v(0), vec![v(1), v(1)]), (v(1), vec![v(0), v(0)])]).unwrap_err();
        assert!(err.to_string().contains("twice"), "{err}");
    }

    #[test]
    fn edges_are_canonical() {
        let g = FiniteGraph::from_edges(&[v(5), v(1), v(3)], &[(v(5), v(1)), (v(3), v(1))]).unwrap();
        let edges: Vec<_> = g.edges().map(|e| e.endpoints()).collect();
        assert_eq!(edges, vec![(v(1), v(3)), (v(1), v(5))]);
    }
}
