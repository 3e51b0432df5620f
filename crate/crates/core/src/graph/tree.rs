use super::{Topology, VertexId};
use crate::error::{Error, Result};

/// Rooted tree: the root has `root_degree` children, every other vertex a
/// parent and `branching` children.
///
/// With `root_degree == branching + 1` this is the (b+1)-regular tree.
/// Ids: the root is 0; vertex `h` (b-ary heap index) of the subtree hanging
/// off root child `j` has id `1 + j + root_degree * h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularTree {
    branching: u64,
    root_degree: u64,
}

impl RegularTree {
    pub fn new(branching: u64, root_degree: u64) -> Result<Self> {
        if branching < 1 || root_degree < 1 {
            return Err(Error::InvalidParameter(format!(
                "tree needs branching >= 1 and root degree >= 1, got b={branching}, root={root_degree}"
            )));
        }
        Ok(RegularTree { branching, root_degree })
    }

    pub fn branching(&self) -> u64 {
        self.branching
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        if v.0 == 0 {
            return None;
        }
        let (j, h) = self.split(v);
        if h == 0 {
            Some(VertexId(0))
        } else {
            Some(self.join(j, (h - 1) / self.branching))
        }
    }

    pub fn depth(&self, mut v: VertexId) -> u64 {
        let mut d = 0;
        while let Some(p) = self.parent(v) {
            v = p;
            d += 1;
        }
        d
    }

    fn split(&self, v: VertexId) -> (u64, u64) {
        ((v.0 - 1) % self.root_degree, (v.0 - 1) / self.root_degree)
    }

    fn join(&self, j: u64, h: u64) -> VertexId {
        VertexId(1 + j + self.root_degree * h)
    }

    fn ancestors(&self, mut v: VertexId) -> Vec<VertexId> {
        let mut out = vec![v];
        while let Some(p) = self.parent(v) {
            out.push(p);
            v = p;
        }
        out.reverse();
        out
    }
}

impl Topology for RegularTree {
    fn neighbors(&self, v: VertexId, out: &mut Vec<VertexId>) {
        self.try_neighbors(v, out).expect("tree address overflow")
    }

    fn try_neighbors(&self, v: VertexId, out: &mut Vec<VertexId>) -> Result<()> {
        if v.0 == 0 {
            out.extend((0..self.root_degree).map(|j| VertexId(1 + j)));
            return Ok(());
        }
        let (j, h) = self.split(v);
        let first = self
            .branching
            .checked_mul(h)
            .and_then(|x| x.checked_add(self.branching))
            .and_then(|x| x.checked_mul(self.root_degree))
            .and_then(|x| x.checked_add(1 + j));
        if first.is_none() {
            return Err(Error::AddressSpace(format!("children of tree vertex {v} at depth {}", self.depth(v))));
        }
        out.push(self.parent(v).expect("non-root vertex has a parent"));
        for c in 1..=self.branching {
            out.push(VertexId(1 + j + self.root_degree * (self.branching * h + c)));
        }
        Ok(())
    }

    fn degree_bound(&self) -> usize {
        (self.branching + 1).max(self.root_degree) as usize
    }

    fn origin(&self) -> VertexId {
        VertexId(0)
    }

    fn contains(&self, _v: VertexId) -> bool {
        true
    }

    fn metric(&self, u: VertexId, v: VertexId) -> Option<u64> {
        let (a, b) = (self.ancestors(u), self.ancestors(v));
        let common = a.iter().zip(&b).take_while(|(x, y)| x == y).count() as u64;
        Some(a.len() as u64 + b.len() as u64 - 2 * common)
    }
}
