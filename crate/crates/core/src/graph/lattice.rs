use super::{Topology, VertexId};
use crate::error::{Error, Result};

/// The integer lattice Z^d, d in 1..=4.
///
/// Coordinates are packed into the id as `64/d`-bit two's complement
/// fields, coordinate 0 in the highest field. The origin is id 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    bits: u32,
}

impl Lattice {
    pub const MAX_DIM: usize = 4;

    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > Self::MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "lattice dimension must be in 1..={}, got {dim}",
                Self::MAX_DIM
            )));
        }
        Ok(Lattice {
            dim,
            bits: 64 / dim as u32,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn mask(&self) -> u64 {
        if self.bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.bits) - 1
        }
    }

    /// Largest representable absolute coordinate.
    pub fn coordinate_limit(&self) -> i64 {
        if self.bits == 64 {
            i64::MAX
        } else {
            (1i64 << (self.bits - 1)) - 1
        }
    }

    pub fn encode(&self, coords: &[i64]) -> VertexId {
        assert_eq!(coords.len(), self.dim, "wrong number of coordinates");
        let mut id = 0u64;
        for &x in coords {
            assert!(x.abs() <= self.coordinate_limit(), "lattice coordinate {x} out of range");
            id = if self.bits == 64 { x as u64 } else { (id << self.bits) | (x as u64 & self.mask()) };
        }
        VertexId(id)
    }

    pub fn decode(&self, v: VertexId) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        self.decode_into(v, &mut out);
        out
    }

    fn decode_into(&self, v: VertexId, out: &mut [i64]) {
        let shift = 64 - self.bits;
        for (k, slot) in out.iter_mut().enumerate() {
            let field = (v.0 >> (self.bits as usize * (self.dim - 1 - k))) & self.mask();
            *slot = ((field << shift) as i64) >> shift;
        }
    }
}

impl Topology for Lattice {
    fn neighbors(&self, v: VertexId, out: &mut Vec<VertexId>) {
        let mut c = [0i64; Self::MAX_DIM];
        let coords = &mut c[..self.dim];
        self.decode_into(v, coords);
        let limit = self.coordinate_limit();
        for k in 0..self.dim {
            let x = coords[k];
            assert!(x.abs() < limit, "lattice walk reached the coordinate limit {limit}");
            for step in [1, -1] {
                coords[k] = x + step;
                out.push(self.encode(coords));
            }
            coords[k] = x;
        }
    }

    fn degree_bound(&self) -> usize {
        2 * self.dim
    }

    fn origin(&self) -> VertexId {
        VertexId(0)
    }

    fn contains(&self, v: VertexId) -> bool {
        let used = self.bits as usize * self.dim;
        used >= 64 || v.0 >> used == 0
    }

    fn label(&self, v: VertexId) -> String {
        self.decode(v).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
    }

    /// Accepts `x:y` or `x,y`.
    fn parse_vertex(&self, token: &str) -> Result<VertexId> {
        let parts: Vec<&str> = token.trim().split([':', ',']).collect();
        if parts.len() != self.dim {
            return Err(Error::parse(token, format!("expected {} coordinates", self.dim)));
        }
        let coords = parts
            .iter()
            .map(|p| p.trim().parse::<i64>().map_err(|e| Error::parse(token, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if coords.iter().any(|x| x.abs() > self.coordinate_limit()) {
            return Err(Error::parse(token, "coordinate out of range"));
        }
        Ok(self.encode(&coords))
    }

    fn metric(&self, u: VertexId, v: VertexId) -> Option<u64> {
        let (a, b) = (self.decode(u), self.decode(v));
        Some(a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum())
    }
}
