use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;

use super::{FiniteGraph, Graph, Labeling, Lattice, RegularTree, VertexId};
use crate::error::{Error, Result};
use crate::seed;

/// Standard graph families, written as `kind:key=val,...` strings
/// (positional values are accepted in the order listed below).
///
/// | kind             | keys            |
/// |------------------|-----------------|
/// | `path`           | `n`             |
/// | `cycle`          | `n`             |
/// | `complete`       | `n`             |
/// | `star`           | `n` (vertices)  |
/// | `torus`          | `d`, `side`     |
/// | `lattice`        | `d` (lazy)      |
/// | `tree`           | `b`, `root` (lazy; root defaults to `b`) |
/// | `random-regular` | `n`, `d`, `seed`|
/// | `box`            | `d`, `r` (finite cube cut from the lattice) |
/// | `file`           | `path` (edge list) |
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Star { n: usize },
    Torus { d: usize, side: usize },
    Lattice { d: usize },
    Tree { b: u64, root: Option<u64> },
    RandomRegular { n: usize, d: usize, seed: Option<u64> },
    LatticeBox { d: usize, r: i64 },
    EdgeList { path: PathBuf },
}

const KEYS: &[(&str, &[&str])] = &[
    ("path", &["n"]),
    ("cycle", &["n"]),
    ("complete", &["n"]),
    ("star", &["n"]),
    ("torus", &["d", "side"]),
    ("lattice", &["d"]),
    ("tree", &["b", "root"]),
    ("random-regular", &["n", "d", "seed"]),
    ("box", &["d", "r"]),
    ("file", &["path"]),
];

/// Splits `kind:a=1,b=2` (or `kind:1,2`) into the kind and key/value pairs.
pub(crate) fn split_spec<'a>(spec: &'a str, keys: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>> {
    let body = spec.split_once(':').map(|(_, b)| b).unwrap_or("");
    let mut out = Vec::new();
    for (pos, token) in body.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
        match token.split_once('=') {
            Some((k, v)) => {
                let k = keys
                    .iter()
                    .find(|key| **key == k.trim())
                    .ok_or_else(|| Error::parse(token, format!("unknown key; expected one of {keys:?}")))?;
                out.push((*k, v.trim()));
            }
            None => {
                let k = keys
                    .get(pos)
                    .ok_or_else(|| Error::parse(token, "too many positional values"))?;
                out.push((*k, token));
            }
        }
    }
    Ok(out)
}

fn get<T: FromStr>(pairs: &[(&str, &str)], key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    pairs
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.parse::<T>().map_err(|e| Error::parse(*v, format!("{key}: {e}"))))
        .transpose()
}

fn need<T: FromStr>(pairs: &[(&str, &str)], key: &str, spec: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    get(pairs, key)?.ok_or_else(|| Error::parse(spec, format!("missing `{key}`")))
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let kind = spec.split(':').next().unwrap_or("").trim();
        let keys = KEYS
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, keys)| *keys)
            .ok_or_else(|| {
                let kinds: Vec<&str> = KEYS.iter().map(|(k, _)| *k).collect();
                Error::parse(kind, format!("unknown graph kind; expected one of {kinds:?}"))
            })?;
        let p = split_spec(spec, keys)?;
        Ok(match kind {
            "path" => GeneratorSpec::Path { n: need(&p, "n", spec)? },
            "cycle" => GeneratorSpec::Cycle { n: need(&p, "n", spec)? },
            "complete" => GeneratorSpec::Complete { n: need(&p, "n", spec)? },
            "star" => GeneratorSpec::Star { n: need(&p, "n", spec)? },
            "torus" => GeneratorSpec::Torus {
                d: need(&p, "d", spec)?,
                side: need(&p, "side", spec)?,
            },
            "lattice" => GeneratorSpec::Lattice { d: need(&p, "d", spec)? },
            "tree" => GeneratorSpec::Tree {
                b: need(&p, "b", spec)?,
                root: get(&p, "root")?,
            },
            "random-regular" => GeneratorSpec::RandomRegular {
                n: need(&p, "n", spec)?,
                d: need(&p, "d", spec)?,
                seed: get(&p, "seed")?,
            },
            "box" => GeneratorSpec::LatticeBox {
                d: need(&p, "d", spec)?,
                r: need(&p, "r", spec)?,
            },
            "file" => GeneratorSpec::EdgeList {
                path: PathBuf::from(need::<String>(&p, "path", spec)?),
            },
            _ => unreachable!(),
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Path { n } => write!(f, "path:n={n}"),
            GeneratorSpec::Cycle { n } => write!(f, "cycle:n={n}"),
            GeneratorSpec::Complete { n } => write!(f, "complete:n={n}"),
            GeneratorSpec::Star { n } => write!(f, "star:n={n}"),
            GeneratorSpec::Torus { d, side } => write!(f, "torus:d={d},side={side}"),
            GeneratorSpec::Lattice { d } => write!(f, "lattice:d={d}"),
            GeneratorSpec::Tree { b, root: None } => write!(f, "tree:b={b}"),
            GeneratorSpec::Tree { b, root: Some(r) } => write!(f, "tree:b={b},root={r}"),
            GeneratorSpec::RandomRegular { n, d, seed: None } => write!(f, "random-regular:n={n},d={d}"),
            GeneratorSpec::RandomRegular { n, d, seed: Some(s) } => {
                write!(f, "random-regular:n={n},d={d},seed={s}")
            }
            GeneratorSpec::LatticeBox { d, r } => write!(f, "box:d={d},r={r}"),
            GeneratorSpec::EdgeList { path } => write!(f, "file:path={}", path.display()),
        }
    }
}

fn ids(n: usize) -> Vec<VertexId> {
    (0..n as u64).map(VertexId).collect()
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n < 1 {
        Err(Error::InvalidParameter(format!("{what} needs n >= 1")))
    } else {
        Ok(())
    }
}

impl GeneratorSpec {
    /// Fills in a missing random-graph seed.
    pub fn with_default_seed(self, default: u64) -> Self {
        match self {
            GeneratorSpec::RandomRegular { n, d, seed: None } => GeneratorSpec::RandomRegular { n, d, seed: Some(default) },
            other => other,
        }
    }

    pub fn build(&self) -> Result<Graph> {
        match *self {
            GeneratorSpec::Path { n } => {
                positive(n, "path")?;
                let edges: Vec<_> = (1..n as u64).map(|i| (VertexId(i - 1), VertexId(i))).collect();
                FiniteGraph::from_edges(&ids(n), &edges).map(Graph::finite)
            }
            GeneratorSpec::Cycle { n } => {
                if n < 3 {
                    return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
                }
                let edges: Vec<_> = (0..n as u64).map(|i| (VertexId(i), VertexId((i + 1) % n as u64))).collect();
                FiniteGraph::from_edges(&ids(n), &edges).map(Graph::finite)
            }
            GeneratorSpec::Complete { n } => {
                positive(n, "complete graph")?;
                let mut edges = Vec::new();
                for i in 0..n as u64 {
                    for j in i + 1..n as u64 {
                        edges.push((VertexId(i), VertexId(j)));
                    }
                }
                FiniteGraph::from_edges(&ids(n), &edges).map(Graph::finite)
            }
            GeneratorSpec::Star { n } => {
                if n < 2 {
                    return Err(Error::InvalidParameter(format!("star needs n >= 2 vertices, got {n}")));
                }
                let edges: Vec<_> = (1..n as u64).map(|i| (VertexId(0), VertexId(i))).collect();
                let mut names = vec!["center".to_string()];
                names.extend((0..n - 1).map(|k| format!("leaf{k}")));
                let g = FiniteGraph::from_edges(&ids(n), &edges)?;
                Ok(Graph::finite(g.with_labeling(Labeling::Named(Arc::new(names)))))
            }
            GeneratorSpec::Torus { d, side } => torus(d, side),
            GeneratorSpec::Lattice { d } => Lattice::new(d).map(Graph::lazy),
            GeneratorSpec::Tree { b, root } => RegularTree::new(b, root.unwrap_or(b)).map(Graph::lazy),
            GeneratorSpec::RandomRegular { n, d, seed } => random_regular(n, d, seed.unwrap_or(0)),
            GeneratorSpec::LatticeBox { d, r } => lattice_box(d, r),
            GeneratorSpec::EdgeList { ref path } => super::read_edge_list(path),
        }
    }
}

fn torus(d: usize, side: usize) -> Result<Graph> {
    if d < 1 || side < 3 {
        return Err(Error::InvalidParameter(format!("torus needs d >= 1 and side >= 3, got d={d}, side={side}")));
    }
    let n = side
        .checked_pow(d as u32)
        .filter(|&n| n <= 50_000_000)
        .ok_or_else(|| Error::InvalidParameter("torus too large".into()))?;
    let mut edges = Vec::with_capacity(n * d);
    let mut stride = 1;
    for _ in 0..d {
        for i in 0..n {
            let coord = (i / stride) % side;
            let j = i - coord * stride + ((coord + 1) % side) * stride;
            edges.push((VertexId(i as u64), VertexId(j as u64)));
        }
        stride *= side;
    }
    FiniteGraph::from_edges(&ids(n), &edges).map(Graph::finite)
}

fn lattice_box(d: usize, r: i64) -> Result<Graph> {
    if r < 0 {
        return Err(Error::InvalidParameter(format!("box radius must be >= 0, got {r}")));
    }
    let lattice = Lattice::new(d)?;
    if r >= lattice.coordinate_limit() {
        return Err(Error::InvalidParameter("box radius exceeds lattice encoding range".into()));
    }
    cube(&lattice, r)
}

/// The cube `[-r, r]^d` of the lattice, keeping lattice ids and labels.
fn cube(lattice: &Lattice, r: i64) -> Result<Graph> {
    {
        let d = lattice.dim();
        let side = (2 * r + 1) as usize;
        let n = side.pow(d as u32);
        let mut vertices = Vec::with_capacity(n);
        let mut coords = vec![-r; d];
        for _ in 0..n {
            vertices.push(lattice.encode(&coords));
            for c in coords.iter_mut() {
                *c += 1;
                if *c > r {
                    *c = -r;
                } else {
                    break;
                }
            }
        }
        let mut edges = Vec::with_capacity(n * d);
        for &v in &vertices {
            let c = lattice.decode(v);
            for k in 0..d {
                if c[k] < r {
                    let mut w = c.clone();
                    w[k] += 1;
                    edges.push((v, lattice.encode(&w)));
                }
            }
        }
        let g = FiniteGraph::from_edges(&vertices, &edges)?;
        Ok(Graph::finite(g.with_labeling(Labeling::Borrowed(Arc::new(*lattice)))))
    }
}

/// Uniform-ish random d-regular graph via the pairing model with restarts,
/// conditioned on being simple and connected.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n < 1 || d < 1 || d >= n || (n * d) % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "random regular graph needs 1 <= d < n and n*d even, got n={n}, d={d}"
        )));
    }
    const ATTEMPTS: u64 = 10_000;
    for attempt in 0..ATTEMPTS {
        let mut rng = seed::rng(seed::derive(seed, "random-regular", attempt));
        let mut stubs: Vec<u64> = (0..n as u64).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut seen = rustc_hash::FxHashSet::default();
        let simple = stubs.chunks(2).all(|p| {
            let (a, b) = (p[0].min(p[1]), p[0].max(p[1]));
            edges.push((VertexId(a), VertexId(b)));
            a != b && seen.insert((a, b))
        });
        if !simple {
            continue;
        }
        match FiniteGraph::from_edges(&ids(n), &edges) {
            Ok(g) => return Ok(Graph::finite(g)),
            Err(Error::InvalidGraph(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidParameter(format!(
        "no simple connected {d}-regular graph on {n} vertices found in {ATTEMPTS} attempts"
    )))
}
