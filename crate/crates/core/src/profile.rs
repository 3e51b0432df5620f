//! Value profiles and initial laws.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::scalar::Scalar;
use crate::seed;

/// Analytic first and second moments of an initial law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub m1: f64,
    pub m2: f64,
}

impl MomentSpec {
    pub fn variance(&self) -> f64 {
        self.m2 - self.m1 * self.m1
    }
}

/// Distribution of a single initial value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LawKind {
    Dirac { c: f64 },
    Bernoulli { p: f64 },
    Uniform { a: f64, b: f64 },
    /// Mean and variance.
    Gaussian { mean: f64, var: f64 },
    /// Shape α > 2 and scale (minimum value).
    Pareto { alpha: f64, scale: f64 },
    /// 1 at one vertex, 0 elsewhere.
    Delta { vertex: VertexId },
}

/// Initial profile law. Values are i.i.d. across vertices except for
/// `Delta`; the value at `v` is a pure function of `(seed, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialLaw {
    pub dist: LawKind,
    pub seed: u64,
}

impl InitialLaw {
    pub fn new(dist: LawKind, seed: u64) -> Result<Self> {
        let law = InitialLaw { dist, seed };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.dist {
            LawKind::Dirac { c } => c.is_finite(),
            LawKind::Bernoulli { p } => (0.0..=1.0).contains(&p),
            LawKind::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            LawKind::Gaussian { mean, var } => mean.is_finite() && var.is_finite() && var >= 0.0,
            LawKind::Pareto { alpha, scale } => alpha > 2.0 && alpha.is_finite() && scale > 0.0 && scale.is_finite(),
            LawKind::Delta { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid initial law {self}")))
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn is_iid(&self) -> bool {
        !matches!(self.dist, LawKind::Delta { .. })
    }

    /// Moments of the common marginal; `None` for `Delta`.
    pub fn moments(&self) -> Option<MomentSpec> {
        let (m1, m2) = match self.dist {
            LawKind::Dirac { c } => (c, c * c),
            LawKind::Bernoulli { p } => (p, p),
            LawKind::Uniform { a, b } => ((a + b) / 2.0, (a * a + a * b + b * b) / 3.0),
            LawKind::Gaussian { mean, var } => (mean, var + mean * mean),
            LawKind::Pareto { alpha, scale } => (alpha * scale / (alpha - 1.0), alpha * scale * scale / (alpha - 2.0)),
            LawKind::Delta { .. } => return None,
        };
        Some(MomentSpec { m1, m2 })
    }

    /// Initial value at `v`.
    pub fn sample_at(&self, v: VertexId) -> f64 {
        let mut rng = seed::rng(seed::vertex_seed(self.seed, v));
        match self.dist {
            LawKind::Dirac { c } => c,
            LawKind::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            LawKind::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            LawKind::Gaussian { mean, var } => Normal::new(mean, var.sqrt()).expect("validated").sample(&mut rng),
            LawKind::Pareto { alpha, scale } => Pareto::new(scale, alpha).expect("validated").sample(&mut rng),
            LawKind::Delta { vertex } => {
                if v == vertex {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Parses `dirac:c`, `bernoulli:p`, `uniform:a,b`, `gaussian:m,var`,
    /// `pareto:alpha,scale` or `delta:vertex`; vertex labels are resolved
    /// against `g`.
    pub fn parse(spec: &str, g: &Graph, seed: u64) -> Result<Self> {
        let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
        let kind = kind.trim();
        if kind == "delta" {
            let vertex = g.parse_vertex(args.trim())?;
            return InitialLaw::new(LawKind::Delta { vertex }, seed);
        }
        let nums = args
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::parse(t, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let dist = match (kind, nums.as_slice()) {
            ("dirac", [c]) => LawKind::Dirac { c: *c },
            ("bernoulli", [p]) => LawKind::Bernoulli { p: *p },
            ("uniform", [a, b]) => LawKind::Uniform { a: *a, b: *b },
            ("gaussian", [mean, var]) => LawKind::Gaussian { mean: *mean, var: *var },
            ("gaussian", []) => LawKind::Gaussian { mean: 0.0, var: 1.0 },
            ("pareto", [alpha, scale]) => LawKind::Pareto { alpha: *alpha, scale: *scale },
            ("pareto", [alpha]) => LawKind::Pareto { alpha: *alpha, scale: 1.0 },
            _ => {
                return Err(Error::parse(
                    spec,
                    "expected dirac:C, bernoulli:P, uniform:A,B, gaussian:M,VAR, pareto:ALPHA,SCALE or delta:VERTEX",
                ))
            }
        };
        InitialLaw::new(dist, seed)
    }
}

impl fmt::Display for InitialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dist {
            LawKind::Dirac { c } => write!(f, "dirac:{c}"),
            LawKind::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            LawKind::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            LawKind::Gaussian { mean, var } => write!(f, "gaussian:{mean},{var}"),
            LawKind::Pareto { alpha, scale } => write!(f, "pareto:{alpha},{scale}"),
            LawKind::Delta { vertex } => write!(f, "delta:{vertex}"),
        }
    }
}

impl FromStr for LawKind {
    type Err = Error;

    /// Same grammar as [`InitialLaw::parse`], with `delta` taking a raw id.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("delta:") {
            let id = rest.trim().parse::<u64>().map_err(|e| Error::parse(rest, e.to_string()))?;
            return Ok(LawKind::Delta { vertex: VertexId(id) });
        }
        let g = Graph::generate(&crate::graph::GeneratorSpec::Path { n: 1 })?;
        Ok(InitialLaw::parse(s, &g, 0)?.dist)
    }
}

/// Value given to vertices without an explicit entry.
#[derive(Clone, Debug, PartialEq)]
pub enum Fill<T = f64> {
    Constant(T),
    Sampled(InitialLaw),
}

/// Sparse vertex-valued profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile<T = f64> {
    values: BTreeMap<VertexId, T>,
    fill: Fill<T>,
}

impl<T: Scalar> Profile<T> {
    /// Profile equal to `c` everywhere.
    pub fn constant(c: T) -> Self {
        Profile {
            values: BTreeMap::new(),
            fill: Fill::Constant(c),
        }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Indicator of `v`.
    pub fn delta(v: VertexId) -> Self {
        let mut p = Self::zero();
        p.set(v, T::one());
        p
    }

    /// Profile drawn from `law`, realized lazily vertex by vertex.
    pub fn sampled(law: InitialLaw) -> Self {
        Profile {
            values: BTreeMap::new(),
            fill: Fill::Sampled(law),
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = (VertexId, T)>, fill: T) -> Self {
        Profile {
            values: values.into_iter().collect(),
            fill: Fill::Constant(fill),
        }
    }

    pub fn fill(&self) -> &Fill<T> {
        &self.fill
    }

    pub fn get(&self, v: VertexId) -> T {
        match self.values.get(&v) {
            Some(x) => x.clone(),
            None => self.default_at(v),
        }
    }

    pub fn default_at(&self, v: VertexId) -> T {
        match &self.fill {
            Fill::Constant(c) => c.clone(),
            Fill::Sampled(law) => T::from_f64(law.sample_at(v)),
        }
    }

    pub fn set(&mut self, v: VertexId, x: T) {
        self.values.insert(v, x);
    }

    /// Explicitly stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, &T)> {
        self.values.iter().map(|(&v, x)| (v, x))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// Values at every vertex of a finite graph, in the graph's vertex order.
    pub fn materialize(&self, g: &Graph) -> Result<Vec<T>> {
        let f = g
            .as_finite()
            .ok_or_else(|| Error::InvalidParameter("materialize needs a finite graph".into()))?;
        Ok(f.vertices().iter().map(|&v| self.get(v)).collect())
    }
}

impl Profile<f64> {
    /// Sum of stored values; the whole mass when the fill is zero.
    pub fn stored_sum(&self) -> f64 {
        self.values.values().sum()
    }
}
