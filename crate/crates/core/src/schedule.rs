//! Shared randomness: per-edge Poisson clocks and update weights, realized as
//! an explicit [`UpdateSequence`].
//!
//! Every edge owns an independent random stream keyed by the clock seed and
//! its canonical endpoints. The stream yields the edge's event times (Exp(λ)
//! gaps) and, for each event, its weight μ. Truncating at a horizon only cuts
//! the stream, so any two generators that visit the same edge agree on it.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexId};
use crate::seed;

/// Region safety cap used when none is configured.
pub const DEFAULT_REGION_CAP: usize = 10_000_000;

/// Law of the update weight μ; support always inside (0, 1/2].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MuLaw {
    /// Complete averaging, μ = 1/2.
    Half,
    Fixed { mu: f64 },
    /// Uniform on the half-open interval (lo, hi].
    Uniform { lo: f64, hi: f64 },
}

impl MuLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MuLaw::Half => Ok(()),
            MuLaw::Fixed { mu } if mu > 0.0 && mu <= 0.5 => Ok(()),
            MuLaw::Uniform { lo, hi } if lo >= 0.0 && lo < hi && hi <= 0.5 => Ok(()),
            other => Err(Error::InvalidParameter(format!("{other} has support outside (0, 1/2]"))),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            MuLaw::Half => 0.5,
            MuLaw::Fixed { mu } => mu,
            MuLaw::Uniform { lo, hi } => {
                let u: f64 = rng.random();
                let mu = lo + (hi - lo) * (1.0 - u);
                if mu > lo {
                    mu
                } else {
                    hi
                }
            }
        }
    }
}

impl fmt::Display for MuLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuLaw::Half => write!(f, "half"),
            MuLaw::Fixed { mu } => write!(f, "fixed:{mu}"),
            MuLaw::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
        }
    }
}

impl FromStr for MuLaw {
    type Err = Error;

    /// `half`, `fixed:0.3` or `uniform:0.1,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = args
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::parse(t, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let law = match (kind.trim(), nums.as_slice()) {
            ("half", []) => MuLaw::Half,
            ("fixed", [mu]) => MuLaw::Fixed { mu: *mu },
            ("uniform", [lo, hi]) => MuLaw::Uniform { lo: *lo, hi: *hi },
            _ => return Err(Error::parse(s, "expected `half`, `fixed:MU` or `uniform:LO,HI`")),
        };
        law.validate()?;
        Ok(law)
    }
}

/// Clock parameters shared by all edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockConfig {
    /// Poisson intensity λ of every edge.
    pub intensity: f64,
    pub mu_law: MuLaw,
    pub seed: u64,
    /// Largest region (in vertices) a lazy exploration may settle.
    pub region_cap: usize,
}

impl Default for ClockConfig {
    fn default() -> Self {
        ClockConfig {
            intensity: 1.0,
            mu_law: MuLaw::Half,
            seed: 0,
            region_cap: DEFAULT_REGION_CAP,
        }
    }
}

impl ClockConfig {
    pub fn new(intensity: f64, mu_law: MuLaw, seed: u64) -> Self {
        ClockConfig {
            intensity,
            mu_law,
            seed,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return Err(Error::InvalidParameter(format!("intensity must be positive, got {}", self.intensity)));
        }
        self.mu_law.validate()
    }

    /// Appends the `(time, mu)` events of edge `{a, b}` in `(0, horizon]`.
    pub fn edge_events(&self, a: VertexId, b: VertexId, horizon: f64, out: &mut Vec<(f64, f64)>) {
        let mut rng = seed::rng(seed::edge_seed(self.seed, a, b));
        let mut t = 0.0;
        loop {
            let gap: f64 = rng.sample(Exp1);
            t += gap / self.intensity;
            if t > horizon {
                break;
            }
            let mu = self.mu_law.sample(&mut rng);
            out.push((t, mu));
        }
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon >= 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("horizon must be finite and >= 0, got {horizon}")))
    }
}

/// One update: the endpoints of `edge` move toward each other by `mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateStep {
    pub edge: Edge,
    pub mu: f64,
    pub time: f64,
}

/// Chronological list of updates on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateSequence {
    pub steps: Vec<UpdateStep>,
    pub horizon: f64,
    pub rng_seed: u64,
    pub intensity: f64,
    /// Number of equal adjacent timestamps, resolved by canonical edge order.
    pub ties: usize,
}

impl UpdateSequence {
    /// Sequence with explicit steps; times must be non-decreasing and in
    /// `[0, horizon]`, weights in (0, 1/2].
    pub fn from_steps(steps: Vec<UpdateStep>, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        let mut ties = 0;
        for (k, s) in steps.iter().enumerate() {
            if !(s.mu > 0.0 && s.mu <= 0.5) {
                return Err(Error::InvalidParameter(format!("step {k} has mu = {} outside (0, 1/2]", s.mu)));
            }
            if !(s.time >= 0.0 && s.time <= horizon) {
                return Err(Error::InvalidParameter(format!("step {k} at time {} outside [0, {horizon}]", s.time)));
            }
            if k > 0 {
                let prev = steps[k - 1].time;
                if s.time < prev {
                    return Err(Error::InvalidParameter(format!("step {k} is out of chronological order")));
                }
                if s.time == prev {
                    ties += 1;
                }
            }
        }
        Ok(UpdateSequence {
            steps,
            horizon,
            rng_seed: 0,
            intensity: 0.0,
            ties,
        })
    }

    /// Discrete-time sequence: step `k` happens at time `k + 1`.
    pub fn discrete(updates: &[(Edge, f64)]) -> Result<Self> {
        let steps = updates
            .iter()
            .enumerate()
            .map(|(k, &(edge, mu))| UpdateStep {
                edge,
                mu,
                time: (k + 1) as f64,
            })
            .collect();
        Self::from_steps(steps, updates.len() as f64)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Steps with time `<= t`, as a sequence with horizon `t`.
    pub fn truncate(&self, t: f64) -> UpdateSequence {
        let end = self.steps.partition_point(|s| s.time <= t);
        UpdateSequence {
            steps: self.steps[..end].to_vec(),
            horizon: t,
            ..self.clone_header()
        }
    }

    /// The first `n` steps, with the horizon unchanged.
    pub fn take(&self, n: usize) -> UpdateSequence {
        UpdateSequence {
            steps: self.steps[..n.min(self.steps.len())].to_vec(),
            ..self.clone_header()
        }
    }

    fn clone_header(&self) -> UpdateSequence {
        UpdateSequence {
            steps: Vec::new(),
            horizon: self.horizon,
            rng_seed: self.rng_seed,
            intensity: self.intensity,
            ties: self.ties,
        }
    }

    /// Writes the `time,edge_u,edge_v,mu` trace, preceded by a `#` metadata line.
    pub fn write_csv<W: Write>(&self, g: &Graph, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# horizon={},seed={},intensity={},ties={}",
            self.horizon, self.rng_seed, self.intensity, self.ties
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "edge_u", "edge_v", "mu"])?;
        for s in &self.steps {
            let (a, b) = s.edge.endpoints();
            w.write_record([s.time.to_string(), g.label(a), g.label(b), s.mu.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a trace written by [`UpdateSequence::write_csv`].
    pub fn read_csv(g: &Graph, text: &str) -> Result<Self> {
        let mut horizon = None;
        let mut rng_seed = 0;
        let mut intensity = 0.0;
        // Leading comment lines; only the `key=value,...` one carries metadata.
        let metas = text
            .lines()
            .map_while(|l| l.strip_prefix('#'))
            .map(str::trim)
            .filter(|m| m.starts_with("horizon="));
        for meta in metas {
            for kv in meta.split(',') {
                if let Some((k, v)) = kv.split_once('=') {
                    let bad = |e: &dyn fmt::Display| Error::parse(kv, e.to_string());
                    match k.trim() {
                        "horizon" => horizon = Some(v.trim().parse::<f64>().map_err(|e| bad(&e))?),
                        "seed" => rng_seed = v.trim().parse::<u64>().map_err(|e| bad(&e))?,
                        "intensity" => intensity = v.trim().parse::<f64>().map_err(|e| bad(&e))?,
                        _ => {}
                    }
                }
            }
        }
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut steps = Vec::new();
        for record in reader.records() {
            let r = record?;
            if r.len() != 4 {
                return Err(Error::parse(format!("{r:?}"), "expected time,edge_u,edge_v,mu"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::parse(s, e.to_string()));
            let (a, b) = (g.parse_vertex(&r[1])?, g.parse_vertex(&r[2])?);
            if !g.is_edge(a, b) {
                return Err(Error::NotAnEdge(format!("{}-{}", &r[1], &r[2])));
            }
            steps.push(UpdateStep {
                edge: Edge::new(a, b)?,
                time: num(&r[0])?,
                mu: num(&r[3])?,
            });
        }
        let horizon = horizon.unwrap_or_else(|| steps.last().map_or(0.0, |s| s.time));
        let mut seq = Self::from_steps(steps, horizon)?;
        seq.rng_seed = rng_seed;
        seq.intensity = intensity;
        Ok(seq)
    }
}

/// Orders `(time, edge, mu)` events chronologically, breaking exact ties by
/// canonical edge order, and counts the ties.
pub(crate) fn sort_events(events: &mut [(f64, Edge, f64)]) -> usize {
    events.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    events.windows(2).filter(|w| w[0].0 == w[1].0).count()
}

/// All Poisson events of a finite graph on `[0, horizon]`.
pub fn sample_finite(g: &Graph, cfg: &ClockConfig, horizon: f64) -> Result<UpdateSequence> {
    cfg.validate()?;
    check_horizon(horizon)?;
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("sample_finite needs a finite graph; use explore_region".into()))?;
    let mut events = Vec::new();
    let mut buf = Vec::new();
    for edge in f.edges() {
        let (a, b) = edge.endpoints();
        buf.clear();
        cfg.edge_events(a, b, horizon, &mut buf);
        events.extend(buf.iter().map(|&(t, mu)| (t, edge, mu)));
    }
    let ties = sort_events(&mut events);
    Ok(UpdateSequence {
        steps: events
            .into_iter()
            .map(|(time, edge, mu)| UpdateStep { edge, mu, time })
            .collect(),
        horizon,
        rng_seed: cfg.seed,
        intensity: cfg.intensity,
        ties,
    })
}

/// Time reversal on `[0, horizon]`: step order flipped, each time mapped to
/// `horizon - time`. Edges and weights are untouched.
pub fn reverse(seq: &UpdateSequence) -> UpdateSequence {
    UpdateSequence {
        steps: seq
            .steps
            .iter()
            .rev()
            .map(|s| UpdateStep {
                time: seq.horizon - s.time,
                ..*s
            })
            .collect(),
        ..seq.clone_header()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;

    fn e(a: u64, b: u64) -> Edge {
        Edge::new(VertexId(a), VertexId(b)).unwrap()
    }

    #[test]
    fn zero_horizon_is_empty() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 10 }).unwrap();
        assert!(sample_finite(&g, &ClockConfig::default(), 0.0).unwrap().is_empty());
    }

    #[test]
    fn reverse_example() {
        let seq = UpdateSequence::from_steps(
            vec![
                UpdateStep { edge: e(0, 1), mu: 0.5, time: 1.0 },
                UpdateStep { edge: e(1, 2), mu: 0.3, time: 2.0 },
            ],
            3.0,
        )
        .unwrap();
        let r = reverse(&seq);
        assert_eq!(
            r.steps,
            vec![
                UpdateStep { edge: e(1, 2), mu: 0.3, time: 1.0 },
                UpdateStep { edge: e(0, 1), mu: 0.5, time: 2.0 },
            ]
        );
        assert!(reverse(&UpdateSequence::from_steps(vec![], 2.0).unwrap()).is_empty());
    }

    #[test]
    fn sampling_is_deterministic_and_sorted() {
        let g = Graph::generate(&GeneratorSpec::Torus { d: 2, side: 5 }).unwrap();
        let cfg = ClockConfig::new(1.0, MuLaw::Uniform { lo: 0.0, hi: 0.5 }, 42);
        let a = sample_finite(&g, &cfg, 7.0).unwrap();
        let b = sample_finite(&g, &cfg, 7.0).unwrap();
        assert_eq!(a, b);
        assert!(a.steps.windows(2).all(|w| w[0].time < w[1].time));
        assert!(a.steps.iter().all(|s| s.mu > 0.0 && s.mu <= 0.5 && s.time <= 7.0));
        assert_eq!(a.ties, 0);
        // A shorter horizon sees a prefix of the same clocks.
        assert_eq!(sample_finite(&g, &cfg, 3.0).unwrap().steps, a.truncate(3.0).steps);
    }

    #[test]
    fn mu_law_parsing() {
        assert_eq!("half".parse::<MuLaw>().unwrap(), MuLaw::Half);
        assert_eq!("fixed:0.25".parse::<MuLaw>().unwrap(), MuLaw::Fixed { mu: 0.25 });
        assert!("fixed:0.7".parse::<MuLaw>().is_err());
        assert!("fixed:0".parse::<MuLaw>().is_err());
        assert!("uniform:0.3,0.2".parse::<MuLaw>().is_err());
    }

    #[test]
    fn from_steps_validates() {
        let bad_mu = vec![UpdateStep { edge: e(0, 1), mu: 0.0, time: 1.0 }];
        assert!(UpdateSequence::from_steps(bad_mu, 2.0).is_err());
        let unordered = vec![
            UpdateStep { edge: e(0, 1), mu: 0.5, time: 1.5 },
            UpdateStep { edge: e(0, 1), mu: 0.5, time: 1.0 },
        ];
        assert!(UpdateSequence::from_steps(unordered, 2.0).is_err());
    }

    #[test]
    fn csv_trace_round_trip() {
        let g = Graph::generate(&GeneratorSpec::Cycle { n: 6 }).unwrap();
        let cfg = ClockConfig::new(1.0, MuLaw::Uniform { lo: 0.1, hi: 0.5 }, 3);
        let seq = sample_finite(&g, &cfg, 4.0).unwrap();
        let mut buf = Vec::new();
        seq.write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap() == "time,edge_u,edge_v,mu");
        let back = UpdateSequence::read_csv(&g, &text).unwrap();
        assert_eq!(back, seq);
    }
}
