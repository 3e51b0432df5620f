//! Monte Carlo experiments with reproducible reports.
//!
//! Replica `i` of every experiment draws its clocks from
//! `derive(clock_seed, stream, i)` and its initial values from
//! `derive(law_seed, stream, i)`, so a report is a pure function of its
//! configuration regardless of how replicas are scheduled.

use std::io::Write;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::{mix_pair, run_at_root};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::par;
use crate::profile::InitialLaw;
use crate::sad::{dual_on_region, forward_maxima, RegionSad};
use crate::schedule::ClockConfig;
use crate::seed;
use crate::stats::{self, ks_two_sample, median, Estimate};

/// Default observation grid `2^0, .., 2^k`.
pub fn geometric_grid(k: u32) -> Vec<f64> {
    (0..=k).map(|i| (1u64 << i) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
}

impl SeriesPoint {
    fn from_estimate(t: f64, e: &Estimate) -> Self {
        SeriesPoint {
            t,
            estimate: e.mean,
            stderr: e.stderr,
            n: e.n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<SeriesPoint>,
}

/// A statistical decision with its evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Whether the verdict counts toward the report's status.
    pub gating: bool,
    pub statistic: f64,
    pub tolerance: f64,
    pub replicas: usize,
    pub detail: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: Value,
    pub status: Status,
    pub series: Vec<Series>,
    pub verdicts: Vec<Verdict>,
    pub extra: Value,
}

impl ExperimentReport {
    fn new(experiment: &str, config: Value, series: Vec<Series>, verdicts: Vec<Verdict>, extra: Value) -> Self {
        let status = if verdicts.iter().filter(|v| v.gating).all(|v| v.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        ExperimentReport {
            experiment: experiment.into(),
            config,
            status,
            series,
            verdicts,
            extra,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Replaces the configuration echo.
    pub fn with_config(mut self, config: Value) -> Self {
        self.config = config;
        self
    }

    /// Plot-ready CSV `t,estimate,stderr,n` for one series.
    pub fn write_series_csv<W: Write>(&self, name: &str, out: W) -> Result<()> {
        let s = self
            .series(name)
            .ok_or_else(|| Error::InvalidParameter(format!("no series named {name}")))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "estimate", "stderr", "n"])?;
        for p in &s.points {
            w.write_record([p.t.to_string(), p.estimate.to_string(), p.stderr.to_string(), p.n.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn replica_clock(cfg: &ClockConfig, stream: &str, i: usize) -> ClockConfig {
    cfg.with_seed(seed::derive(cfg.seed, stream, i as u64))
}

fn replica_law(law: &InitialLaw, stream: &str, i: usize) -> InitialLaw {
    law.with_seed(seed::derive(law.seed, stream, i as u64))
}

fn check_horizons(horizons: &[f64]) -> Result<()> {
    if horizons.is_empty() || horizons.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("horizons must be finite, non-negative and increasing".into()));
    }
    Ok(())
}

fn column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

/// Mean of `eta_t(root)` at each horizon; passes when `m1` is inside every
/// 99% interval.
pub fn mean_preservation(g: &Graph, law: &InitialLaw, cfg: &ClockConfig, root: VertexId, horizons: &[f64], replicas: usize) -> Result<ExperimentReport> {
    check_horizons(horizons)?;
    let m = law
        .moments()
        .ok_or_else(|| Error::InvalidParameter("mean preservation needs an i.i.d. law".into()))?;
    let rows = par::try_replicate(replicas, |i| {
        let c = replica_clock(cfg, "mean", i);
        let l = replica_law(law, "mean", i);
        horizons.iter().map(|&t| run_at_root(g, &l, &c, t, root)).collect::<Result<Vec<f64>>>()
    })?;
    let mut points = Vec::new();
    let mut verdicts = Vec::new();
    for (k, &t) in horizons.iter().enumerate() {
        let e = Estimate::from_samples(&column(&rows, k));
        points.push(SeriesPoint::from_estimate(t, &e));
        let z = if e.stderr > 0.0 { (e.mean - m.m1) / e.stderr } else if e.mean == m.m1 { 0.0 } else { f64::INFINITY };
        verdicts.push(Verdict {
            name: format!("m1_in_ci_t={t}"),
            passed: e.contains(m.m1),
            gating: true,
            statistic: z,
            tolerance: stats::Z99,
            replicas,
            detail: json!({ "m1": m.m1, "estimate": e }),
        });
    }
    Ok(ExperimentReport::new(
        "mean",
        json!({ "law": law, "clock": cfg, "root": root, "horizons": horizons, "replicas": replicas }),
        vec![Series { name: "mean".into(), points }],
        verdicts,
        json!({ "m1": m.m1, "m2": m.m2 }),
    ))
}

/// Second moment of `eta_t(root) - m1` against `Var(eta_0) * E[Y_t(root)]`,
/// both from the same dual run per replica and horizon.
pub fn l2_convergence(g: &Graph, law: &InitialLaw, cfg: &ClockConfig, root: VertexId, horizons: &[f64], replicas: usize) -> Result<ExperimentReport> {
    check_horizons(horizons)?;
    let m = law
        .moments()
        .ok_or_else(|| Error::InvalidParameter("the L2 study needs an i.i.d. law".into()))?;
    let var = m.variance();
    let rows = par::try_replicate(replicas, |i| {
        let c = replica_clock(cfg, "l2", i);
        let l = replica_law(law, "l2", i);
        horizons
            .iter()
            .map(|&t| {
                let dual: RegionSad = dual_on_region(g, &c, t, root)?;
                let eta: f64 = dual
                    .region
                    .vertices()
                    .iter()
                    .zip(&dual.levels)
                    .map(|(&v, &xi)| xi * l.sample_at(v))
                    .sum();
                Ok(((eta - m.m1).powi(2), dual.max()))
            })
            .collect::<Result<Vec<(f64, f64)>>>()
    })?;

    let a_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x.0).collect()).collect();
    let y_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x.1).collect()).collect();
    let b_rows: Vec<Vec<f64>> = y_rows.iter().map(|r| r.iter().map(|y| var * y).collect()).collect();

    let mut a_pts = Vec::new();
    let mut b_pts = Vec::new();
    let mut y_pts = Vec::new();
    let mut verdicts = Vec::new();
    for (k, &t) in horizons.iter().enumerate() {
        let a = Estimate::from_samples(&column(&a_rows, k));
        let b = Estimate::from_samples(&column(&b_rows, k));
        a_pts.push(SeriesPoint::from_estimate(t, &a));
        b_pts.push(SeriesPoint::from_estimate(t, &b));
        y_pts.push(SeriesPoint::from_estimate(t, &Estimate::from_samples(&column(&y_rows, k))));

        let diff: Vec<f64> = (0..replicas).map(|i| a_rows[i][k] - b_rows[i][k]).collect();
        let d = Estimate::from_samples(&diff);
        verdicts.push(Verdict {
            name: format!("dominated_t={t}"),
            passed: d.mean <= 2.0 * d.stderr,
            gating: true,
            statistic: d.mean,
            tolerance: 2.0 * d.stderr,
            replicas,
            detail: json!({ "second_moment": a, "bound": b }),
        });
        if k > 0 {
            let step: Vec<f64> = (0..replicas).map(|i| a_rows[i][k] - a_rows[i][k - 1]).collect();
            let s = Estimate::from_samples(&step);
            verdicts.push(Verdict {
                name: format!("non_increasing_t={}..{t}", horizons[k - 1]),
                passed: s.mean <= 2.0 * s.stderr,
                gating: true,
                statistic: s.mean,
                tolerance: 2.0 * s.stderr,
                replicas,
                detail: json!({ "from": horizons[k - 1], "to": t }),
            });
        }
    }
    Ok(ExperimentReport::new(
        "l2",
        json!({ "law": law, "clock": cfg, "root": root, "horizons": horizons, "replicas": replicas }),
        vec![
            Series { name: "second_moment".into(), points: a_pts },
            Series { name: "bound".into(), points: b_pts },
            Series { name: "recipient_max".into(), points: y_pts },
        ],
        verdicts,
        json!({ "m1": m.m1, "m2": m.m2, "variance": var }),
    ))
}

/// Sender maxima `X_t(u)` and recipient maxima `Y_t(v)` over a grid.
///
/// Also checks, replica by replica, the a-priori cap
/// `Y_t(v) <= max(eps, max_{d(w, v) < 1/eps - 1} X_t(w))`: sources farther
/// away contribute at most `1/(d+1) <= eps`.
pub fn contribution_decay(
    g: &Graph,
    cfg: &ClockConfig,
    u: VertexId,
    v: VertexId,
    horizons: &[f64],
    replicas: usize,
    epsilon: f64,
) -> Result<ExperimentReport> {
    check_horizons(horizons)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be in (0, 1], got {epsilon}")));
    }
    let reach = (1.0 / epsilon - 1.0).ceil() as u64;
    let mut ball: Vec<VertexId> = g
        .ball(v, reach.saturating_sub(1))
        .into_iter()
        .filter(|&(_, d)| (d as f64) < 1.0 / epsilon - 1.0)
        .map(|(w, _)| w)
        .collect();
    ball.sort_unstable();

    struct Replica {
        x: Vec<f64>,
        y: Vec<f64>,
        cap: Vec<f64>,
    }
    let reps = par::try_replicate(replicas, |i| {
        let c = replica_clock(cfg, "decay", i);
        let x = forward_maxima(g, &c, u, horizons)?;
        let y = horizons
            .iter()
            .map(|&t| Ok(dual_on_region::<f64>(g, &c, t, v)?.max()))
            .collect::<Result<Vec<f64>>>()?;
        let mut cap = vec![epsilon; horizons.len()];
        for &w in &ball {
            let xw = forward_maxima(g, &c, w, horizons)?;
            for (c, x) in cap.iter_mut().zip(xw) {
                *c = c.max(x);
            }
        }
        Ok::<_, Error>(Replica { x, y, cap: cap.into_iter().map(|c| c.min(1.0)).collect() })
    })?;

    let n = horizons.len();
    let increases: usize = reps.iter().map(|r| r.x.windows(2).filter(|w| w[1] > w[0]).count()).sum();
    let cap_breaks: usize = reps
        .iter()
        .map(|r| r.y.iter().zip(&r.cap).filter(|(y, c)| **y > **c + 1e-12).count())
        .sum();
    let med_x: Vec<f64> = (0..n).map(|k| median(&reps.iter().map(|r| r.x[k]).collect::<Vec<_>>())).collect();
    let med_y: Vec<f64> = (0..n).map(|k| median(&reps.iter().map(|r| r.y[k]).collect::<Vec<_>>())).collect();
    let med_cap: Vec<f64> = (0..n).map(|k| median(&reps.iter().map(|r| r.cap[k]).collect::<Vec<_>>())).collect();
    let strictly_down = |m: &[f64]| m.windows(2).all(|w| w[1] < w[0]);
    let running_sup: Vec<f64> = (0..n)
        .map(|k| median(&reps.iter().map(|r| r.y[k..].iter().copied().fold(0.0, f64::max)).collect::<Vec<_>>()))
        .collect();

    let series_of = |name: &str, f: &dyn Fn(&Replica) -> &Vec<f64>| Series {
        name: name.into(),
        points: (0..n)
            .map(|k| {
                let e = Estimate::from_samples(&reps.iter().map(|r| f(r)[k]).collect::<Vec<_>>());
                SeriesPoint::from_estimate(horizons[k], &e)
            })
            .collect(),
    };
    let series = vec![series_of("sender_max", &|r| &r.x), series_of("recipient_max", &|r| &r.y), series_of("recipient_cap", &|r| &r.cap)];

    let verdicts = vec![
        Verdict {
            name: "sender_max_pathwise_non_increasing".into(),
            passed: increases == 0,
            gating: true,
            statistic: increases as f64,
            tolerance: 0.0,
            replicas,
            detail: json!({ "increases": increases }),
        },
        Verdict {
            name: "median_sender_max_decreasing".into(),
            passed: strictly_down(&med_x),
            gating: true,
            statistic: med_x.last().copied().unwrap_or(f64::NAN),
            tolerance: 0.0,
            replicas,
            detail: json!({ "medians": med_x }),
        },
        Verdict {
            name: "median_recipient_max_decreasing".into(),
            passed: strictly_down(&med_y),
            gating: true,
            statistic: med_y.last().copied().unwrap_or(f64::NAN),
            tolerance: 0.0,
            replicas,
            detail: json!({ "medians": med_y, "running_sup_medians": running_sup }),
        },
        Verdict {
            name: "recipient_cap_holds".into(),
            passed: cap_breaks == 0,
            gating: true,
            statistic: cap_breaks as f64,
            tolerance: 1e-12,
            replicas,
            detail: json!({ "epsilon": epsilon, "ball_size": ball.len(), "median_caps": med_cap }),
        },
    ];
    Ok(ExperimentReport::new(
        "decay",
        json!({ "clock": cfg, "u": u, "v": v, "horizons": horizons, "replicas": replicas, "epsilon": epsilon }),
        series,
        verdicts,
        Value::Null,
    ))
}

/// Samples of `xi_t(u, v)` and `xi_t(v, u)` from independent clocks,
/// compared with a two-sample KS test at level `alpha / pairs`.
#[allow(clippy::too_many_arguments)]
pub fn symmetry_test(
    g: &Graph,
    cfg: &ClockConfig,
    u: VertexId,
    v: VertexId,
    horizon: f64,
    replicas: usize,
    alpha: f64,
    pairs: usize,
) -> Result<ExperimentReport> {
    if u == v {
        return Err(Error::InvalidParameter("symmetry test needs two distinct vertices".into()));
    }
    check_horizons(&[horizon])?;
    let samples = par::try_replicate(replicas, |i| {
        let uv = dual_on_region::<f64>(g, &replica_clock(cfg, "sym-uv", i), horizon, v)?.get(u);
        let vu = dual_on_region::<f64>(g, &replica_clock(cfg, "sym-vu", i), horizon, u)?.get(v);
        Ok::<_, Error>((uv, vu))
    })?;
    let a: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let b: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let ks = ks_two_sample(&a, &b);
    let level = alpha / pairs.max(1) as f64;
    let (ea, eb) = (Estimate::from_samples(&a), Estimate::from_samples(&b));
    let se = (ea.stderr.powi(2) + eb.stderr.powi(2)).sqrt();
    let gap = (ea.mean - eb.mean).abs();
    let verdicts = vec![
        Verdict {
            name: "ks_equal_in_law".into(),
            passed: ks.p_value >= level,
            gating: true,
            statistic: ks.p_value,
            tolerance: level,
            replicas,
            detail: json!({ "ks": ks, "alpha": alpha, "pairs": pairs }),
        },
        Verdict {
            name: "means_agree".into(),
            passed: gap <= 2.0 * se || (gap == 0.0),
            gating: false,
            statistic: gap,
            tolerance: 2.0 * se,
            replicas,
            detail: json!({ "uv": ea, "vu": eb }),
        },
    ];
    Ok(ExperimentReport::new(
        "symmetry",
        json!({ "clock": cfg, "u": u, "v": v, "horizon": horizon, "replicas": replicas, "alpha": alpha, "pairs": pairs }),
        vec![
            Series { name: "xi_uv".into(), points: vec![SeriesPoint::from_estimate(horizon, &ea)] },
            Series { name: "xi_vu".into(), points: vec![SeriesPoint::from_estimate(horizon, &eb)] },
        ],
        verdicts,
        Value::Null,
    ))
}

/// Default step budget of [`finite_consensus`].
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;
/// Tolerance for the consensus value against the initial average.
pub const CONSENSUS_AVERAGE_TOLERANCE: f64 = 1e-9;

/// Runs the process on a finite graph until the spread falls below
/// `tolerance` or `budget` updates have been made.
///
/// Updates are generated as a single merged stream: exponential gaps of rate
/// `lambda |E|` and a uniformly chosen edge, which has the law of the
/// per-edge clocks without fixing a horizon in advance. The consensus value
/// is the final mean.
pub fn finite_consensus(g: &Graph, init: &[f64], cfg: &ClockConfig, tolerance: f64, budget: u64) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = g
        .as_finite()
        .ok_or_else(|| Error::InvalidParameter("consensus needs a finite graph".into()))?;
    if init.len() != f.vertex_count() {
        return Err(Error::InvalidParameter(format!("{} initial values for {} vertices", init.len(), f.vertex_count())));
    }
    let spread = |v: &[f64]| {
        let (hi, lo) = v.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(h, l), &x| (h.max(x), l.min(x)));
        hi - lo
    };
    let n = init.len() as f64;
    let average = init.iter().sum::<f64>() / n;
    let mut values = init.to_vec();
    let edges = f.local_edges();
    let rate = cfg.intensity * edges.len() as f64;
    let mut rng = seed::rng(seed::derive(cfg.seed, "consensus", 0));
    let (mut steps, mut time) = (0u64, 0.0);
    let check_every = edges.len().max(1) as u64;
    let mut current = spread(&values);
    while current >= tolerance && steps < budget && !edges.is_empty() {
        let gap: f64 = rng.sample(Exp1);
        time += gap / rate;
        let (a, b) = edges[rng.random_range(0..edges.len())];
        let mu = cfg.mu_law.sample(&mut rng);
        let (x, y) = mix_pair(&values[a as usize], &values[b as usize], &mu);
        values[a as usize] = x;
        values[b as usize] = y;
        steps += 1;
        if steps % check_every == 0 {
            current = spread(&values);
        }
    }
    current = spread(&values);
    let consensus = values.iter().sum::<f64>() / n;
    let converged = current < tolerance;
    let err = (consensus - average).abs();
    let verdicts = vec![
        Verdict {
            name: "spread_below_tolerance".into(),
            passed: converged,
            gating: true,
            statistic: current,
            tolerance,
            replicas: 1,
            detail: json!({ "steps": steps, "time": time, "budget": budget }),
        },
        Verdict {
            name: "consensus_equals_average".into(),
            passed: err <= CONSENSUS_AVERAGE_TOLERANCE,
            gating: true,
            statistic: err,
            tolerance: CONSENSUS_AVERAGE_TOLERANCE,
            replicas: 1,
            detail: json!({ "consensus": consensus, "initial_average": average }),
        },
    ];
    let mut report = ExperimentReport::new(
        "consensus",
        json!({ "clock": cfg, "tolerance": tolerance, "budget": budget }),
        Vec::new(),
        verdicts,
        json!({
            "final_spread": current,
            "consensus": consensus,
            "initial_average": average,
            "abs_error": err,
            "steps": steps,
            "time": time,
        }),
    );
    if !converged && steps >= budget && err <= CONSENSUS_AVERAGE_TOLERANCE {
        report.status = Status::Inconclusive;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GeneratorSpec;
    use crate::profile::LawKind;
    use crate::schedule::MuLaw;

    fn lattice() -> Graph {
        Graph::generate(&"lattice:d=2".parse().unwrap()).unwrap()
    }

    #[test]
    fn dirac_mean_is_exact() {
        let g = lattice();
        let law = InitialLaw::new(LawKind::Dirac { c: 3.0 }, 1).unwrap();
        let r = mean_preservation(&g, &law, &ClockConfig::default(), g.origin(), &[0.0, 1.0, 2.0], 100).unwrap();
        assert!(r.passed());
        for p in &r.series[0].points {
            assert_eq!(p.estimate, 3.0);
            assert_eq!(p.stderr, 0.0);
        }
    }

    #[test]
    fn l2_at_time_zero_is_the_variance_bound() {
        let g = lattice();
        let law = InitialLaw::new(LawKind::Gaussian { mean: 0.0, var: 1.0 }, 1).unwrap();
        let r = l2_convergence(&g, &law, &ClockConfig::default(), g.origin(), &[0.0], 200).unwrap();
        let b = &r.series("bound").unwrap().points[0];
        assert_eq!(b.estimate, 1.0);
        assert_eq!(b.stderr, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn decay_starts_at_one() {
        let g = lattice();
        let r = contribution_decay(&g, &ClockConfig::default(), g.origin(), g.origin(), &[0.0, 1.0, 2.0], 50, 0.25).unwrap();
        let x = &r.series("sender_max").unwrap().points[0];
        let y = &r.series("recipient_max").unwrap().points[0];
        assert_eq!((x.estimate, y.estimate), (1.0, 1.0));
        assert!(r.verdict("sender_max_pathwise_non_increasing").unwrap().passed);
        assert!(r.verdict("recipient_cap_holds").unwrap().passed);
    }

    #[test]
    fn symmetry_at_time_zero_is_degenerate() {
        let g = Graph::generate(&GeneratorSpec::Star { n: 6 }).unwrap();
        let (u, v) = (g.parse_vertex("center").unwrap(), g.parse_vertex("leaf0").unwrap());
        let r = symmetry_test(&g, &ClockConfig::default(), u, v, 0.0, 100, 0.01, 1).unwrap();
        assert_eq!(r.series("xi_uv").unwrap().points[0].estimate, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn consensus_small_cases() {
        let k2 = Graph::generate(&GeneratorSpec::Complete { n: 2 }).unwrap();
        let r = finite_consensus(&k2, &[0.0, 1.0], &ClockConfig::default(), 1e-6, 100).unwrap();
        assert_eq!(r.extra["steps"], 1);
        assert_eq!(r.extra["consensus"], 0.5);
        assert_eq!(r.status, Status::Pass);

        let one = Graph::generate(&GeneratorSpec::Path { n: 1 }).unwrap();
        let r = finite_consensus(&one, &[4.0], &ClockConfig::default(), 1e-6, 100).unwrap();
        assert_eq!(r.extra["steps"], 0);
        assert_eq!(r.extra["consensus"], 4.0);

        let c = Graph::generate(&GeneratorSpec::Cycle { n: 30 }).unwrap();
        let cfg = ClockConfig::new(1.0, MuLaw::Half, 1);
        let init: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let r = finite_consensus(&c, &init, &cfg, 1e-6, 10).unwrap();
        assert_eq!(r.status, Status::Inconclusive);
    }

    #[test]
    fn csv_series_output() {
        let g = lattice();
        let law = InitialLaw::new(LawKind::Dirac { c: 1.0 }, 1).unwrap();
        let r = mean_preservation(&g, &law, &ClockConfig::default(), g.origin(), &[1.0], 100).unwrap();
        let mut buf = Vec::new();
        r.write_series_csv("mean", &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,estimate,stderr,n\n1,1,0,100\n");
    }
}
