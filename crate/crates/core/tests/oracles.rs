//! Checks against values computed independently of the engines: hand
//! evaluations, and Monte Carlo estimates against closed-form laws.

use averaging::diagnostics::{max_sad_level, PotentialFunction};
use averaging::engine::{mix_pair, run, run_finite};
use averaging::experiments::{l2_convergence, symmetry_test};
use averaging::sad::{dual_contributions, run_sad};
use averaging::{
    reverse, sample_finite, seed, ClockConfig, Edge, Graph, InitialLaw, LawKind, MuLaw, Profile, UpdateSequence, VertexId,
};

fn g(spec: &str) -> Graph {
    Graph::generate(&spec.parse().unwrap()).unwrap()
}

fn v(i: u64) -> VertexId {
    VertexId(i)
}

fn e(a: u64, b: u64) -> Edge {
    Edge::new(v(a), v(b)).unwrap()
}

#[test]
fn single_updates_by_hand() {
    assert_eq!(mix_pair(&1.0, &0.0, &0.5), (0.5, 0.5));
    assert_eq!(mix_pair(&4.0, &2.0, &0.25), (3.5, 2.5));
    assert_eq!(mix_pair(&7.0, &7.0, &0.3), (7.0, 7.0));
}

#[test]
fn path_of_three_by_hand() {
    let p = g("path:n=3");
    let seq = UpdateSequence::discrete(&[(e(0, 1), 0.5), (e(1, 2), 0.5)]).unwrap();
    let f = p.as_finite().unwrap();
    assert_eq!(run_finite(f, &[1.0, 0.0, 0.0], &seq).unwrap(), vec![0.5, 0.25, 0.25]);

    let sad = run_sad::<f64>(&p, v(0), &seq).unwrap();
    assert_eq!([sad.get(v(0)), sad.get(v(1)), sad.get(v(2))], [0.5, 0.25, 0.25]);

    let mut init = Profile::<f64>::zero();
    init.set(v(0), 1.0);
    let out = run(&p, &init, &seq).unwrap();
    assert_eq!(out.get(v(2)), 0.25);
}

#[test]
fn one_step_dual_weights() {
    let p = g("path:n=2");
    let seq = UpdateSequence::discrete(&[(e(0, 1), 0.3)]).unwrap();
    let d = dual_contributions::<f64>(&p, v(0), &seq).unwrap();
    assert_eq!(d.get(v(0)), 0.7);
    assert_eq!(d.get(v(1)), 0.3);
    let empty = dual_contributions::<f64>(&p, v(1), &UpdateSequence::discrete(&[]).unwrap()).unwrap();
    assert_eq!(empty.get(v(1)), 1.0);
    assert_eq!(empty.support_len(), 1);
}

#[test]
fn reversal_example() {
    let steps = vec![
        averaging::UpdateStep { edge: e(0, 1), mu: 0.5, time: 1.0 },
        averaging::UpdateStep { edge: e(1, 2), mu: 0.3, time: 2.0 },
    ];
    let r = reverse(&UpdateSequence::from_steps(steps, 3.0).unwrap());
    assert_eq!((r.steps[0].edge, r.steps[0].mu, r.steps[0].time), (e(1, 2), 0.3, 1.0));
    assert_eq!((r.steps[1].edge, r.steps[1].mu, r.steps[1].time), (e(0, 1), 0.5, 2.0));
}

#[test]
fn potential_by_hand() {
    let p = g("path:n=3");
    let f = PotentialFunction::new(&p, v(0));
    assert_eq!(f.potential(&[]).unwrap(), 1.0);
    assert_eq!(f.potential(&[v(0)]).unwrap(), 0.0);
    assert!((f.potential(&[v(1), v(2)]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn one_update_optimum_is_a_half() {
    let p = g("path:n=2");
    assert_eq!(max_sad_level(&p, v(0), v(1), 1, averaging::diagnostics::MuMode::FixedHalf).unwrap(), 0.5);
    assert_eq!(max_sad_level(&p, v(0), v(1), 0, averaging::diagnostics::MuMode::FixedHalf).unwrap(), 0.0);
}

#[test]
fn step_count_is_poisson() {
    // Cycle(10), lambda 1, t = 5: N ~ Poisson(50).
    let c = g("cycle:n=10");
    let n = 1000;
    let counts: Vec<f64> = (0..n)
        .map(|i| {
            let cfg = ClockConfig::new(1.0, MuLaw::Half, seed::derive(17, "poisson", i));
            sample_finite(&c, &cfg, 5.0).unwrap().len() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / n as f64;
    let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - 50.0).abs() <= 3.0 * (50.0f64 / n as f64).sqrt(), "mean {mean}");
    // Var of the sample variance of Poisson(50) is about (50 + 2 * 50^2) / n.
    assert!((var - 50.0).abs() <= 4.0 * ((50.0 + 2.0 * 2500.0) / n as f64).sqrt(), "var {var}");
}

#[test]
fn first_event_is_exponential() {
    let p = g("path:n=2");
    let n = 4000;
    let lambda = 2.0;
    let firsts: Vec<f64> = (0..n)
        .map(|i| {
            let cfg = ClockConfig::new(lambda, MuLaw::Half, seed::derive(23, "first", i));
            sample_finite(&p, &cfg, 50.0).unwrap().steps[0].time
        })
        .collect();
    let mean = firsts.iter().sum::<f64>() / n as f64;
    assert!((mean - 1.0 / lambda).abs() <= 3.0 * (1.0 / lambda) / (n as f64).sqrt(), "mean {mean}");
    // P(T > 1/lambda) = e^{-1}.
    let tail = firsts.iter().filter(|&&t| t > 1.0 / lambda).count() as f64 / n as f64;
    let p0 = (-1.0f64).exp();
    assert!((tail - p0).abs() <= 3.0 * (p0 * (1.0 - p0) / n as f64).sqrt(), "tail {tail}");
}

#[test]
fn complete_graph_second_moment_tends_to_variance_of_mean() {
    // On K10 the values reach the sample mean of ten N(0,1) draws, whose
    // variance is 1/10.
    let k = g("complete:n=10");
    let law = InitialLaw::new(LawKind::Gaussian { mean: 0.0, var: 1.0 }, 5).unwrap();
    let cfg = ClockConfig::new(1.0, MuLaw::Half, 5);
    let r = l2_convergence(&k, &law, &cfg, v(0), &[0.0, 25.0], 2000).unwrap();
    let s = r.series("second_moment").unwrap();
    let (start, end) = (s.points[0], s.points[1]);
    assert!((start.estimate - 1.0).abs() <= 3.0 * start.stderr, "{start:?}");
    assert!((end.estimate - 0.1).abs() <= 3.0 * end.stderr, "{end:?}");
}

#[test]
fn transitive_graph_means_agree() {
    let z2 = g("lattice:d=2");
    let cfg = ClockConfig::new(1.0, MuLaw::Half, 3);
    let u = z2.origin();
    let w = z2.parse_vertex("1,1").unwrap();
    let r = symmetry_test(&z2, &cfg, u, w, 2.0, 1000, 0.01, 1).unwrap();
    assert!(r.passed());
    assert!(r.verdict("means_agree").unwrap().passed);
}
