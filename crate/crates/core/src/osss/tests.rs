use super::algorithm::*;
use super::bounds::*;
use super::exact::*;
use super::mc::*;
use super::*;
use crate::exact::ExactEngine;
use crate::lattice::event::*;
use crate::lattice::{Configuration, LatticeGraph};
use crate::stats::Verdict;

fn line(m: usize) -> LatticeGraph {
    LatticeGraph::rectangle(&[0], &[m as i64], 1000).unwrap()
}

fn box1() -> LatticeGraph {
    LatticeGraph::new(2, 1).unwrap()
}

#[test]
fn stopping_examples() {
    let g = line(5);
    let cfg = Configuration::from_mask(5, 0b10101);
    let t = run_algorithm(&sequential(5), &g, &EdgeOpen(0), &cfg).unwrap();
    assert_eq!(t.revealed, vec![0]);
    assert!(t.value);
    let t = run_algorithm(&reverse(5), &g, &EdgeOpen(0), &cfg).unwrap();
    assert_eq!(t.revealed.len(), 5);
    let t = run_algorithm(&sequential(5), &g, &Constant(true), &cfg).unwrap();
    assert!(t.revealed.is_empty() && t.value);
}

#[test]
fn invalid_rules_are_rejected() {
    let g = line(3);
    let cfg = Configuration::closed(3);
    let repeat = FixedOrder { label: "repeat".into(), order: vec![0, 0, 1], stop: StopRule::Determined };
    assert!(run_algorithm(&repeat, &g, &Cylinders(vec![vec![0, 1, 2]]), &Configuration::open(3)).is_err());
    let outside = FixedOrder { label: "outside".into(), order: vec![7], stop: StopRule::Determined };
    assert!(run_algorithm(&outside, &g, &EdgeOpen(0), &cfg).is_err());
    let short = FixedOrder { label: "short".into(), order: vec![1], stop: StopRule::Determined };
    assert!(run_algorithm(&short, &g, &EdgeOpen(0), &cfg).is_err());
}

#[test]
fn exact_revealment_examples() {
    let g = line(4);
    let ex = ExactEngine::new(&g).unwrap();
    let all = revealment_exact(&ex, &reveal_all(4), &EdgeOpen(2), 0.3).unwrap();
    assert!(all.iter().all(|d| (d - 1.0).abs() < 1e-12));
    let dict = revealment_exact(&ex, &dictator_first(4, 2), &EdgeOpen(2), 0.3).unwrap();
    assert_eq!(dict.iter().map(|d| (d * 1e12).round() / 1e12).collect::<Vec<_>>(), vec![0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn influence_examples() {
    let g = line(3);
    let ex = ExactEngine::new(&g).unwrap();
    let inf = influence_exact(&ex, &EdgeOpen(0), 0.5);
    assert!((inf[0] - 0.5).abs() < 1e-15 && inf[1] == 0.0 && inf[2] == 0.0);
    let inf = influence_exact(&ex, &Parity(vec![0, 1]), 0.5);
    assert!((inf[0] - 0.5).abs() < 1e-15 && (inf[1] - 0.5).abs() < 1e-15);
    let p = 0.3;
    let res = influence_exact(&ex, &EdgeOpen(1), p);
    let flip = flip_influence_exact(&ex, &EdgeOpen(1), p);
    assert!((res[1] - 2.0 * p * (1.0 - p) * flip[1]).abs() < 1e-15);
}

#[test]
fn osss_dictator_and_constant() {
    let g = line(3);
    let ex = ExactEngine::new(&g).unwrap();
    let r = verify_osss_exact(&ex, &dictator_first(3, 0), &EdgeOpen(0), 0.5).unwrap();
    assert!((r.variance - 0.25).abs() < 1e-15);
    assert!((r.slack_v1 - 0.25).abs() < 1e-15);
    assert!((r.slack_v2.unwrap() - 0.25).abs() < 1e-15);
    let r = verify_osss_exact(&ex, &sequential(3), &Constant(false), 0.5).unwrap();
    assert_eq!(r.variance, 0.0);
    assert!(r.slack_v1 >= 0.0 && r.verdict == Verdict::Pass);
    let r = verify_osss_exact(&ex, &sequential(3), &Parity(vec![0, 2]), 0.4).unwrap();
    assert!(r.slack_v2.is_none() && r.verdict == Verdict::Pass);
}

#[test]
fn osss_on_the_unit_box() {
    let g = box1();
    let ex = ExactEngine::new(&g).unwrap();
    let f = OriginToSphere { k: 1 };
    let t1 = SphereExploration::new(&g, 1).unwrap();
    for p in [0.3, 0.5, 0.7] {
        for alg in [&t1 as &dyn QueryAlgorithm, &sequential(12)] {
            let r = verify_osss_exact(&ex, alg, &f, p).unwrap();
            assert!(r.slack_v1 >= -OSSS_TOLERANCE && r.slack_v2.unwrap() >= -OSSS_TOLERANCE);
            assert!(r.revealment.iter().chain(&r.influence).all(|x| (-1e-15..=1.0 + 1e-15).contains(x)));
        }
    }
}

#[test]
fn traces_are_determined() {
    let g = box1();
    let ex = ExactEngine::new(&g).unwrap();
    let f = OriginToSphere { k: 1 };
    check_determination(&ex, &SphereExploration::new(&g, 1).unwrap(), &f).unwrap();
    check_determination(&ex, &sequential(12), &f).unwrap();
    check_determination(&ex, &reverse(12), &f).unwrap();
    check_determination(&ex, &sequential(12), &Parity(vec![3, 7])).unwrap();
    let g2 = LatticeGraph::new(1, 4).unwrap();
    let ex2 = ExactEngine::new(&g2).unwrap();
    for k in 0..=4 {
        check_determination(&ex2, &SphereExploration::new(&g2, k).unwrap(), &OriginToSphere { k: 4 }).unwrap();
    }
}

#[test]
fn sphere_exploration_examples() {
    let g = LatticeGraph::new(2, 2).unwrap();
    assert!(SphereExploration::new(&g, 3).is_err());
    let f = OriginToSphere { k: 2 };
    let closed = Configuration::closed(g.edge_count());
    for k in 1..=2 {
        let alg = SphereExploration::new(&g, k).unwrap().exhaustive();
        let t = run_algorithm(&alg, &g, &f, &closed).unwrap();
        let mut got = t.revealed.clone();
        got.sort_unstable();
        let expected: Vec<usize> = (0..g.edge_count())
            .filter(|&e| {
                let (a, b) = g.endpoints(e);
                g.sup_norm(a) == k || g.sup_norm(b) == k
            })
            .collect();
        assert_eq!(got, expected);
        assert!(!t.value);
    }
    let g = box1();
    let alg = SphereExploration::new(&g, 1).unwrap();
    let t = run_algorithm(&alg, &g, &OriginToSphere { k: 1 }, &Configuration::open(12)).unwrap();
    assert!(t.value);
    assert!(t.revealed.len() < 12);
    let o = g.origin().unwrap();
    let last = *t.revealed.last().unwrap();
    assert!(g.incident(o).contains(&(last as u32)));
}

#[test]
fn exact_and_mc_revealments_agree() {
    let g = box1();
    let ex = ExactEngine::new(&g).unwrap();
    let f = OriginToSphere { k: 1 };
    let alg = SphereExploration::new(&g, 1).unwrap();
    let exact = revealment_exact(&ex, &alg, &f, 0.5).unwrap();
    let mc = revealment_mc(&g, &alg, &f, 0.5, 100_000, 3).unwrap();
    for (a, b) in exact.iter().zip(&mc) {
        assert!((a - b.value).abs() <= 4.0 * b.stderr.max(1e-9), "{a} vs {}", b.value);
    }
    let r = verify_osss_mc(&g, &alg, &f, 0.5, 100_000, 4).unwrap();
    let inf = influence_exact(&ex, &f, 0.5);
    let cov = covariance_exact(&ex, &f, 0.5);
    for e in 0..12 {
        assert!((inf[e] - r.influence[e].value).abs() <= 4.0 * r.influence[e].stderr.max(1e-9));
        assert!((cov[e] - r.covariance[e].value).abs() <= 4.0 * r.covariance[e].stderr.max(1e-9));
    }
    assert_ne!(r.verdict, Verdict::Fail);
}

#[test]
fn revealment_sum_bound_exact() {
    for p in [0.0, 0.3, 0.5, 0.7, 1.0] {
        let b = revealment_sum_bound_check(2, 1, p, Mode::Exact).unwrap();
        assert!(b.max_ratio <= 1.0 + RATIO_TOLERANCE, "p={p}");
        assert_eq!(b.verdict, Verdict::Pass);
    }
    let b = revealment_sum_bound_check(1, 6, 0.6, Mode::Exact).unwrap();
    assert_eq!(b.verdict, Verdict::Pass);
    let b0 = revealment_sum_bound_check(1, 5, 0.0, Mode::Exact).unwrap();
    assert!((b0.partial_sum.value - 1.0).abs() < 1e-15);
    for (k, row) in b0.revealments.iter().enumerate() {
        let k = k + 1;
        let g = LatticeGraph::new(1, 5).unwrap();
        for (e, d) in row.iter().enumerate() {
            let (a, c) = g.endpoints(e);
            let touches = g.sup_norm(a) == k || g.sup_norm(c) == k;
            if !touches {
                assert_eq!(d.value, 0.0);
            }
        }
    }
}

#[test]
fn revealment_sum_bound_mc() {
    let b = revealment_sum_bound_check(2, 4, 0.5, Mode::MonteCarlo { replicas: 10_000, seed: 12 }).unwrap();
    assert_ne!(b.verdict, Verdict::Fail);
}

#[test]
fn locality_holds_exactly() {
    for (g, p) in [(box1(), 0.5), (LatticeGraph::new(1, 4).unwrap(), 0.35)] {
        for (_, _, delta, bound) in locality_check_exact(&g, p).unwrap() {
            assert!(delta <= bound + 1e-12);
        }
    }
}

#[test]
fn differential_check_examples() {
    let r = osss_differential_check_exact(2, 1, 0.5).unwrap();
    assert!((r.lhs.value - 15.0 / 256.0).abs() < 1e-15);
    assert!((r.rhs.value - 1.0).abs() < 1e-12);
    assert_eq!(r.verdict, Verdict::Pass);
    let r = osss_differential_check(2, 8, 0.45, 0.01, 100_000, 21).unwrap();
    assert_ne!(r.verdict, Verdict::Fail);
    let r = osss_differential_check(2, 4, 0.01, 0.01, 2_000, 1).unwrap();
    assert!(r.lhs.value < 0.2 && r.rhs.value < 0.2);
    assert!(osss_differential_check(2, 4, 0.995, 0.01, 10, 1).is_err());
}
