use super::*;
use crate::ppp::{sample_marked, MarkedSample, RadiusLaw, Window};
use crate::rng::stream;
use crate::stats::Verdict;
use proptest::prelude::*;
use std::f64::consts::PI;

fn two_balls(gap_center: f64) -> MarkedSample {
    MarkedSample::from_balls(2, &[(vec![0.0, 0.0], 1.0), (vec![gap_center, 0.0], 1.0)])
}

#[test]
fn overlapping_and_separate_pairs() {
    assert_eq!(BallGraph::build(&two_balls(1.5)).component_count(), 1);
    assert_eq!(BallGraph::build(&two_balls(3.0)).component_count(), 2);
    assert_eq!(BallGraph::build(&MarkedSample::from_balls(2, &[])).component_count(), 0);
}

#[test]
fn hashed_graph_matches_brute_force() {
    for seed in 0..20u64 {
        let nu = match seed % 3 {
            0 => RadiusLaw::Uniform(0.2, 1.5),
            1 => RadiusLaw::Pareto { alpha: 2.5, r_min: 0.3 },
            _ => RadiusLaw::Pareto { alpha: 0.9, r_min: 0.05 },
        };
        let m = sample_marked(2.0, nu, &Window::cube(&[0.0, 0.0], &[10.0, 10.0]), &mut stream(seed, 1, 0)).unwrap();
        assert!(m.len() > 100);
        assert_eq!(BallGraph::build(&m).edges(), brute_force_edges(&m));
    }
    let m = sample_marked(60.0, RadiusLaw::Uniform(0.1, 0.4), &Window::centered_ball(3, 2.0), &mut stream(3, 2, 0)).unwrap();
    assert_eq!(BallGraph::build(&m).edges(), brute_force_edges(&m));
}

#[test]
fn connection_conventions() {
    let s = two_balls(1.5);
    let far = Region::point(&[10.0, 10.0]);
    assert!(!connects(&s, &Region::point(&[5.0, 5.0]), &far, None));
    assert!(connects(&s, &far, &far, None));
    assert!(connects(&s, &Region::origin(2), &Region::centered_sphere(2, 2.5), None));
    assert!(!connects(&s, &Region::origin(2), &Region::centered_sphere(2, 2.6), None));
}

#[test]
fn induced_process_is_not_clipping() {
    let s = two_balls(1.5);
    let zone = Window::centered_ball(2, 2.0);
    let target = Region::point(&[1.5, 0.0]);
    assert!(connects(&s, &Region::origin(2), &target, None));
    // The second ball reaches distance 2.5, so it is not inside the zone,
    // even though the segment from 0 to (1.5, 0) lies in the clipped set.
    assert!(!connects(&s, &Region::origin(2), &target, Some(&zone)));
}

#[test]
fn moment_gates() {
    assert!(moment_check(&RadiusLaw::Fixed(3.0), 40.0));
    let p = RadiusLaw::Pareto { alpha: 2.5, r_min: 1.0 };
    assert!(moment_check(&p, 2.0));
    assert!(!moment_check(&p, 8.0));
    assert!(!moment_check(&RadiusLaw::Pareto { alpha: 1.5, r_min: 1.0 }, 2.0));
    let heavy = BooleanModel::new(2, 1.0, RadiusLaw::Pareto { alpha: 1.5, r_min: 1.0 }).unwrap();
    assert!(matches!(
        estimate_theta_r(&heavy, 1.0, 10, &TruncationPolicy::default(), 0),
        Err(crate::Error::InfiniteMoment(_))
    ));
}

#[test]
fn padding_meets_its_target() {
    let m = BooleanModel::new(2, 1.0, RadiusLaw::Pareto { alpha: 6.0, r_min: 0.5 }).unwrap();
    let pol = TruncationPolicy::default();
    let p = pol.padding(&m, 3.0).unwrap();
    assert!(p.error <= pol.eps && p.error > 0.5 * pol.eps, "{p:?}");
    assert!(missed_balls(&m, 3.0, p.padding * 0.9).unwrap() > pol.eps);
    let fixed = BooleanModel::new(2, 1.0, RadiusLaw::Fixed(1.0)).unwrap();
    assert_eq!(pol.padding(&fixed, 3.0).unwrap(), Padding { padding: 1.0, error: 0.0 });
}

#[test]
fn missed_balls_by_monte_carlo() {
    // Balls centered in the shell B(0, r + 2 pad) minus B(0, r + pad) that reach B(0, r).
    let m = BooleanModel::new(2, 3.0, RadiusLaw::Pareto { alpha: 3.0, r_min: 0.5 }).unwrap();
    let (r, pad) = (1.0, 1.0);
    let closed = missed_balls(&m, r, pad).unwrap();
    let outer = 60.0;
    let runs = 4000;
    let mut total = 0usize;
    for i in 0..runs {
        let s = m.sample_ball(outer, &mut stream(9, 3, i)).unwrap();
        total += (0..s.len())
            .filter(|&j| {
                let t = crate::ppp::norm(s.center(j));
                t > r + pad && t - s.radii[j] <= r
            })
            .count();
    }
    let mean = total as f64 / runs as f64;
    // Centers beyond the outer window are ignored; their contribution is tiny.
    let beyond = missed_balls(&m, r, outer - r).unwrap();
    assert!((mean - (closed - beyond)).abs() < 4.0 * (closed / runs as f64).sqrt(), "{mean} {closed}");
}

#[test]
fn zero_intensity_gives_zero_probabilities() {
    let m = BooleanModel::new(2, 0.0, RadiusLaw::Fixed(1.0)).unwrap();
    let pol = TruncationPolicy::default();
    assert_eq!(estimate_theta_r(&m, 2.0, 100, &pol, 1).unwrap().estimate.value, 0.0);
    assert_eq!(estimate_annulus(&m, 2.0, 100, &pol, 1).unwrap().estimate.value, 0.0);
    let v = vacancy_probability(&m, 100, &pol, 1).unwrap();
    assert_eq!(v.closed_form, 1.0);
    assert_eq!(v.mc.value, 1.0);
}

#[test]
fn vacancy_closed_forms() {
    let pol = TruncationPolicy::default();
    let fixed = BooleanModel::new(2, 1.0, RadiusLaw::Fixed(1.0)).unwrap();
    let v = vacancy_probability(&fixed, 50_000, &pol, 4).unwrap();
    assert!((v.closed_form - 0.043214).abs() < 1e-6);
    assert_eq!(v.verdict, Verdict::Pass, "{v:?}");
    let uni = BooleanModel::new(2, 1.0, RadiusLaw::Uniform(0.5, 1.5)).unwrap();
    let v = vacancy_probability(&uni, 50_000, &pol, 5).unwrap();
    assert!((v.closed_form - (-PI * 13.0 / 12.0).exp()).abs() < 1e-12);
    assert_eq!(v.verdict, Verdict::Pass, "{v:?}");
}

#[test]
fn theta_is_monotone_in_lambda_and_large_when_dense() {
    let pol = TruncationPolicy::default();
    let low = BooleanModel::new(2, 0.3, RadiusLaw::Fixed(1.0)).unwrap();
    let high = low.with_lambda(4.0);
    let a = estimate_theta_r(&low, 3.0, 4000, &pol, 8).unwrap().estimate;
    let b = estimate_theta_r(&high, 3.0, 4000, &pol, 8).unwrap().estimate;
    assert!(a.value < b.value);
    assert!(b.value > 0.9, "{b:?}");
}

#[test]
fn scaling_invariance() {
    let pol = TruncationPolicy::default();
    let base = BooleanModel::new(2, 0.8, RadiusLaw::Fixed(1.0)).unwrap();
    let scaled = BooleanModel::new(2, 0.2, RadiusLaw::Fixed(2.0)).unwrap();
    let a = estimate_annulus(&base, 2.0, 20_000, &pol, 1).unwrap().estimate;
    let b = estimate_annulus(&scaled, 4.0, 20_000, &pol, 2).unwrap().estimate;
    let sigma = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.value - b.value).abs() <= 4.0 * sigma, "{a:?} {b:?}");
}

#[test]
fn truncation_doubling_is_harmless() {
    let m = BooleanModel::new(2, 1.0, RadiusLaw::Pareto { alpha: 6.0, r_min: 0.5 }).unwrap();
    let c = truncation_check(&m, 2.0, 5_000, &TruncationPolicy::default(), 6).unwrap();
    assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
}

#[test]
fn star_pair_chain() {
    assert!(StarPair::new(2, 4.0, 5.0).is_ok());
    assert!(StarPair::new(2, 3.0, 5.0).is_err());
    assert!(StarPair::new(2, 4.0, 6.5).is_err());
}

#[test]
fn insertion_tolerance_matches_its_closed_form() {
    let star = StarPair::new(2, 4.0, 5.0).unwrap();
    let m = BooleanModel::new(2, 1.0, RadiusLaw::Fixed(4.6)).unwrap();
    let rep = insertion_tolerance(&m, &star, &[0, 0], 100_000, 2).unwrap();
    assert!((rep.mass - PI * 0.16 / 4.0).abs() < 1e-12);
    assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
    let zero = insertion_tolerance(&m.with_lambda(0.0), &star, &[0, 0], 100, 2).unwrap();
    assert_eq!(zero.mc.value, 0.0);
    assert_eq!(zero.closed_form, 0.0);
    let none = insertion_tolerance(&m.with_lambda(1.0), &StarPair::new(2, 4.0, 4.5).unwrap(), &[0, 0], 100, 2).unwrap();
    assert!(none.warning.is_some());
}

#[test]
fn admissible_mass_quadrature_agrees_with_closed_form() {
    let star = StarPair::new(2, 4.0, 5.0).unwrap();
    // A narrow uniform law around 4.6 behaves like the fixed law.
    let narrow = admissible_mass(&star, &RadiusLaw::Uniform(4.5999, 4.6001));
    let fixed = admissible_mass(&star, &RadiusLaw::Fixed(4.6));
    assert!((narrow - fixed).abs() < 1e-3, "{narrow} {fixed}");
    let uni = BooleanModel::new(2, 2.0, RadiusLaw::Uniform(4.2, 4.8)).unwrap();
    let rep = insertion_tolerance(&uni, &star, &[3, -1], 100_000, 5).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
}

#[test]
fn p_x_n_on_hand_built_samples() {
    let x = [3.0, 0.0];
    assert!(!event_p_x_n(&MarkedSample::from_balls(2, &[]), &x, 1.0, 5.0));
    // Chain from the origin through B(x, 1) to S_5: the origin reaches S_5.
    let chain = MarkedSample::from_balls(2, &[(vec![0.0, 0.0], 1.0), (vec![1.8, 0.0], 1.0), (vec![3.6, 0.0], 1.0), (vec![5.0, 0.0], 0.8)]);
    assert!(!event_p_x_n(&chain, &x, 1.0, 5.0));
    // Two arcs meeting B(x, 1) from each side without touching each other.
    let split = MarkedSample::from_balls(
        2,
        &[(vec![0.0, 0.0], 1.0), (vec![1.6, 0.0], 0.8), (vec![3.0, 1.8], 0.85), (vec![3.0, 3.3], 0.9), (vec![3.0, 4.8], 0.9)],
    );
    assert!(event_p_x_n(&split, &x, 1.0, 5.0));
    // Breaking the first arc kills the first clause.
    let broken = split.filter(|i| i != 1);
    assert!(!event_p_x_n(&broken, &x, 1.0, 5.0));
}

#[test]
fn p_x_n_when_the_ball_meets_the_sphere() {
    let s = MarkedSample::from_balls(2, &[(vec![0.0, 0.0], 1.0), (vec![1.7, 0.0], 0.8)]);
    assert!(event_p_x_n(&s, &[4.5, 0.0], 2.0, 5.0));
}

#[test]
fn continuum_russo_for_coverage() {
    let pol = TruncationPolicy::default();
    for lambda in [0.5, 1.0] {
        let m = BooleanModel::new(2, lambda, RadiusLaw::Fixed(1.0)).unwrap();
        let r = verify_russo_continuum(&m, ContinuumEvent::OriginCovered, 0.05, 40_000, &pol, 3).unwrap();
        let closed = PI * (-lambda * PI).exp();
        assert!((r.closed_form.unwrap() - closed).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }
}

#[test]
fn continuum_russo_for_a_connection_event() {
    let m = BooleanModel::new(2, 1.0, RadiusLaw::Fixed(1.0)).unwrap();
    let r = verify_russo_continuum(&m, ContinuumEvent::OriginToSphere(2.0), 0.05, 20_000, &TruncationPolicy::default(), 4)
        .unwrap();
    assert_ne!(r.verdict, Verdict::Fail, "{r:?}");
}

#[test]
fn empty_sample_exploration_sweeps_cells_near_the_sphere() {
    let alg = ContinuumExploration::new(2, 1.5, 3.0, 3).unwrap();
    let trace = alg.run(&MarkedSample::from_balls(2, &[]));
    let expected: std::collections::BTreeSet<(usize, i64)> = (0..alg.sites.len())
        .flat_map(|s| (0..=3).map(move |n| (s, n)))
        .filter(|&(s, n)| trace.final_distance[s] < (n + 1) as f64)
        .collect();
    assert_eq!(trace.revealed(), expected);
    assert!(trace.component.is_empty());
    assert!(ContinuumExploration::new(2, 4.0, 3.0, 3).is_err());
}

#[test]
fn exploration_fixpoint_matches_stepwise_run() {
    let m = BooleanModel::new(2, 0.6, RadiusLaw::Uniform(0.3, 1.6)).unwrap();
    let alg = ContinuumExploration::new(2, 1.0, 3.0, 3).unwrap();
    for i in 0..15 {
        let s = m.sample_ball(6.0, &mut stream(2, 7, i)).unwrap();
        let trace = alg.run(&s);
        let (dist, comp) = alg.revealed_fixpoint(&s);
        assert_eq!(trace.component, comp);
        let from_dist: std::collections::BTreeSet<(usize, i64)> = (0..alg.sites.len())
            .flat_map(|s| (0..=3).map(move |n| (s, n)))
            .filter(|&(s, n)| dist[s] < (n + 1) as f64)
            .collect();
        assert_eq!(trace.revealed(), from_dist);
    }
}

#[test]
fn continuum_revealments_respect_their_bound() {
    let m = BooleanModel::new(2, 0.5, RadiusLaw::Fixed(1.0)).unwrap();
    let alg = ContinuumExploration::new(2, 2.0, 4.0, 4).unwrap();
    let cells = continuum_revealment(&m, &alg, 1, 1500, &TruncationPolicy::default(), 1).unwrap();
    assert!(cells.iter().all(|c| c.revealment.value <= 1.0 && c.bound.value <= 1.0));
    let fails: Vec<_> = cells.iter().filter(|c| c.verdict == Verdict::Fail).collect();
    assert!(fails.is_empty(), "{fails:?}");
}

#[test]
fn integrated_connection_bound() {
    let m = BooleanModel::new(2, 0.8, RadiusLaw::Fixed(1.0)).unwrap();
    let ys = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![4.0, 3.0], vec![7.0, 0.0]];
    let rows = integrated_connection_check(&m, 8.0, &ys, 2000, &TruncationPolicy::default(), 3).unwrap();
    for r in &rows {
        assert_ne!(r.verdict, Verdict::Fail, "{r:?}");
    }
    // At y = 0 the integral is Sigma_r itself.
    assert!((rows[0].integral.value * 2.0 - rows[0].twice_sum.value).abs() < 1e-12);
}

#[test]
fn discretization_recovers_components() {
    let m = BooleanModel::new(2, 0.5, RadiusLaw::Uniform(0.3, 1.0)).unwrap();
    let mut checked = 0;
    for i in 0..40 {
        let s = m.sample_ball(3.0, &mut stream(4, 0, i)).unwrap();
        let ladder: Vec<DiscreteReport> = [0.2, 0.1, 0.05].iter().map(|&e| discretize(&s, e)).collect();
        for rep in &ladder {
            if rep.certified {
                assert!(rep.agrees, "certified grid must agree at eps = {}", rep.eps);
            }
            // Grid merging only ever joins exact components.
            assert!(rep.grid_components <= rep.exact_components);
        }
        if ladder[0].min_disjoint_gap > 0.05 * 5f64.sqrt() {
            assert_eq!(ladder[2].grid_components, ladder[2].exact_components);
            checked += 1;
        }
    }
    assert!(checked >= 5, "{checked}");
    assert_eq!(discretize(&two_balls(1.9), 0.01).grid_components, 1);
    assert_eq!(discretize(&two_balls(2.1), 0.01).grid_components, 2);
}

#[test]
fn exact_tangency_is_not_observed() {
    let m = BooleanModel::new(2, 1.0, RadiusLaw::Uniform(0.5, 1.5)).unwrap();
    let total: usize = (0..10_000).map(|i| exact_tangencies(&m.sample_ball(3.0, &mut stream(1, 5, i)).unwrap())).sum();
    assert_eq!(total, 0);
}

#[test]
fn scan_is_monotone_and_finds_a_split() {
    let rep = lambda_scan(2, RadiusLaw::Fixed(1.0), &[1.0, 2.0, 4.0], &[0.05, 0.1, 1.5], 1500, &TruncationPolicy::default(), 2)
        .unwrap();
    for stat in ["theta_r", "annulus"] {
        for r in [1.0, 2.0, 4.0] {
            let vals: Vec<f64> = rep.rows.iter().filter(|x| x.stat == stat && x.r == r).map(|x| x.estimate).collect();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{stat} {r} {vals:?}");
        }
    }
    assert_eq!(rep.split, Some(1.5));
    assert!(rep.warnings.is_empty());
    let pareto = lambda_scan(2, RadiusLaw::Pareto { alpha: 4.0, r_min: 0.5 }, &[1.0], &[0.1], 10, &TruncationPolicy::default(), 2)
        .unwrap();
    assert_eq!(pareto.warnings.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn components_partition_and_respect_edges(seed in any::<u64>(), lambda in 0.0f64..3.0) {
        let m = sample_marked(lambda, RadiusLaw::Uniform(0.1, 1.2), &Window::cube(&[0.0, 0.0], &[8.0, 8.0]), &mut stream(seed, 0, 0)).unwrap();
        let g = BallGraph::build(&m);
        for (i, j) in brute_force_edges(&m) {
            prop_assert_eq!(g.component(i), g.component(j));
        }
        let mut uf = crate::lattice::UnionFind::new(m.len());
        for (i, j) in brute_force_edges(&m) { uf.union(i, j); }
        prop_assert_eq!(uf.count(), g.component_count());
    }

    #[test]
    fn restriction_only_removes_balls(seed in any::<u64>(), zr in 1.0f64..6.0) {
        let m = sample_marked(1.0, RadiusLaw::Uniform(0.2, 1.0), &Window::centered_ball(2, 6.0), &mut stream(seed, 0, 0)).unwrap();
        let zone = Window::centered_ball(2, zr);
        let sub = restricted_graph(&m, Some(&zone));
        prop_assert!(sub.len() <= m.len());
        let target = Region::centered_sphere(2, 0.5 * zr);
        // Restricted connection implies unrestricted connection.
        if sub.connects(&Region::origin(2), &target) {
            prop_assert!(connects(&m, &Region::origin(2), &target, None));
        }
    }

    #[test]
    fn joint_rescale_preserves_connectivity(seed in any::<u64>(), scale in 0.2f64..5.0) {
        let m = sample_marked(1.2, RadiusLaw::Uniform(0.3, 1.0), &Window::centered_ball(2, 5.0), &mut stream(seed, 0, 0)).unwrap();
        let a = BallGraph::build(&m);
        let b = BallGraph::build(&m.scaled(scale));
        prop_assert_eq!(a.component_count(), b.component_count());
    }
}
