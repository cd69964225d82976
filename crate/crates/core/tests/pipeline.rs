use percolab::bernoulli::theta_curve;
use percolab::exact::ExactEngine;
use percolab::lattice::event::OriginToSphere;
use percolab::lattice::LatticeGraph;
use percolab::sharpness::{check_differential_inequality, partial_sums, Curve, SumMode};
use percolab::Verdict;

// theta_n from exact enumeration on the smallest boxes, fed through the
// sums and the inequality checker as a curve with no sampling error.
fn exact_curve(params: &[f64]) -> Curve {
    let g = LatticeGraph::new(2, 1).unwrap();
    let ex = ExactEngine::new(&g).unwrap();
    let mut tc = theta_curve(2, &[0, 1], params, 1, 0, true).unwrap();
    for row in tc.rows.iter_mut() {
        if row.n == 1 {
            row.estimate = ex.probability(&OriginToSphere { k: 1 }, row.p).unwrap();
        }
        row.stderr = 0.0;
    }
    Curve::from(&tc)
}

#[test]
fn exact_theta_one_satisfies_the_inequality() {
    let params: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let curve = exact_curve(&params);
    let sums = partial_sums(&curve, SumMode::Discrete).unwrap();
    let s = sums.get(0.5, 1.0).unwrap();
    assert_eq!(s.sum, 1.0);
    assert!((s.theta - 15.0 / 16.0).abs() < 1e-12);
    let report = check_differential_inequality(&curve, 0.25, SumMode::Discrete, None).unwrap();
    assert!(report.cells.iter().all(|c| c.verdict != Verdict::Fail));
    assert!(report.cells.iter().filter(|c| c.scale == 1.0).any(|c| c.verdict == Verdict::Pass));
}

#[test]
fn coupled_curves_are_monotone_in_p() {
    let c = theta_curve(2, &[3], &[0.3, 0.4, 0.5, 0.6], 2000, 4, true).unwrap();
    let v: Vec<f64> = c.rows.iter().map(|r| r.estimate).collect();
    assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
}
