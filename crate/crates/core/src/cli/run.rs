use super::args::*;
use super::input::{parse_grid, read_curve};
use crate::bernoulli::{estimate_pc_crossing, theta_curve, BernoulliRow};
use crate::boolean::{
    estimate_annulus, estimate_theta_r, insertion_tolerance, lambda_scan, vacancy_probability, verify_russo_continuum,
    BooleanModel, BooleanRow, ContinuumEvent, StarPair, TruncationPolicy,
};
use crate::error::{invalid, Result};
use crate::exact::ExactEngine;
use crate::lattice::event::{Complement, Crossing, OriginToSphere};
use crate::lattice::LatticeGraph;
use crate::osss::algorithm::sequential;
use crate::osss::bounds::{osss_differential_check, osss_differential_check_exact, revealment_sum_bound_check, DifferentialCheck, Mode};
use crate::osss::exact::verify_osss_exact;
use crate::osss::mc::verify_osss_mc;
use crate::osss::{OsssRow, QueryAlgorithm, SphereExploration};
use crate::ppp::{
    chi_square_verdict, count_histogram, grid_tv_ladder, independence_check, mecke_check, superposition_check, void_check,
    CheckRow, MeckeFamily, RadiusLaw, Window,
};
use crate::rng::derive;
use crate::sharpness::{
    check_differential_inequality, fit_exponential_decay, fit_linear_growth, partial_sums, validate_lemma_family,
    ConstantFamily, Curve, ExponentialFamily, FitRow, LemmaFamily, RateProfileFamily, SumMode,
};
use crate::stats::{poisson_pmf, Estimate, Verdict};
use serde::Serialize;
use std::sync::Arc;

/// Files produced by one command, kept in memory until written.
pub struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl Outcome {
    fn single<T: Serialize>(name: &str, rows: &[T], verdict: Verdict) -> Result<Outcome> {
        Ok(Outcome { files: vec![(name.into(), csv_bytes(rows)?)], verdict, notes: Vec::new() })
    }

    fn note(mut self, s: impl Into<String>) -> Outcome {
        self.notes.push(s.into());
        self
    }
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Bernoulli(c) => bernoulli(c),
        Command::Exact(c) => exact(c),
        Command::Osss(c) => osss(c),
        Command::Ppp(c) => ppp(c),
        Command::Boolean(c) => boolean(c),
        Command::Sharp(c) => sharp(c),
        Command::Replay(_) => invalid("replay cannot be nested"),
    }
}

fn bernoulli(c: &BernoulliCmd) -> Result<Outcome> {
    match c {
        BernoulliCmd::Theta { d, n, p, replicas, common } => {
            let curve = theta_curve(*d, &[*n], &[*p], *replicas, common.seed, true)?;
            let row = &curve.rows[0];
            Outcome::single("theta.csv", &curve.csv_rows(), Verdict::Pass)
                .map(|o| o.note(format!("theta_{n}({p}) = {} +- {}", row.estimate, row.stderr)))
        }
        BernoulliCmd::Curve { d, n, p_grid, replicas, independent, common } => {
            let scales: Vec<usize> = (0..=*n).collect();
            let curve = theta_curve(*d, &scales, &parse_grid(p_grid)?, *replicas, common.seed, !independent)?;
            Outcome::single("curve.csv", &curve.csv_rows(), Verdict::Pass)
        }
        BernoulliCmd::Pc { n, replicas, resolution, common } => {
            let est = estimate_pc_crossing(*n, *replicas, common.seed, *resolution)?;
            let row = |model: &str, p: f64, e: &Estimate| BernoulliRow {
                model: model.into(),
                d: 2,
                n: *n,
                p,
                estimate: e.value,
                stderr: e.stderr,
                replicas: *replicas,
                seed: common.seed,
            };
            let mut rows: Vec<BernoulliRow> = est.evaluations.iter().map(|(p, e)| row("crossing", *p, e)).collect();
            rows.push(row("pc", est.root.value, &est.root));
            Outcome::single("pc.csv", &rows, Verdict::Pass)
                .map(|o| o.note(format!("root {} in [{}, {}]", est.root.value, est.bracket.0, est.bracket.1)))
        }
    }
}

#[derive(Serialize)]
struct RussoRow {
    check: &'static str,
    d: usize,
    n: usize,
    p: f64,
    probability: f64,
    derivative: f64,
    pivotal_sum: Option<f64>,
    covariance_sum: f64,
    pivotal_residual: Option<f64>,
    covariance_residual: f64,
    verdict: &'static str,
}

#[derive(Serialize)]
struct FkgRow {
    check: &'static str,
    d: usize,
    n: usize,
    p: f64,
    pair: String,
    slack: f64,
    direction: String,
    verdict: &'static str,
}

fn exact(c: &ExactCmd) -> Result<Outcome> {
    match c {
        ExactCmd::Russo { d, n, p, .. } => {
            let g = LatticeGraph::new(*d, *n)?;
            let ex = ExactEngine::new(&g)?;
            let r = ex.verify_russo(&OriginToSphere { k: *n }, *p)?;
            let verdict = Verdict::exact(r.pass);
            let row = RussoRow {
                check: "russo",
                d: *d,
                n: *n,
                p: *p,
                probability: r.probability,
                derivative: r.derivative,
                pivotal_sum: r.pivotal_sum,
                covariance_sum: r.covariance_sum,
                pivotal_residual: r.pivotal_residual,
                covariance_residual: r.covariance_residual,
                verdict: verdict.as_str(),
            };
            Outcome::single("russo.csv", &[row], verdict)
        }
        ExactCmd::Fkg { d, n, p, .. } => {
            let g = LatticeGraph::new(*d, *n)?;
            let ex = ExactEngine::new(&g)?;
            let a = OriginToSphere { k: *n };
            let b = Arc::new(Crossing { axis: 0 });
            let nb = Complement(b.clone());
            let mut rows = Vec::new();
            let mut verdict = Verdict::Pass;
            for (pair, r) in [("origin-boundary,crossing", ex.verify_fkg(&a, b.as_ref(), *p)?), ("origin-boundary,not-crossing", ex.verify_fkg(&a, &nb, *p)?)] {
                let v = Verdict::exact(r.pass);
                verdict = verdict.worst(v);
                rows.push(FkgRow {
                    check: "fkg",
                    d: *d,
                    n: *n,
                    p: *p,
                    pair: pair.into(),
                    slack: r.slack,
                    direction: format!("{:?}", r.direction).to_lowercase(),
                    verdict: v.as_str(),
                });
            }
            Outcome::single("fkg.csv", &rows, verdict)
        }
    }
}

fn osss_row(check: &str, d: usize, n: usize, p: f64) -> OsssRow {
    OsssRow {
        check: check.into(),
        d,
        n,
        p,
        k: None,
        edge: None,
        delta: None,
        inf: None,
        cov: None,
        slack_v1: None,
        slack_v2: None,
        verdict: "NA".into(),
    }
}

fn diff_row(c: &DifferentialCheck) -> OsssRow {
    OsssRow {
        delta: Some(c.lhs.value),
        inf: Some(c.rhs.value),
        cov: Some(c.chain.value),
        slack_v1: Some(c.rhs.value - c.lhs.value),
        slack_v2: Some(c.chain.value - c.lhs.value),
        verdict: c.verdict.as_str().into(),
        ..osss_row("diffcheck", c.d, c.n, c.p)
    }
}

fn osss(c: &OsssCmd) -> Result<Outcome> {
    match c {
        OsssCmd::Verify { d, n, p, algorithm, k, replicas, common } => {
            let g = LatticeGraph::new(*d, *n)?;
            let f = OriginToSphere { k: *n };
            let alg: Box<dyn QueryAlgorithm> = match algorithm {
                AlgorithmKind::Exploration => Box::new(SphereExploration::new(&g, *k)?),
                AlgorithmKind::Sequential => Box::new(sequential(g.edge_count())),
            };
            let (delta, inf, cov, s1, s2, verdict) = if *replicas == 0 {
                let r = verify_osss_exact(&ExactEngine::new(&g)?, alg.as_ref(), &f, *p)?;
                (r.revealment, r.influence, r.covariance, r.slack_v1, r.slack_v2, r.verdict)
            } else {
                let r = verify_osss_mc(&g, alg.as_ref(), &f, *p, *replicas, common.seed)?;
                let v = |x: &[Estimate]| x.iter().map(|e| e.value).collect::<Vec<_>>();
                (v(&r.revealment), v(&r.influence), v(&r.covariance), r.slack_v1.value, r.slack_v2.map(|s| s.value), r.verdict)
            };
            let mut rows: Vec<OsssRow> = (0..delta.len())
                .map(|e| OsssRow {
                    edge: Some(e),
                    delta: Some(delta[e]),
                    inf: Some(inf[e]),
                    cov: Some(cov[e]),
                    ..osss_row("osss-edge", *d, *n, *p)
                })
                .collect();
            rows.push(OsssRow {
                k: matches!(algorithm, AlgorithmKind::Exploration).then_some(*k),
                slack_v1: Some(s1),
                slack_v2: s2,
                verdict: verdict.as_str().into(),
                ..osss_row(&format!("osss:{}", alg.name()), *d, *n, *p)
            });
            Outcome::single("osss.csv", &rows, verdict)
        }
        OsssCmd::Revealment { d, n, p, replicas, common } => {
            let mode = if *replicas == 0 { Mode::Exact } else { Mode::MonteCarlo { replicas: *replicas, seed: common.seed } };
            let r = revealment_sum_bound_check(*d, *n, *p, mode)?;
            let mut rows = Vec::new();
            for (k, rev) in r.revealments.iter().enumerate() {
                for (e, x) in rev.iter().enumerate() {
                    rows.push(OsssRow { k: Some(k + 1), edge: Some(e), delta: Some(x.value), ..osss_row("revealment", *d, *n, *p) });
                }
            }
            let bound = 4.0 * r.partial_sum.value;
            for e in &r.edges {
                rows.push(OsssRow {
                    edge: Some(e.edge),
                    delta: Some(e.sum.value),
                    slack_v1: Some(bound - e.sum.value),
                    verdict: e.verdict.as_str().into(),
                    ..osss_row("revealment-sum", *d, *n, *p)
                });
            }
            Outcome::single("revealment.csv", &rows, r.verdict)
                .map(|o| o.note(format!("max ratio to 4 Sigma_n: {}", r.max_ratio)))
        }
        OsssCmd::Diffcheck { d, n, p, h, replicas, common } => {
            let r = if *replicas == 0 {
                osss_differential_check_exact(*d, *n, *p)?
            } else {
                osss_differential_check(*d, *n, *p, *h, *replicas, common.seed)?
            };
            Outcome::single("diffcheck.csv", &[diff_row(&r)], r.verdict)
        }
    }
}

fn unit_box(d: usize, lo: f64, hi: f64) -> Window {
    Window::cube(&vec![lo; d], &vec![hi; d])
}

/// Box equal to the unit cube except along the first axis.
fn slab(d: usize, lo: f64, hi: f64) -> Window {
    let mut a = vec![0.0; d];
    let mut b = vec![1.0; d];
    a[0] = lo;
    b[0] = hi;
    Window::cube(&a, &b)
}

fn mecke_families(d: usize, kind: MeckeKind) -> Vec<MeckeFamily> {
    let all = vec![
        MeckeFamily::Indicator { region: unit_box(d, 0.25, 0.75) },
        MeckeFamily::CountWeight { a: unit_box(d, 0.0, 0.5), b: unit_box(d, 0.25, 1.0) },
        MeckeFamily::PairwiseKernel { region: unit_box(d, 0.2, 0.8), range: 0.1 },
    ];
    match kind {
        MeckeKind::All => all,
        MeckeKind::Indicator => vec![all[0].clone()],
        MeckeKind::CountWeight => vec![all[1].clone()],
        MeckeKind::PairwiseKernel => vec![all[2].clone()],
    }
}

fn ppp(c: &PppCmd) -> Result<Outcome> {
    match c {
        PppCmd::Counts { d, lambda, replicas, common } => {
            let w = Window::unit_cube(*d);
            let seed = common.seed;
            let hist = count_histogram(*lambda, &w, &w, *replicas, derive(seed, 0))?;
            let mean = *lambda;
            let pmf = poisson_pmf(mean, hist.len());
            let n = *replicas as f64;
            let mut rows: Vec<CheckRow> = hist
                .iter()
                .zip(&pmf)
                .enumerate()
                .map(|(k, (h, q))| CheckRow::new("count", format!("k={k}"), *h as f64 / n, *q, (q * (1.0 - q) / n).sqrt(), Verdict::Pass))
                .map(|mut r| {
                    r.verdict = "NA".into();
                    r
                })
                .collect();
            let chi = crate::stats::chi_square_poisson(&hist, mean);
            let vc = chi_square_verdict(&chi);
            rows.push(CheckRow::new("count-chi2", format!("dof={},p_value={}", chi.dof, chi.p_value), chi.statistic, chi.dof as f64, 0.0, vc));
            let void = void_check(*lambda, &w, &unit_box(*d, 0.0, 0.5), *replicas, derive(seed, 1))?;
            rows.push(CheckRow::from_stat(&void, "region=[0,0.5]^d"));
            let ind = independence_check(*lambda, &w, &slab(*d, 0.0, 0.5), &slab(*d, 0.5, 1.0), *replicas, derive(seed, 2))?;
            rows.push(CheckRow::from_stat(&ind, "halves along axis 1"));
            let verdict = Verdict::combine([vc, void.verdict, ind.verdict]);
            Outcome::single("counts.csv", &rows, verdict)
        }
        PppCmd::Mecke { d, lambda, family, replicas, common } => {
            let w = Window::unit_cube(*d);
            let mut rows = Vec::new();
            let mut verdict = Verdict::Pass;
            for (i, f) in mecke_families(*d, *family).iter().enumerate() {
                let r = mecke_check(*lambda, &w, f, *replicas, derive(common.seed, i as u64))?;
                verdict = verdict.worst(r.verdict);
                rows.push(CheckRow::new("mecke", r.family.clone(), r.left, r.right, r.left_stderr, r.verdict));
            }
            Outcome::single("mecke.csv", &rows, verdict)
        }
        PppCmd::Superpose { d, lambda, lambda2, replicas, common } => {
            let r = superposition_check(*lambda, *lambda2, &Window::unit_cube(*d), *replicas, common.seed)?;
            let chi = &r.chi_square;
            let rows = vec![
                CheckRow::from_stat(&r.mean, "merged"),
                CheckRow::from_stat(&r.dispersion, "merged"),
                CheckRow::new("merged-chi2", format!("dof={},p_value={}", chi.dof, chi.p_value), chi.statistic, chi.dof as f64, 0.0, chi_square_verdict(chi)),
            ];
            Outcome::single("superpose.csv", &rows, r.verdict)
        }
        PppCmd::Grid { d, lambda, eps, replicas, common } => {
            let r = grid_tv_ladder(eps, *lambda, &Window::unit_cube(*d), *replicas, common.seed)?;
            let mut rows: Vec<CheckRow> = r
                .rows
                .iter()
                .map(|x| {
                    let mut row = CheckRow::new("grid-tv", format!("eps={}", x.eps), x.tv, 0.0, 0.0, Verdict::Pass);
                    row.verdict = "NA".into();
                    row
                })
                .collect();
            let last = r.rows.last().map_or(0.0, |x| x.tv);
            rows.push(CheckRow::new("grid-monotone", format!("levels={}", r.rows.len()), last, 0.0, 0.0, r.verdict));
            Outcome::single("grid.csv", &rows, r.verdict)
        }
    }
}

fn model_of(m: &BooleanModelArgs) -> Result<(BooleanModel, TruncationPolicy)> {
    let nu: RadiusLaw = m.nu.parse()?;
    Ok((BooleanModel::new(m.d, m.lambda, nu)?, TruncationPolicy { eps: m.trunc_eps }))
}

fn closed_row(model: &BooleanModel, r: f64, stat: &str, value: f64, trunc_err: f64) -> BooleanRow {
    BooleanRow { model: "closed-form".into(), replicas: 0, ..BooleanRow::new(model, r, stat, &Estimate::exact(value), trunc_err) }
}

fn boolean(c: &BooleanCmd) -> Result<Outcome> {
    match c {
        BooleanCmd::Theta { model, r, replicas, common } | BooleanCmd::Annulus { model, r, replicas, common } => {
            let theta = matches!(c, BooleanCmd::Theta { .. });
            let (m, trunc) = model_of(model)?;
            m.require_nontrivial()?;
            if r.is_empty() {
                return invalid("--r needs at least one radius");
            }
            let mut rows = Vec::new();
            for (i, &radius) in r.iter().enumerate() {
                let seed = derive(common.seed, i as u64);
                let (stat, est) = if theta {
                    ("theta_r", estimate_theta_r(&m, radius, *replicas, &trunc, seed)?)
                } else {
                    ("annulus", estimate_annulus(&m, radius, *replicas, &trunc, seed)?)
                };
                rows.push(BooleanRow::new(&m, radius, stat, &est.estimate, est.trunc_err));
            }
            Outcome::single(if theta { "theta_r.csv" } else { "annulus.csv" }, &rows, Verdict::Pass)
        }
        BooleanCmd::Vacancy { model, replicas, common } => {
            let (m, trunc) = model_of(model)?;
            let r = vacancy_probability(&m, *replicas, &trunc, common.seed)?;
            let rows = vec![BooleanRow::new(&m, 0.0, "vacancy", &r.mc, r.trunc_err), closed_row(&m, 0.0, "vacancy", r.closed_form, 0.0)];
            Outcome::single("vacancy.csv", &rows, r.verdict)
                .map(|o| o.note(format!("closed form {} Monte Carlo {} +- {}", r.closed_form, r.mc.value, r.mc.stderr)))
        }
        BooleanCmd::Cit { model, x, inner, outer, replicas, common } => {
            let (m, _) = model_of(model)?;
            let x = if x.is_empty() { vec![0; m.d] } else { x.clone() };
            let star = StarPair::new(m.d, *inner, *outer)?;
            let r = insertion_tolerance(&m, &star, &x, *replicas, common.seed)?;
            let rows = vec![BooleanRow::new(&m, *inner, "c_it", &r.mc, 0.0), closed_row(&m, *inner, "c_it", r.closed_form, 0.0)];
            let mut o = Outcome::single("c_it.csv", &rows, r.verdict)?;
            if let Some(w) = &r.warning {
                o = o.note(format!("warning: {w}"));
            }
            Ok(o)
        }
        BooleanCmd::Scan { model, r, lambda_grid, replicas, common } => {
            let (m, trunc) = model_of(model)?;
            let s = lambda_scan(m.d, m.nu, r, &parse_grid(lambda_grid)?, *replicas, &trunc, common.seed)?;
            let mut o = Outcome::single("scan.csv", &s.rows, Verdict::Pass)?;
            o = o.note(match s.split {
                Some(l) => format!("annulus crossings stop decaying from lambda = {l}"),
                None => "annulus crossings decay at every intensity of the grid".into(),
            });
            for w in &s.warnings {
                o = o.note(format!("warning: {w}"));
            }
            Ok(o)
        }
        BooleanCmd::Russo { model, event, r, h, replicas, common } => {
            let (m, trunc) = model_of(model)?;
            let ev = match event {
                RussoEvent::Covered => ContinuumEvent::OriginCovered,
                RussoEvent::Sphere => ContinuumEvent::OriginToSphere(*r),
            };
            let rep = verify_russo_continuum(&m, ev, *h, *replicas, &trunc, common.seed)?;
            let fd = rep.finite_difference;
            let mut rows = vec![CheckRow::new(
                "russo",
                format!("{},lambda={}", rep.event, rep.lambda),
                fd.value,
                rep.pivotal.value,
                (fd.stderr.powi(2) + rep.pivotal.stderr.powi(2)).sqrt(),
                rep.verdict,
            )];
            if let Some(cf) = rep.closed_form {
                rows.push(CheckRow::new("russo-closed-form", format!("{},lambda={}", rep.event, rep.lambda), fd.value, cf, fd.stderr, Verdict::agreement(fd.value - cf, fd.stderr)));
            }
            let verdict = rows.iter().fold(rep.verdict, |v, r| if r.verdict == "FAIL" { Verdict::Fail } else { v });
            Outcome::single("russo.csv", &rows, verdict)
        }
    }
}

fn curve_from(source: &CurveSource, seed: u64) -> Result<Curve> {
    match &source.input {
        Some(path) => {
            let mut c = read_curve(path)?;
            c.coupled = source.coupled;
            Ok(c)
        }
        None => {
            let scales: Vec<usize> = (0..=source.n).collect();
            let curve = theta_curve(source.d, &scales, &parse_grid(&source.p_grid)?, source.replicas, seed, true)?;
            Ok(Curve::from(&curve))
        }
    }
}

fn sum_mode(k: SumKind) -> SumMode {
    match k {
        SumKind::Discrete => SumMode::Discrete,
        SumKind::Continuum => SumMode::Continuum,
    }
}

#[derive(Serialize)]
struct CellRow {
    mode: &'static str,
    param: f64,
    scale: f64,
    theta: f64,
    sum: f64,
    derivative: f64,
    derivative_stderr: f64,
    rhs: f64,
    rhs_stderr: f64,
    verdict: &'static str,
}

fn sharp(c: &SharpCmd) -> Result<Outcome> {
    match c {
        SharpCmd::Sums { source, mode, common } => {
            let t = partial_sums(&curve_from(source, common.seed)?, sum_mode(*mode))?;
            Outcome::single("sums.csv", &t.rows, Verdict::Pass)
        }
        SharpCmd::Check { source, mode, c, gate, common } => {
            let mode = sum_mode(*mode);
            let r = check_differential_inequality(&curve_from(source, common.seed)?, *c, mode, *gate)?;
            let label = match mode {
                SumMode::Discrete => "discrete",
                SumMode::Continuum => "continuum",
            };
            let rows: Vec<CellRow> = r
                .cells
                .iter()
                .map(|x| CellRow {
                    mode: label,
                    param: x.param,
                    scale: x.scale,
                    theta: x.theta,
                    sum: x.sum,
                    derivative: x.derivative,
                    derivative_stderr: x.derivative_stderr,
                    rhs: x.rhs,
                    rhs_stderr: x.rhs_stderr,
                    verdict: x.verdict.as_str(),
                })
                .collect();
            let count = |v: Verdict| r.cells.iter().filter(|x| x.verdict == v).count();
            let mut o = Outcome::single("inequality.csv", &rows, r.verdict)?.note(format!(
                "{} cells: {} PASS, {} INCONCLUSIVE, {} FAIL",
                r.cells.len(),
                count(Verdict::Pass),
                count(Verdict::Inconclusive),
                count(Verdict::Fail)
            ));
            if !r.gated.is_empty() {
                o = o.note(format!("{} parameters below the gate skipped", r.gated.len()));
            }
            Ok(o)
        }
        SharpCmd::Fitdecay { input, d, p, scales, replicas, common } => {
            let (curve, reps) = match input {
                Some(path) => {
                    let c = read_curve(path)?;
                    let n = c.replicas;
                    (c, n)
                }
                None => (Curve::from(&theta_curve(*d, scales, p, *replicas, common.seed, true)?), *replicas),
            };
            let mut rows: Vec<FitRow> = Vec::new();
            let mut notes = Vec::new();
            for &q in p {
                let fit = fit_exponential_decay(&curve.slice(q), reps)?;
                notes.push(format!("p = {q}: slope {} r2 {} {}", fit.slope, fit.r2, if fit.decaying { "DECAYING" } else { "NOT-DECAYING" }));
                rows.extend(fit.rows(&format!("p={q}")));
            }
            let mut o = Outcome::single("fits.csv", &rows, Verdict::Pass)?;
            o.notes = notes;
            Ok(o)
        }
        SharpCmd::Fitgrowth { input, d, n, p_grid, pc, replicas, common } => {
            let curve = match input {
                Some(path) => read_curve(path)?,
                None => Curve::from(&theta_curve(*d, &[*n], &parse_grid(p_grid)?, *replicas, common.seed, true)?),
            };
            let pts: Vec<_> = curve.points.iter().copied().filter(|x| (x.scale - *n as f64).abs() < 1e-9).collect();
            let fit = fit_linear_growth(&pts, *pc)?;
            let mut o = Outcome::single("fits.csv", &fit.rows(&format!("n={n}")), Verdict::Pass)?
                .note(format!("c = {} with lower end {}", fit.c, fit.ci_low));
            if let Some(w) = &fit.warning {
                o = o.note(format!("warning: {w}"));
            }
            Ok(o)
        }
        SharpCmd::Lemma { family, transition, c, step, horizon, .. } => {
            let fam: Box<dyn LemmaFamily> = match family {
                FamilyKind::Rate => Box::new(RateProfileFamily::new(*transition, *c)),
                FamilyKind::Exp => Box::new(ExponentialFamily { c: *c }),
                FamilyKind::Constant => Box::new(ConstantFamily { c: *c }),
            };
            let r = validate_lemma_family(fam.as_ref(), *step, *horizon)?;
            let row = |kind: &str, value: f64| FitRow { fit: "lemma".into(), kind: kind.into(), param: r.family.clone(), value, stderr: 0.0, r2: f64::NAN };
            let mut rows = vec![row("transition_lo", r.transition.lo), row("transition_hi", r.transition.hi)];
            if let Some(t) = r.known_transition {
                rows.push(row("known_transition", t));
            }
            rows.push(row("hypothesis_ratio", r.hypothesis_ratio));
            rows.push(row("decay_checked", r.decay_checked as f64));
            if let Some(g) = r.growth_c {
                rows.push(row("growth_c", g));
            }
            Outcome::single("lemma.csv", &rows, r.verdict)
                .map(|o| o.note(format!("transition bracket [{}, {}]", r.transition.lo, r.transition.hi)))
        }
    }
}
