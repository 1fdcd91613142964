//! Dispatch from a configuration to the library experiments.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use wwlab_core::defaults;
use wwlab_core::factors::{
    characteristic_projection_check, kernel_birkhoff_check, resonance_check,
};
use wwlab_core::inequalities::{random_trial_suite, InequalityKind};
use wwlab_core::nil::{
    cl_equation_check, leibman_average, weyl_sum_average, CircleMap, HeisenbergPoint,
    PolynomialSequenceSpec,
};
use wwlab_core::seminorms::{
    angle_seminorm_estimate, ghk_seminorm_estimate, nk_seminorm_estimate, power_bound_check,
    ProductSystem,
};
use wwlab_core::spectral::{
    atom_mass, atom_scan, correlation_coefficients, wiener_statistic, CorrelationMethod,
};
use wwlab_core::wwdr::{
    eigenfunction_twist, maxisom_bound_check, rational_lift_check, rational_lift_trials,
    twist_check, twist_for_frequency, uniform_decay_experiment, z2_inequality_experiment, Z2Kind,
    Z2Params,
};
use wwlab_core::{
    sample_invariant_measure, AveragingScheme, Complex64, StatePoint, SystemSpec, TruncationParams,
};

use crate::config::{Experiment, ExperimentConfig, Frequency};
use crate::error::CliError;
use crate::report::CsvRecord;

/// Results, verdicts and CSV rows of one experiment.
#[derive(Default)]
pub struct Outcome {
    pub results: Value,
    pub verdicts: BTreeMap<String, bool>,
    pub records: Vec<CsvRecord>,
}

impl Outcome {
    fn new(results: Value) -> Outcome {
        Outcome {
            results,
            ..Default::default()
        }
    }

    fn verdict(mut self, name: &str, passed: bool) -> Outcome {
        self.verdicts.insert(name.to_string(), passed);
        self
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values are serialisable")
}

fn unknown_which(experiment: Experiment, which: &str, options: &str) -> CliError {
    CliError::Config(format!(
        "{experiment}: unknown --which `{which}`; expected one of {options}"
    ))
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    experiment: Experiment,
}

impl Ctx<'_> {
    fn record(
        &self,
        n: usize,
        sample_index: usize,
        value: Complex64,
        grid: Option<(f64, f64)>,
    ) -> CsvRecord {
        CsvRecord {
            experiment: self.experiment.name().to_string(),
            system: self.cfg.system_name().to_string(),
            n,
            sample_index,
            value_re: value.re,
            value_im: value.im,
            grid_max: grid.map(|g| g.0),
            certified_upper: grid.map(|g| g.1),
            seed: self.cfg.seed(),
        }
    }

    fn points(&self, sys: &SystemSpec, default_samples: usize) -> Vec<StatePoint> {
        sample_invariant_measure(
            sys,
            self.cfg.samples.unwrap_or(default_samples),
            self.cfg.seed(),
        )
    }

    fn truncation(&self, default_h: usize) -> TruncationParams {
        let h = self.cfg.h.unwrap_or(default_h);
        let mut p = TruncationParams::new(h).with_inner(self.cfg.k.unwrap_or(h));
        if let Some(nodes) = self.cfg.nodes {
            p = p.with_nodes(nodes);
        }
        p
    }

    fn real_t(&self) -> Option<f64> {
        self.cfg.t.map(Frequency::to_f64)
    }
}

pub fn run(cfg: &ExperimentConfig, experiment: Experiment) -> Result<Outcome, CliError> {
    let ctx = Ctx { cfg, experiment };
    match experiment {
        Experiment::Ww => ww(&ctx),
        Experiment::Seminorm => seminorm(&ctx),
        Experiment::Spectral => spectral(&ctx),
        Experiment::KernelCheck => kernel_check(&ctx),
        Experiment::Ineq => ineq(&ctx),
        Experiment::Maxisom => maxisom(&ctx),
        Experiment::Lift => lift(&ctx),
        Experiment::Nil => nil(&ctx),
        Experiment::Weyl => weyl(&ctx),
        Experiment::Report => Err(CliError::Usage(
            "the report suite is run through `wwlab report`".into(),
        )),
    }
}

const WW_LADDER: [usize; 3] = [1 << 10, 1 << 12, 1 << 14];

fn ww(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let sys = cfg.system_spec()?;
    let (f1, f2) = (
        cfg.observable("f1", "cos:1")?,
        cfg.observable("f2", "cos:1")?,
    );
    let mut scheme = AveragingScheme::new(
        cfg.a.unwrap_or(1),
        cfg.b.unwrap_or(2),
        cfg.ladder_or(&WW_LADDER),
    )?;
    if let Some(t) = ctx.real_t() {
        scheme = scheme.with_frequency(t);
    }
    let which = cfg.which("decay");
    let z2 = match which.as_str() {
        "decay" | "persist" => None,
        "cl" => Some(Z2Kind::Cl),
        "double_fctn" => Some(Z2Kind::DoubleFctn),
        "double_fctn_ww" => Some(Z2Kind::DoubleFctnWw),
        "single_fctn" => Some(Z2Kind::SingleFctn),
        other => {
            return Err(unknown_which(
                ctx.experiment,
                other,
                "decay, persist, cl, double_fctn, double_fctn_ww, single_fctn",
            ))
        }
    };
    if let Some(kind) = z2 {
        let params = Z2Params {
            samples: cfg.samples(),
            seed: cfg.seed(),
            h: cfg.h.unwrap_or(1000),
            constant: cfg.constant(),
            oversampling: cfg.oversampling(),
        };
        let r = z2_inequality_experiment(&sys, kind, &f1, &f2, &scheme, &params)?;
        let records = r
            .ladder
            .iter()
            .zip(&r.lhs)
            .map(|(&n, &l)| ctx.record(n, 0, Complex64::new(l, 0.0), None))
            .collect();
        let holds = r.holds;
        let non_increasing = r.non_increasing;
        let mut o = Outcome::new(value(&r))
            .verdict("bound", holds)
            .verdict("non_increasing", non_increasing);
        o.records = records;
        return Ok(o);
    }
    let s = uniform_decay_experiment(
        &sys,
        &f1,
        &f2,
        &scheme,
        cfg.samples(),
        cfg.seed(),
        cfg.oversampling(),
    )?;
    let mut records = Vec::new();
    for r in &s.records {
        for (i, sample) in r.samples.iter().enumerate() {
            records.push(ctx.record(
                r.n,
                i,
                sample.value,
                Some((sample.sup.grid_max, sample.sup.certified_upper)),
            ));
        }
    }
    let summary: Vec<Value> = s
        .records
        .iter()
        .map(|r| {
            json!({
                "N": r.n,
                "median_grid_max": r.median_grid_max,
                "median_certified": r.median_certified,
                "max_certified": r.max_certified,
            })
        })
        .collect();
    let results =
        json!({ "scheme": value(&s.scheme), "records": summary, "decay": value(&s.decay) });
    let mut o = if which == "persist" {
        let floor = cfg.threshold.unwrap_or(0.2);
        let persists = s.records.iter().all(|r| r.median_grid_max >= floor);
        Outcome::new(results).verdict("persists", persists)
    } else {
        Outcome::new(results).verdict("decay", s.decay.passed)
    };
    o.records = records;
    Ok(o)
}

fn seminorm(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let sys = cfg.system_spec()?;
    let f = cfg.observable("f", "cos:1")?;
    let order = cfg.order.unwrap_or(2);
    let params = ctx.truncation(1000);
    let which = cfg.which("ghk");
    let mut o = match which.as_str() {
        "ghk" => Outcome::new(value(&ghk_seminorm_estimate(&sys, &f, order, &params)?)),
        "nk" => Outcome::new(value(&nk_seminorm_estimate(&sys, &f, order, &params)?)),
        "angle" => {
            let u = ProductSystem::power(&sys, cfg.a.unwrap_or(1))?;
            Outcome::new(value(&angle_seminorm_estimate(
                &u,
                std::slice::from_ref(&f),
                order,
                &params,
            )?))
        }
        "power" => {
            let r = power_bound_check(&sys, &f, cfg.a.unwrap_or(2), order, &params)?;
            let holds = r.holds;
            return Ok(Outcome::new(value(&r)).verdict("power_bound", holds));
        }
        other => {
            return Err(unknown_which(
                ctx.experiment,
                other,
                "ghk, nk, angle, power",
            ))
        }
    };
    if let Some(limit) = cfg.threshold {
        let v = o.results["value"].as_f64().unwrap_or(f64::INFINITY);
        o = o.verdict("below_threshold", v <= limit);
    }
    Ok(o)
}

fn spectral(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let sys = cfg.system_spec()?;
    let f = cfg.observable("f", "cos:1")?;
    let g = match cfg.f2 {
        Some(_) => cfg.observable("f2", "cos:1")?,
        None => f.clone(),
    };
    let method = match cfg.which("quadrature").as_str() {
        "quadrature" => CorrelationMethod::Quadrature { nodes: cfg.nodes },
        "orbit" => CorrelationMethod::OrbitAverage {
            n: cfg.n_or(1 << 16),
            seed: cfg.seed(),
        },
        other => return Err(unknown_which(ctx.experiment, other, "quadrature, orbit")),
    };
    let corr = correlation_coefficients(
        &sys,
        &f,
        &g,
        cfg.a.unwrap_or(1),
        cfg.h.unwrap_or(1000),
        method,
    )?;
    let threshold = cfg.threshold.unwrap_or(defaults::ATOM_THRESHOLD);
    let atoms = atom_scan(&corr, threshold)?;
    let mut results = json!({
        "H": corr.len(),
        "method": value(&corr.method),
        "sigma_0": value(&corr.coeffs[0]),
        "wiener_statistic": wiener_statistic(&corr),
        "atom_threshold": threshold,
        "atoms": value(&atoms),
    });
    if let Some(t) = ctx.real_t() {
        results["atom_mass"] = json!({ "t": t, "mass": value(&atom_mass(&corr, t)) });
    }
    let mut o = Outcome::new(results);
    o.records = corr
        .coeffs
        .iter()
        .enumerate()
        .map(|(h, c)| ctx.record(h, 0, *c, None))
        .collect();
    Ok(o)
}

fn kernel_check(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let which = cfg.which("kernel");
    match which.as_str() {
        "kernel" => {
            let sys = if cfg.system.is_some() {
                cfg.system_spec()?
            } else {
                SystemSpec::cyclic_product(
                    cfg.q.unwrap_or(4),
                    cfg.alpha.unwrap_or(defaults::ALPHA),
                )?
            };
            let f = cfg.observable("f", "fiber:0+2*fiber:1+cos:1*fiber:3+sin:2")?;
            let points = ctx.points(&sys, 16);
            let n = cfg.n_or(100_000);
            let tol = cfg.threshold.unwrap_or(1e-2);
            let mut o = Outcome::new(Value::Null);
            let mut per_power = Vec::new();
            for &s in cfg.powers.as_deref().unwrap_or(&[2, 4]) {
                let r = kernel_birkhoff_check(&sys, &f, s, &points, n)?;
                o.verdicts.insert(format!("s={s}"), r.max_gap <= tol);
                for (i, b) in r.birkhoff.iter().enumerate() {
                    o.records.push(ctx.record(n, i, *b, None));
                }
                per_power.push(json!({
                    "s": s,
                    "atoms": r.l,
                    "expectation": r.expectation.to_string(),
                    "max_gap": r.max_gap,
                }));
            }
            o.results = json!({ "system": sys.description(), "f": f.to_string(), "N": n, "tolerance": tol, "powers": per_power });
            Ok(o)
        }
        "resonance" | "projection" => {
            let sys = cfg.system_spec()?;
            let (f1, f2) = (
                cfg.observable("f1", "cos:2")?,
                cfg.observable("f2", "cos:1")?,
            );
            let (a, b) = (cfg.a.unwrap_or(1), cfg.b.unwrap_or(2));
            let points = ctx.points(&sys, 8);
            let n = cfg.n_or(1 << 14);
            let tol = cfg.threshold.unwrap_or(0.05);
            let mut o;
            if which == "resonance" {
                let r = resonance_check(&sys, &f1, &f2, a, b, &points, n)?;
                o = Outcome::new(json!({
                    "pairs": value(&r.set.pairs),
                    "limit": r.limit.to_string(),
                    "N": n,
                    "direct": value(&r.direct),
                    "closed_form": value(&r.closed_form),
                    "max_gap": r.max_gap,
                    "tolerance": tol,
                }))
                .verdict("resonance", r.max_gap <= tol);
                o.records = r
                    .direct
                    .iter()
                    .enumerate()
                    .map(|(i, d)| ctx.record(n, i, *d, None))
                    .collect();
            } else {
                let r = characteristic_projection_check(&sys, &f1, &f2, a, b, &points, n)?;
                let ok = r.max_gap <= tol;
                o = Outcome::new(value(&r)).verdict("projection", ok);
                o.records = r
                    .direct
                    .iter()
                    .enumerate()
                    .map(|(i, d)| ctx.record(n, i, *d, None))
                    .collect();
            }
            Ok(o)
        }
        other => Err(unknown_which(
            ctx.experiment,
            other,
            "kernel, resonance, projection",
        )),
    }
}

fn ineq(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let which = cfg.which("all");
    let kinds = if which == "all" {
        InequalityKind::ALL.to_vec()
    } else {
        vec![InequalityKind::parse(&which)?]
    };
    let trials = cfg.trials.unwrap_or(100);
    let max_n = cfg.n_or(512);
    let mut o = Outcome::new(Value::Null);
    let mut summaries = Vec::new();
    for kind in kinds {
        let r = random_trial_suite(kind, trials, max_n, cfg.seed(), cfg.oversampling())?;
        o.verdicts
            .insert(format!("{}_no_violations", kind.name()), r.violations == 0);
        for (i, t) in r.reports.iter().enumerate() {
            o.records.push(CsvRecord {
                experiment: format!("ineq:{}", kind.name()),
                ..ctx.record(t.n, i, Complex64::new(t.lhs, 0.0), None)
            });
        }
        summaries.push(json!({
            "which": kind.name(),
            "trials": r.trials,
            "max_n": r.max_n,
            "violations": r.violations,
            "worst_ratio": r.worst_ratio,
            "worst_trial": r.worst_trial,
        }));
    }
    o.results = json!({ "suites": summaries, "tolerance": defaults::VERDICT_TOLERANCE });
    Ok(o)
}

fn maxisom(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let sys = cfg.system_spec()?;
    let (f1, f2) = (
        cfg.observable("f1", "cos:1")?,
        cfg.observable("f2", "cos:1")?,
    );
    let n = cfg.n_or(1 << 14);
    let r = maxisom_bound_check(
        &sys,
        &f1,
        &f2,
        cfg.a.unwrap_or(1),
        cfg.b.unwrap_or(2),
        cfg.samples(),
        cfg.seed(),
        n,
        cfg.h.unwrap_or(64),
        cfg.constant(),
        cfg.oversampling(),
    )?;
    let holds = r.holds;
    let records = r
        .sups
        .iter()
        .enumerate()
        .map(|(i, s)| ctx.record(n, i, Complex64::new(*s, 0.0), None))
        .collect();
    let mut o = Outcome::new(value(&r)).verdict("bound", holds);
    o.records = records;
    Ok(o)
}

fn lift(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let sys = cfg.system_spec()?;
    let (f1, f2) = (
        cfg.observable("f1", "cos:1")?,
        cfg.observable("f2", "cos:1")?,
    );
    let (a, b) = (cfg.a.unwrap_or(1), cfg.b.unwrap_or(2));
    match cfg.which("rational").as_str() {
        "rational" => {
            if let Some(trials) = cfg.trials {
                let r = rational_lift_trials(&sys, trials, cfg.n_or(500), cfg.seed())?;
                let holds = r.holds;
                return Ok(Outcome::new(value(&r)).verdict("identity", holds));
            }
            let t = match cfg
                .t
                .unwrap_or(Frequency::Rational(wwlab_core::wwdr::Rational {
                    p: 1,
                    q: 3,
                })) {
                Frequency::Rational(r) => r,
                Frequency::Real(t) => {
                    return Err(CliError::Config(format!(
                        "lift needs a rational frequency p/q, got {t}"
                    )))
                }
            };
            let alpha1 = cfg.alpha1.unwrap_or(1.0);
            let alpha2 = cfg.alpha2.unwrap_or((1.0 - alpha1 * a as f64) / b as f64);
            let x = ctx.points(&sys, 1).remove(0);
            let n = cfg.n_or(1000);
            let r = rational_lift_check(
                &sys,
                &f1,
                &f2,
                a,
                b,
                t,
                alpha1,
                alpha2,
                &x,
                cfg.y.unwrap_or(0.7),
                n,
            )?;
            let holds = r.holds;
            let mut o = Outcome::new(json!({
                "t": format!("{}/{}", t.p, t.q),
                "alpha1": alpha1,
                "alpha2": alpha2,
                "x": x.coordinates(),
                "report": value(&r),
            }))
            .verdict("identity", holds);
            o.records = vec![ctx.record(n, 0, r.lifted, None)];
            Ok(o)
        }
        "twist" => {
            let twist = match (cfg.eigen_index, ctx.real_t()) {
                (Some(k), _) => eigenfunction_twist(&sys, k)?,
                (None, Some(t)) => twist_for_frequency(&sys, t, defaults::EIGEN_CUTOFF)?,
                (None, None) => eigenfunction_twist(&sys, 3)?,
            };
            let points = ctx.points(&sys, 4);
            let r = twist_check(&sys, &twist, &f1, &f2, a, b, &points, cfg.n_or(100))?;
            let (rel, red) = (r.relation_holds, r.reduction_holds);
            Ok(Outcome::new(value(&r))
                .verdict("relation", rel)
                .verdict("reduction", red))
        }
        other => Err(unknown_which(ctx.experiment, other, "rational, twist")),
    }
}

const NIL_LADDER: [usize; 7] = [
    1 << 10,
    1 << 11,
    1 << 12,
    1 << 13,
    1 << 14,
    1 << 15,
    1 << 16,
];

fn nil(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    match cfg.which("leibman").as_str() {
        "leibman" => {
            let mut spec = PolynomialSequenceSpec::reference();
            if let Some([g1, g2, g3]) = cfg.generators() {
                spec.g1 = g1;
                spec.g2 = g2;
                spec.g3 = g3;
            }
            spec.a = cfg.a.unwrap_or(spec.a);
            spec.b = cfg.b.unwrap_or(spec.b);
            let x0 = HeisenbergPoint::new(cfg.x.unwrap_or(0.0), cfg.y.unwrap_or(0.0), 0.0);
            let f = cfg.observable("f", "cos:1*cos:1@1+-1*sin:1*sin:1@1")?;
            let ladder = cfg.ladder_or(&NIL_LADDER);
            let s = leibman_average(&spec, &x0, &f, &ladder)?;
            let threshold = cfg.threshold.unwrap_or(0.02);
            let final_gap = *s.gaps.last().expect("non-empty ladder");
            let mut o = Outcome::new(json!({ "sequence": value(&spec), "x0": value(&x0), "f": f.to_string(), "series": value(&s) }))
                .verdict("gaps_non_increasing", s.gaps_non_increasing())
                .verdict("final_gap", final_gap <= threshold);
            o.records = s
                .ladder
                .iter()
                .zip(&s.averages)
                .map(|(&n, v)| ctx.record(n, 0, *v, None))
                .collect();
            Ok(o)
        }
        "cl" => {
            let alpha = cfg.alpha.unwrap_or(defaults::ALPHA);
            let nodes = cfg.nodes.unwrap_or(1024) as usize;
            let cases: Vec<(CircleMap, CircleMap, f64, f64)> = match &cfg.cocycle {
                Some(c) => vec![(c.rho.clone(), c.transfer.clone(), c.s, c.c)],
                None => {
                    let s = 0.237;
                    vec![
                        (CircleMap::affine(1, 0.0), CircleMap::zero(), s, s),
                        (CircleMap::affine(2, alpha), CircleMap::zero(), s, 2.0 * s),
                    ]
                }
            };
            let mut o = Outcome::new(Value::Null);
            let mut reports = Vec::new();
            for (i, (rho, f, s, c)) in cases.iter().enumerate() {
                let r = cl_equation_check(alpha, rho, *s, f, *c, nodes)?;
                o.verdicts.insert(format!("case_{i}"), r.passed);
                reports.push(json!({ "rho": value(rho), "f": value(f), "s": s, "c": c, "report": value(&r) }));
            }
            o.results = json!({ "alpha": alpha, "nodes": nodes, "cases": reports });
            Ok(o)
        }
        other => Err(unknown_which(ctx.experiment, other, "leibman, cl")),
    }
}

fn weyl(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let [t2, t1, t0] = cfg.theta.unwrap_or([2f64.sqrt() - 1.0, 0.0, 0.0]);
    let ladder = cfg.ladder_or(&[1 << 16]);
    let mut rows = Vec::new();
    let mut o = Outcome::new(Value::Null);
    for &n in &ladder {
        let w = weyl_sum_average(t2, t1, t0, n as u64)?;
        let w4 = weyl_sum_average(t2, t1, t0, 4 * n as u64)?;
        rows.push(json!({ "N": n, "average": value(&w), "modulus": w.norm(), "modulus_at_4N": w4.norm() }));
        o.records.push(ctx.record(n, 0, w, None));
    }
    if let Some(threshold) = cfg.threshold {
        let last = rows
            .last()
            .and_then(|r| r["modulus"].as_f64())
            .unwrap_or(f64::INFINITY);
        o = o.verdict("final_modulus", last <= threshold);
    }
    o.results = json!({ "theta": [t2, t1, t0], "ladder": rows });
    Ok(o)
}
