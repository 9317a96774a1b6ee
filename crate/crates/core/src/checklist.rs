//! The full list of checks run against a problem, and the JSON report.
//!
//! Every id in [`ids::ALL`] appears exactly once in a report, with status
//! `pass`, `fail` or `skipped` (skips carry a reason).  Keys are sorted and
//! numbers are rounded to ten significant digits, with magnitudes below
//! `1e-14` written as zero, so reports are byte-stable for a fixed seed.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::bimodule::{BimoduleX, SweepPlan};
use crate::covrep::CovariantRep;
use crate::error::{Error, Result};
use crate::fdstar::generated_subalgebra;
use crate::gencorr::{check_crossed_product, GenCorrespondence, Side};
use crate::interaction::{self, ids as axiom_ids, AxiomReport, Interaction, SolutionChoice, Witness};
use crate::linalg::{self, CMat};
use crate::posmap::LinMap;
use crate::problem::{Problem, Source};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 7;
/// Threshold for relative comparisons of norms, which pass through a square root.
pub const NORM_REL_TOL: f64 = 1e-8;

pub mod ids {
    pub const RANGE_PROJECTION: &str = "commutation.range_projection";
    pub const REGULAR_COMPOSITION: &str = "interaction.regular_composition";
    pub const CONDITIONAL_EXPECTATIONS: &str = "interaction.conditional_expectations";
    pub const INVERSE_ISOMORPHISMS: &str = "interaction.inverse_isomorphisms";
    pub const ISOMETRIC_COMPRESSION: &str = "covrep.isometric_compression";
    pub const COMPRESSION_NORM: &str = "covrep.compression_norm";
    pub const POSITIVE: &str = "axiom.positive";
    pub const VHV: &str = "axiom.vhv";
    pub const HVH: &str = "axiom.hvh";
    pub const V_MULT: &str = "axiom.v_multiplicative";
    pub const H_MULT: &str = "axiom.h_multiplicative";
    pub const COMPLETELY_POSITIVE: &str = "maps.completely_positive";
    pub const NONDEGENERATE: &str = "covrep.nondegenerate";
    pub const POSITIVE_INNER: &str = "bimodule.positive_inner_products";
    pub const CAUCHY_SCHWARZ: &str = "bimodule.cauchy_schwarz";
    pub const NORM_FORMULA: &str = "bimodule.norm_formula";
    pub const TENSOR_SLIDING: &str = "bimodule.tensor_sliding";
    pub const RIGHT_ACTION_BOUND: &str = "bimodule.right_action_bound";
    pub const MODULE_CONTRACTION: &str = "bimodule.module_contraction";
    pub const RIGHT_MODULE: &str = "bimodule.right_module";
    pub const COMPATIBILITY: &str = "bimodule.compatibility";
    pub const TERNARY: &str = "bimodule.ternary";
    pub const FULLNESS: &str = "bimodule.fullness";
    pub const COEFFICIENT_SLIDING: &str = "bimodule.coefficient_sliding";
    pub const UNIT_PROJECTION: &str = "covrep.unit_projection";
    pub const COVARIANCE: &str = "covrep.covariance";
    pub const FAITHFUL_EXTENSION: &str = "covrep.faithful_extension";
    pub const GENERALIZED_CORRESPONDENCE: &str = "tro.generalized_correspondence";
    pub const LEFT_RIGHT_COMMUTE: &str = "tro.left_right_commute";
    pub const THETA_ADJOINT: &str = "tro.theta_adjoint";
    pub const CLASSICAL_COMPACTS: &str = "tro.classical_compacts";
    pub const REDUNDANCIES: &str = "tro.redundancies";
    pub const CROSSED_PRODUCT: &str = "tro.crossed_product";

    pub const AXIOMS: [&str; 5] = [POSITIVE, VHV, HVH, V_MULT, H_MULT];

    pub const ALL: [&str; 33] = [
        RANGE_PROJECTION,
        REGULAR_COMPOSITION,
        CONDITIONAL_EXPECTATIONS,
        INVERSE_ISOMORPHISMS,
        ISOMETRIC_COMPRESSION,
        COMPRESSION_NORM,
        POSITIVE,
        VHV,
        HVH,
        V_MULT,
        H_MULT,
        COMPLETELY_POSITIVE,
        NONDEGENERATE,
        POSITIVE_INNER,
        CAUCHY_SCHWARZ,
        NORM_FORMULA,
        TENSOR_SLIDING,
        RIGHT_ACTION_BOUND,
        MODULE_CONTRACTION,
        RIGHT_MODULE,
        COMPATIBILITY,
        TERNARY,
        FULLNESS,
        COEFFICIENT_SLIDING,
        UNIT_PROJECTION,
        COVARIANCE,
        FAITHFUL_EXTENSION,
        GENERALIZED_CORRESPONDENCE,
        LEFT_RIGHT_COMMUTE,
        THETA_ADJOINT,
        CLASSICAL_COMPACTS,
        REDUNDANCIES,
        CROSSED_PRODUCT,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Axioms and complete positivity only.
    Verify,
    /// Everything.
    Report,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub command: Command,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub amplify: usize,
}

impl RunOptions {
    /// Options for `problem`, falling back to its own settings and then the defaults.
    pub fn for_problem(problem: &Problem, command: Command, tol: Option<f64>, default_tol: f64) -> RunOptions {
        RunOptions {
            command,
            tol: tol.or(problem.tolerance).unwrap_or(default_tol),
            samples: problem.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: problem.seed.unwrap_or(DEFAULT_SEED),
            amplify: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    AtMost,
    Above,
}

#[derive(Clone, Debug)]
pub struct Part {
    pub value: f64,
    pub threshold: f64,
    pub rule: Rule,
}

impl Part {
    pub fn at_most(value: f64, threshold: f64) -> Part {
        Part { value, threshold, rule: Rule::AtMost }
    }

    pub fn above(value: f64, threshold: f64) -> Part {
        Part { value, threshold, rule: Rule::Above }
    }

    pub fn ok(&self) -> bool {
        match self.rule {
            Rule::AtMost => self.value <= self.threshold,
            Rule::Above => self.value > self.threshold,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Record {
    pub status: Status,
    pub parts: BTreeMap<String, Part>,
    pub witness: Option<Witness>,
    pub reason: Option<String>,
    pub detail: Option<Value>,
}

impl Record {
    /// Largest value among the `at most` parts.
    pub fn residual(&self) -> Option<f64> {
        self.parts.values().filter(|p| p.rule == Rule::AtMost).map(|p| p.value).reduce(f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub checks: BTreeMap<String, Record>,
    pub environment: Value,
    pub construction: Value,
}

/// Round to ten significant digits; magnitudes below `1e-14` become zero.
pub fn tidy(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        });
    }
    if x.abs() < 1e-14 {
        return json!(0.0);
    }
    let r: f64 = format!("{x:.9e}").parse().unwrap();
    json!(r)
}

/// Matrix as nested `[re, im]` pairs, tidied.
pub fn matrix_json(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!([tidy(m[(i, j)].re), tidy(m[(i, j)].im)])).collect())).collect())
}

/// Recursively tidy every number in a JSON value.
pub fn tidy_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => tidy(x),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(tidy_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, tidy_value(v))).collect()),
        other => other,
    }
}

impl Report {
    pub fn get(&self, id: &str) -> Option<&Record> {
        self.checks.get(id)
    }

    pub fn construction_ok(&self) -> bool {
        self.construction.get("status").and_then(Value::as_str) == Some("ok")
    }

    /// No failing check and the construction succeeded.
    pub fn passed(&self) -> bool {
        self.construction_ok() && self.checks.values().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, r)| r.status == Status::Fail).map(|(k, _)| k.as_str()).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_value(&self) -> Value {
        let mut checks = Map::new();
        for (id, r) in &self.checks {
            let mut o = Map::new();
            o.insert("status".into(), json!(r.status.as_str()));
            if let Some(x) = r.residual() {
                o.insert("residual".into(), tidy(x));
            }
            if !r.parts.is_empty() {
                let parts: Map<String, Value> = r
                    .parts
                    .iter()
                    .map(|(k, p)| {
                        let rule = match p.rule {
                            Rule::AtMost => "at_most",
                            Rule::Above => "above",
                        };
                        (k.clone(), json!({"value": tidy(p.value), "threshold": tidy(p.threshold), "rule": rule, "ok": p.ok()}))
                    })
                    .collect();
                o.insert("parts".into(), Value::Object(parts));
            }
            if let Some(w) = &r.witness {
                o.insert("witness".into(), json!({"elements": w.labels, "note": w.note}));
            }
            if let Some(reason) = &r.reason {
                o.insert("reason".into(), json!(reason));
            }
            if let Some(d) = &r.detail {
                o.insert("detail".into(), tidy_value(d.clone()));
            }
            checks.insert(id.clone(), Value::Object(o));
        }
        let count = |s: Status| self.checks.values().filter(|r| r.status == s).count();
        json!({
            "checks": checks,
            "construction": tidy_value(self.construction.clone()),
            "environment": tidy_value(self.environment.clone()),
            "passed": self.passed(),
            "summary": {"pass": count(Status::Pass), "fail": count(Status::Fail), "skipped": count(Status::Skipped)},
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).unwrap() + "\n"
    }

    /// One line per check, for humans.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for (id, r) in &self.checks {
            let res = r.residual().map(|x| format!(" {x:.3e}")).unwrap_or_default();
            let why = r.reason.as_ref().map(|s| format!(" ({s})")).unwrap_or_default();
            out.push_str(&format!("{:<8}{id}{res}{why}\n", r.status.as_str()));
        }
        if !self.construction_ok() {
            out.push_str(&format!("construction failed: {}\n", self.construction["message"].as_str().unwrap_or("")));
        }
        out
    }
}

struct Builder {
    tol: f64,
    checks: BTreeMap<String, Record>,
}

impl Builder {
    fn put(&mut self, id: &str, parts: Vec<(&str, Part)>, detail: Option<Value>) {
        let parts: BTreeMap<String, Part> = parts.into_iter().map(|(k, p)| (k.to_string(), p)).collect();
        let status = if parts.values().all(Part::ok) { Status::Pass } else { Status::Fail };
        self.checks.insert(id.into(), Record { status, parts, witness: None, reason: None, detail });
    }

    fn resid(&mut self, id: &str, value: f64) {
        let tol = self.tol;
        self.put(id, vec![("residual", Part::at_most(value, tol))], None);
    }

    fn skip(&mut self, id: &str, reason: &str) {
        self.checks.entry(id.into()).or_insert(Record {
            status: Status::Skipped,
            parts: BTreeMap::new(),
            witness: None,
            reason: Some(reason.into()),
            detail: None,
        });
    }

    fn fail(&mut self, id: &str, err: &Error) {
        self.checks.insert(id.into(), Record { status: Status::Fail, parts: BTreeMap::new(), witness: None, reason: Some(err.to_string()), detail: None });
    }

    /// Run a check; an error marks it failed with the error as reason.
    fn run(&mut self, id: &str, f: impl FnOnce(&mut Builder) -> Result<()>) {
        if let Err(e) = f(self) {
            self.fail(id, &e);
        }
    }

    fn axioms(&mut self, report: &AxiomReport) {
        for id in ids::AXIOMS {
            let c = report.get(id).expect("axiom report covers every axiom");
            self.resid(id, c.residual);
            if let Some(r) = self.checks.get_mut(id) {
                r.witness = c.witness.clone();
            }
        }
        let regular = report.get(axiom_ids::REGULAR_V).unwrap().residual.max(report.get(axiom_ids::REGULAR_H).unwrap().residual);
        self.resid(ids::REGULAR_COMPOSITION, regular);
    }

    fn complete_positivity(&mut self, v: &LinMap, h: &LinMap) {
        let (cv, ch) = (v.choi(), h.choi());
        let tol = self.tol;
        self.put(
            ids::COMPLETELY_POSITIVE,
            vec![("v_negativity", Part::at_most(cv.negativity(), tol)), ("h_negativity", Part::at_most(ch.negativity(), tol))],
            Some(json!({"v_choi_min_eigenvalue": cv.min_eigenvalue(), "h_choi_min_eigenvalue": ch.min_eigenvalue()})),
        );
    }
}

struct Built {
    maps: Option<(LinMap, LinMap)>,
    axioms: Option<AxiomReport>,
    interaction: Option<Interaction>,
    endo: Option<(LinMap, LinMap)>,
    construction: Value,
}

fn construct(problem: &Problem, opts: &RunOptions) -> Built {
    let (tol, n) = (opts.tol, opts.amplify);
    let amp = |m: &LinMap| if n > 1 { m.amplify(n) } else { m.clone() };
    let ok = |extra: Value| {
        let mut c = json!({"status": "ok"});
        if let (Value::Object(c), Value::Object(e)) = (&mut c, extra) {
            c.extend(e);
        }
        c
    };
    let failed = |e: &Error| json!({"status": "failed", "message": e.to_string()});
    let from_report = |v: LinMap, h: LinMap, endo: Option<(LinMap, LinMap)>, construction: Value| -> Built {
        match interaction::verify_interaction(&v, &h, tol) {
            Ok(r) => {
                let inter = if r.passed() { Interaction::new(v.clone(), h.clone(), tol).ok() } else { None };
                Built { maps: Some((v, h)), axioms: Some(r), interaction: inter, endo, construction }
            }
            Err(e) => Built { maps: None, axioms: None, interaction: None, endo: None, construction: failed(&e) },
        }
    };
    match &problem.source {
        Source::Maps { v, h } => from_report(amp(v), amp(h), None, ok(json!({}))),
        Source::EndoTransfer { alpha, l } => {
            let (a, l) = (amp(alpha), amp(l));
            match interaction::from_endo_transfer(&a, &l, tol) {
                Ok(_) | Err(Error::AxiomsFailed(_)) => from_report(a.clone(), l.clone(), Some((a, l)), ok(json!({}))),
                Err(e) => {
                    let mut b = from_report(a, l, None, failed(&e));
                    b.interaction = None;
                    b
                }
            }
        }
        Source::PartialIsometry(data) => match interaction::derive_from_partial_isometry(data, &SolutionChoice::NearestIdentity, tol) {
            Ok(d) => {
                let extra = json!({"solve_residual": d.solve_residual, "gates": serde_json::to_value(&d.gates).unwrap()});
                let (v, h) = (amp(d.interaction.v()), amp(d.interaction.h()));
                from_report(v, h, None, ok(extra))
            }
            Err(Error::AxiomsFailed(r)) => Built { maps: None, axioms: Some(*r), interaction: None, endo: None, construction: ok(json!({})) },
            Err(e) => Built { maps: None, axioms: None, interaction: None, endo: None, construction: failed(&e) },
        },
    }
}

/// Run the checklist on `problem`.
pub fn run(problem: &Problem, opts: &RunOptions) -> Report {
    let built = construct(problem, opts);
    let mut b = Builder { tol: opts.tol, checks: BTreeMap::new() };
    if let Some(r) = &built.axioms {
        b.axioms(r);
    }
    if let Some((v, h)) = &built.maps {
        b.complete_positivity(v, h);
    }
    let desc = problem.algebra.amplified(opts.amplify.max(1));
    let plan = SweepPlan::for_dim(desc.dim(), opts.samples, opts.seed);
    let mut dims = json!({"blocks": desc.blocks(), "dim": desc.dim()});

    let skip_reason = if opts.command == Command::Verify {
        Some("not run by verify".to_string())
    } else if built.interaction.is_none() {
        Some(match built.construction.get("message").and_then(Value::as_str) {
            Some(m) => format!("construction failed: {m}"),
            None => "interaction axioms fail".to_string(),
        })
    } else {
        None
    };
    if let (None, Some(inter)) = (&skip_reason, &built.interaction) {
        full_checks(&mut b, inter, built.endo.as_ref(), &plan, &mut dims);
    }
    let reason = skip_reason.unwrap_or_else(|| "construction failed".into());
    for id in ids::ALL {
        b.skip(id, &reason);
    }
    let environment = json!({
        "command": match opts.command { Command::Verify => "verify", Command::Report => "report" },
        "mode": serde_json::to_value(problem.mode()).unwrap(),
        "name": problem.name,
        "seed": opts.seed,
        "tolerance": opts.tol,
        "samples": opts.samples,
        "amplify": opts.amplify,
        "full_sweeps": plan.full,
        "dims": dims,
    });
    Report { checks: b.checks, environment, construction: built.construction }
}

fn full_checks(b: &mut Builder, inter: &Interaction, endo: Option<&(LinMap, LinMap)>, plan: &SweepPlan, dims: &mut Value) {
    let tol = b.tol;
    b.run(ids::CONDITIONAL_EXPECTATIONS, |b| {
        let ev = inter.expectation_v()?;
        let eh = inter.expectation_h()?;
        let desc = inter.descriptor();
        let closed_v = generated_subalgebra(desc, &inter.range_v().elements(), tol)?.dim() == inter.range_v().dim();
        let closed_h = generated_subalgebra(desc, &inter.range_h().elements(), tol)?.dim() == inter.range_h().dim();
        b.put(
            ids::CONDITIONAL_EXPECTATIONS,
            vec![
                ("e_v", Part::at_most(ev.residuals().worst(), tol)),
                ("e_h", Part::at_most(eh.residuals().worst(), tol)),
                ("ranges_are_subalgebras", Part::at_most(if closed_v && closed_h { 0.0 } else { 1.0 }, 0.0)),
            ],
            None,
        );
        Ok(())
    });
    b.run(ids::INVERSE_ISOMORPHISMS, |b| {
        let r = inter.inverse_pair()?;
        b.resid(ids::INVERSE_ISOMORPHISMS, r.worst());
        Ok(())
    });

    let x = match BimoduleX::build(inter) {
        Ok(x) => x,
        Err(e) => {
            for id in
                ids::ALL.iter().filter(|id| id.starts_with("bimodule.") || id.starts_with("covrep.") || id.starts_with("tro.") || **id == ids::RANGE_PROJECTION)
            {
                b.fail(id, &e);
            }
            return;
        }
    };
    dims["x"] = json!(x.rank());
    dims["k_v"] = json!(x.basic_v().k_dim());
    dims["k_h"] = json!(x.basic_h().k_dim());
    bimodule_checks(b, &x, plan);

    match CovariantRep::build(&x) {
        Ok(rep) => {
            dims["representation"] = json!(rep.dim());
            covrep_checks(b, &rep, plan);
        }
        Err(e) => {
            for id in ids::ALL.iter().filter(|id| id.starts_with("covrep.") || **id == ids::RANGE_PROJECTION) {
                b.fail(id, &e);
            }
        }
    }

    match GenCorrespondence::from_bimodule(&x) {
        Ok(g) => tro_checks(b, &g, plan),
        Err(e) => {
            for id in ids::ALL.iter().filter(|id| id.starts_with("tro.") && **id != ids::CROSSED_PRODUCT) {
                b.fail(id, &e);
            }
        }
    }

    match endo {
        Some((alpha, l)) => b.run(ids::CROSSED_PRODUCT, |b| {
            let r = check_crossed_product(alpha, l, &x)?;
            b.put(
                ids::CROSSED_PRODUCT,
                vec![
                    ("density", Part::at_most(r.density, tol)),
                    ("isometry", Part::at_most(r.isometry, tol)),
                    ("bimodule", Part::at_most(r.bimodule, tol)),
                    ("ternary", Part::at_most(r.ternary, tol)),
                ],
                None,
            );
            Ok(())
        }),
        None => b.skip(ids::CROSSED_PRODUCT, "problem is not an endomorphism with a transfer operator"),
    }
}

fn bimodule_checks(b: &mut Builder, x: &BimoduleX, plan: &SweepPlan) {
    let tol = b.tol;
    let norm_tol = tol.max(NORM_REL_TOL);
    b.run(ids::POSITIVE_INNER, |b| {
        let s = x.two_seminorms()?;
        b.put(
            ids::POSITIVE_INNER,
            vec![
                ("negativity", Part::at_most(x.positive_inner_products(plan), tol)),
                ("seminorm_kernels", Part::at_most(s.cross_residual, tol)),
                ("seminorm_rank_gap", Part::at_most(s.rank_right.abs_diff(s.rank_left) as f64, 0.0)),
            ],
            Some(json!({"rank_right": s.rank_right, "rank_left": s.rank_left})),
        );
        Ok(())
    });
    b.resid(ids::CAUCHY_SCHWARZ, x.cauchy_schwarz(plan));
    b.run(ids::NORM_FORMULA, |b| {
        let r = x.norm_formula(plan)?;
        b.put(ids::NORM_FORMULA, vec![("relative_gap", Part::at_most(r, norm_tol))], None);
        Ok(())
    });
    b.resid(ids::TENSOR_SLIDING, x.tensor_sliding());
    b.resid(ids::RIGHT_ACTION_BOUND, x.right_action_bound(plan));
    b.resid(ids::MODULE_CONTRACTION, x.module_contraction(plan));
    b.run(ids::RIGHT_MODULE, |b| {
        let r = x.right_module(plan)?;
        b.resid(ids::RIGHT_MODULE, r);
        Ok(())
    });
    b.run(ids::COMPATIBILITY, |b| {
        let r = x.compatibility(plan)?;
        b.resid(ids::COMPATIBILITY, r);
        Ok(())
    });
    b.run(ids::TERNARY, |b| {
        let t = x.ternary_formula(plan)?;
        let p = x.presentation_independence(plan)?;
        b.put(ids::TERNARY, vec![("ternary", Part::at_most(t, tol)), ("presentation", Part::at_most(p, tol))], None);
        Ok(())
    });
    let f = x.fullness();
    b.put(
        ids::FULLNESS,
        vec![
            ("right_gap", Part::at_most(f.span_right.abs_diff(f.k_h_dim) as f64, 0.0)),
            ("left_gap", Part::at_most(f.span_left.abs_diff(f.k_v_dim) as f64, 0.0)),
        ],
        Some(serde_json::to_value(&f).unwrap()),
    );
    b.resid(ids::COEFFICIENT_SLIDING, x.coefficient_sliding(plan));
}

fn covrep_checks(b: &mut Builder, rep: &CovariantRep, plan: &SweepPlan) {
    let tol = b.tol;
    let cov = rep.covariance();
    b.put(
        ids::COVARIANCE,
        vec![("v_side", Part::at_most(cov.covariance_v, tol)), ("h_side", Part::at_most(cov.covariance_h, tol))],
        Some(json!({"dimension": rep.dim(), "x_dimension": rep.x_dim()})),
    );
    b.put(ids::RANGE_PROJECTION, vec![("v_side", Part::at_most(cov.commutation_v, tol)), ("h_side", Part::at_most(cov.commutation_h, tol))], None);
    b.run(ids::NONDEGENERATE, |b| {
        let nd = rep.nondegeneracy()?;
        b.put(
            ids::NONDEGENERATE,
            vec![("smallest_gate", Part::above(nd.gates.smallest(), tol)), ("implication", Part::at_most(if nd.implication_holds { 0.0 } else { 1.0 }, 0.0))],
            Some(serde_json::to_value(&nd.gates).unwrap()),
        );
        Ok(())
    });
    b.resid(ids::UNIT_PROJECTION, rep.unit_projection());
    let c = rep.compression(plan.samples.min(20), plan.seed);
    b.put(ids::ISOMETRIC_COMPRESSION, vec![("multiplicative", Part::at_most(c.multiplicative, tol)), ("isometric", Part::at_most(c.isometric, tol))], None);
    b.resid(ids::COMPRESSION_NORM, c.norm_identity);
    b.run(ids::FAITHFUL_EXTENSION, |b| {
        let f = rep.faithful_extension()?;
        let cov = f.rep().covariance();
        let nd = f.rep().nondegeneracy()?;
        b.put(
            ids::FAITHFUL_EXTENSION,
            vec![
                ("covariance", Part::at_most(cov.covariance_v.max(cov.covariance_h), tol)),
                ("injectivity", Part::above(f.injectivity(), tol)),
                ("smallest_gate", Part::above(nd.gates.smallest(), tol)),
            ],
            Some(json!({"dimension": f.rep().dim()})),
        );
        Ok(())
    });
}

fn tro_checks(b: &mut Builder, g: &GenCorrespondence, plan: &SweepPlan) {
    let tol = b.tol;
    let c = g.correspondence(plan);
    b.put(
        ids::GENERALIZED_CORRESPONDENCE,
        vec![
            ("left_sliding", Part::at_most(c.left_sliding, tol)),
            ("right_sliding", Part::at_most(c.right_sliding, tol)),
            ("homomorphisms", Part::at_most(c.homomorphisms, tol)),
        ],
        None,
    );
    let (kl, kr) = g.compact_spans();
    b.put(
        ids::LEFT_RIGHT_COMMUTE,
        vec![
            ("commutation", Part::at_most(g.commutation(), tol)),
            ("cube_identity", Part::at_most(g.cube_identity(plan.samples.min(20), plan.seed), tol.max(NORM_REL_TOL))),
        ],
        Some(json!({"k_left": kl.len(), "k_right": kr.len()})),
    );
    b.resid(ids::THETA_ADJOINT, g.theta_adjoint(plan));
    match g.classical_compacts() {
        Some(r) => b.resid(ids::CLASSICAL_COMPACTS, r),
        None => b.skip(ids::CLASSICAL_COMPACTS, "right inner products do not all lie in the image of A"),
    }
    let right = g.redundancies(Side::Right);
    let left = g.redundancies(Side::Left);
    let worst = right.redundancies.iter().chain(&left.redundancies).map(|r| r.residual).fold(0.0, f64::max);
    b.put(
        ids::REDUNDANCIES,
        vec![("residual", Part::at_most(worst, tol))],
        Some(json!({
            "right": {"dimension": right.redundancies.len(), "restricted": right.restricted.len(), "kernel_blocks": right.kernel_blocks},
            "left": {"dimension": left.redundancies.len(), "restricted": left.restricted.len(), "kernel_blocks": left.kernel_blocks},
        })),
    );
}

fn interaction_for(problem: &Problem, opts: &RunOptions) -> Result<Interaction> {
    let built = construct(problem, opts);
    if let Some(i) = built.interaction {
        return Ok(i);
    }
    match built.axioms {
        Some(r) if !r.passed() => Err(Error::AxiomsFailed(Box::new(r))),
        _ => Err(Error::Precondition(built.construction["message"].as_str().unwrap_or("construction failed").to_string())),
    }
}

/// Quotient dimension, Gram spectrum and null-space basis of the bimodule.
pub fn bimodule_dump(problem: &Problem, opts: &RunOptions) -> Result<Value> {
    let inter = interaction_for(problem, opts)?;
    let x = BimoduleX::build(&inter)?;
    let gram = x.gram();
    let (spectrum, _) = linalg::hermitian_eigen(&gram);
    let kernel = linalg::kernel(&gram, opts.tol);
    let kernel = matrix_json(&kernel.transpose());
    Ok(tidy_value(json!({
        "rank": x.rank(),
        "ambient_dimension": gram.nrows(),
        "gram_spectrum": spectrum,
        "kernel_basis": kernel,
        "k_h_dim": x.basic_h().k_dim(),
        "k_v_dim": x.basic_v().k_dim(),
        "quotient_gap": x.quotient().gap,
    })))
}

/// `π` on the matrix units, `S`, and the residual table of the linking representation.
pub fn covrep_dump(problem: &Problem, opts: &RunOptions) -> Result<Value> {
    let inter = interaction_for(problem, opts)?;
    let x = BimoduleX::build(&inter)?;
    let rep = CovariantRep::build(&x)?;
    let desc = inter.descriptor();
    let pi: Map<String, Value> = rep.pi_basis().iter().enumerate().map(|(k, p)| (desc.label(k), matrix_json(p))).collect();
    let nd = rep.nondegeneracy()?;
    let rt = rep.round_trip()?;
    Ok(tidy_value(json!({
        "dimensions": {"x": rep.x_dim(), "k_h": rep.dim() - rep.x_dim(), "total": rep.dim()},
        "pi": pi,
        "S": matrix_json(rep.s()),
        "residuals": {
            "covariance": serde_json::to_value(rep.covariance()).unwrap(),
            "unit_projection": rep.unit_projection(),
            "round_trip": serde_json::to_value(&rt).unwrap(),
        },
        "nondegeneracy": serde_json::to_value(&nd).unwrap(),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flip_problem() -> Problem {
        Problem::from_json(r#"{"blocks": [1, 1], "V": [[0, 1], [0, 1]], "H": [[1, 0], [1, 0]], "samples": 20}"#).unwrap()
    }

    #[test]
    fn flip_report_passes_every_check() {
        let p = flip_problem();
        let r = run(&p, &RunOptions::for_problem(&p, Command::Report, None, 1e-9));
        assert_eq!(r.checks.len(), ids::ALL.len());
        assert!(r.passed(), "{}", r.summary_text());
        let skipped: Vec<&str> = r.checks.iter().filter(|(_, c)| c.status == Status::Skipped).map(|(k, _)| k.as_str()).collect();
        assert_eq!(skipped, vec![ids::CROSSED_PRODUCT]);
    }

    #[test]
    fn verify_skips_the_rest() {
        let p = flip_problem();
        let r = run(&p, &RunOptions::for_problem(&p, Command::Verify, None, 1e-9));
        assert!(r.passed());
        assert_eq!(r.get(ids::FULLNESS).unwrap().status, Status::Skipped);
        assert_eq!(r.get(ids::V_MULT).unwrap().status, Status::Pass);
    }

    #[test]
    fn tidy_rounds_and_snaps() {
        assert_eq!(tidy(3e-16), json!(0.0));
        assert_eq!(tidy(0.1 + 0.2), json!(0.3));
        assert_eq!(tidy(f64::INFINITY), json!("inf"));
    }
}
