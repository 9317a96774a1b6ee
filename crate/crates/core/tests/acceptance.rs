//! Acceptance criteria 1-9.  Runs without the test harness so every line is
//! printed; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use interactions::bimodule::{BimoduleX, SweepPlan};
use interactions::checklist::{self, ids, Command, RunOptions, Status};
use interactions::covrep::CovariantRep;
use interactions::fdstar::{AlgebraDescriptor, Element};
use interactions::fixtures;
use interactions::gencorr::{check_crossed_product, corner_tro, ConcreteTRO, GenCorrespondence};
use interactions::interaction::{derive_from_partial_isometry, from_endo_transfer, verify_interaction, Interaction, SolutionChoice};
use interactions::linalg::{self, re, CMat, C64};
use interactions::posmap::LinMap;
use interactions::problem::{Problem, Source};
use interactions::sampling::{gaussian, random_element, seeded};

/// Absolute residual bound for identities.
const TOL: f64 = 1e-9;
/// Relative bound for norm comparisons.
const NORM_REL: f64 = 1e-8;
/// Smallest admissible nondegeneracy gate for the flip representation.
const GATE_MIN: f64 = 0.999;
/// Lowest admissible Choi eigenvalue.
const CHOI_FLOOR: f64 = -1e-9;
/// Multiplicative slack in norm inequalities.
const SLACK: f64 = 1e-9;
const NORM_SAMPLES: usize = 200;
const CS_SAMPLES: usize = 100;
const SEED: u64 = 7;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e<T>(r: interactions::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn identity_m2() -> Interaction {
    fixtures::identity(&AlgebraDescriptor::full(2).unwrap())
}

fn swap() -> Interaction {
    let (a, l) = fixtures::swap_pair();
    from_endo_transfer(&a, &l, TOL).unwrap()
}

/// `(name, interaction)` for the small fixtures used in several criteria.
fn fixture_set() -> Vec<(&'static str, Interaction)> {
    vec![("flip", fixtures::flip()), ("identity M2", identity_m2()), ("swap", swap()), ("flip ⊗ M2", fixtures::flip().amplified(2).unwrap())]
}

fn c1_flip_end_to_end() -> Outcome {
    let p = e(Problem::load(fixture("flip.json")))?;
    let report = checklist::run(&p, &RunOptions::for_problem(&p, Command::Report, None, TOL));
    ensure(report.checks.len() == ids::ALL.len(), "checklist incomplete")?;
    for (id, r) in &report.checks {
        match r.status {
            Status::Pass => {}
            Status::Skipped if id == ids::CROSSED_PRODUCT && r.reason.is_some() => {}
            _ => return Err(format!("{id} is {:?}: {:?}", r.status, r.reason)),
        }
    }

    let x = e(BimoduleX::build(&fixtures::flip()))?;
    let rep = e(CovariantRep::build(&x))?;
    let cov = rep.covariance();
    ensure(cov.covariance_v <= TOL && cov.covariance_h <= TOL, format!("covariance {cov:?}"))?;
    let nd = e(rep.nondegeneracy())?;
    ensure(nd.gates.smallest() >= GATE_MIN, format!("gate {}", nd.gates.smallest()))?;

    // hand model on M2: π(a) = diag(a1, a2), S = e12, V(a) = a2·1, H(a) = a1·1
    let pi = |a1: f64, a2: f64| CMat::from_row_slice(2, 2, &[re(a1), re(0.0), re(0.0), re(a2)]);
    let s = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
    let mut model: f64 = 0.0;
    for (a1, a2) in [(1.0, 0.0), (0.0, 1.0)] {
        let lhs = &s * pi(a1, a2) * s.adjoint() - pi(a2, a2) * &s * s.adjoint();
        let rhs = s.adjoint() * pi(a1, a2) * &s - pi(a1, a1) * s.adjoint() * &s;
        model = model.max(linalg::op_norm(&lhs)).max(linalg::op_norm(&rhs));
    }
    ensure(model == 0.0, "hand model is not covariant")?;
    let fit =
        linalg::op_norm(&(rep.s() - &s)).max(linalg::op_norm(&(&rep.pi_basis()[0] - pi(1.0, 0.0)))).max(linalg::op_norm(&(&rep.pi_basis()[1] - pi(0.0, 1.0))));
    ensure(fit <= TOL, format!("representation differs from the M2 model by {fit:.2e}"))?;
    Ok(format!("32 pass, crossed product n/a; covariance {:.1e}, gate {:.4}", cov.worst(), nd.gates.smallest()))
}

fn random_terms(desc: &AlgebraDescriptor, rng: &mut interactions::sampling::CheckRng) -> Vec<(Element, Element)> {
    let k = 1 + (gaussian(rng).re.abs() * 2.0) as usize % 3;
    (0..k).map(|_| (random_element(desc, rng), random_element(desc, rng))).collect()
}

fn c2_norm_formula() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    let cases = [("identity M2", identity_m2()), ("flip", fixtures::flip()), ("flip ⊗ M2", fixtures::flip().amplified(2).unwrap())];
    for (name, inter) in &cases {
        let x = e(BimoduleX::build(inter))?;
        let desc = inter.descriptor();
        let mut rng = seeded(SEED);
        for _ in 0..NORM_SAMPLES {
            let terms = random_terms(desc, &mut rng);
            let c = e(x.norm_two_ways(&terms))?;
            let gap = c.max_relative_gap();
            ensure(gap <= NORM_REL, format!("{name}: norms {c:?}"))?;
            worst = worst.max(gap);
            // each pair (a, b) is the tensor a*⊗b; X ≅ A through a*⊗b ↦ a*b for the
            // identity and X ≅ ℂ through conj(a1) b2 for the flip
            let expected = match *name {
                "identity M2" => Some(terms.iter().fold(desc.zero(), |s, (a, b)| &s + &(&a.adjoint() * b)).op_norm()),
                "flip" => Some(terms.iter().map(|(a, b)| a.coords()[0].conj() * b.coords()[1]).sum::<C64>().norm()),
                _ => None,
            };
            if let Some(v) = expected {
                let rel = (c.gram_right - v).abs() / v.max(1.0);
                ensure(rel <= NORM_REL, format!("{name}: gram norm {} vs oracle {v}", c.gram_right))?;
                oracle = oracle.max(rel);
            }
        }
    }
    Ok(format!("worst pairwise gap {worst:.1e}, oracle gap {oracle:.1e}"))
}

fn maps_of(p: &Problem) -> Option<(LinMap, LinMap)> {
    match &p.source {
        Source::Maps { v, h } => Some((v.clone(), h.clone())),
        Source::EndoTransfer { alpha, l } => Some((alpha.clone(), l.clone())),
        Source::PartialIsometry(d) => {
            derive_from_partial_isometry(d, &SolutionChoice::NearestIdentity, TOL).ok().map(|d| (d.interaction.v().clone(), d.interaction.h().clone()))
        }
    }
}

fn c3_choi_certificate() -> Outcome {
    let mut accepted = 0;
    let mut lowest = f64::INFINITY;
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture("")).unwrap().map(|d| d.unwrap().path()).collect();
    files.sort();
    for path in files.iter().filter(|p| p.extension().is_some_and(|x| x == "json") && !p.to_string_lossy().contains("golden")) {
        let Ok(p) = Problem::load(path) else { continue };
        let Some((v, h)) = maps_of(&p) else { continue };
        if !e(verify_interaction(&v, &h, TOL))?.passed() {
            continue;
        }
        for n in [1, 2] {
            let (va, ha) = (v.amplify(n), h.amplify(n));
            let m = va.choi().min_eigenvalue().min(ha.choi().min_eigenvalue());
            ensure(m >= CHOI_FLOOR, format!("{}: Choi eigenvalue {m}", path.display()))?;
            lowest = lowest.min(m);
        }
        accepted += 1;
    }
    ensure(accepted >= 4, format!("only {accepted} accepted fixtures"))?;

    let t = fixtures::transpose_map();
    let r = e(verify_interaction(&t, &t, TOL))?;
    ensure(!r.passed(), "transpose pair accepted")?;
    let c = r.get(ids::V_MULT).ok_or("no multiplicativity check")?;
    let labels = c.witness.as_ref().map(|w| w.labels.clone()).unwrap_or_default();
    ensure(!c.passed && labels == ["e(1,2)", "e(2,1)"], format!("witness {labels:?}"))?;
    ensure(t.choi().min_eigenvalue() < CHOI_FLOOR, "transpose has a positive Choi matrix")?;
    Ok(format!("{accepted} accepted fixtures, lowest Choi eigenvalue {lowest:.1e}; transpose rejected at ({})", labels.join(", ")))
}

fn c4_cauchy_schwarz() -> Outcome {
    let mut cs: f64 = 0.0;
    let mut bound: f64 = 0.0;
    for (name, inter) in fixture_set() {
        let x = e(BimoduleX::build(&inter))?;
        let mut rng = seeded(SEED);
        let k_basis = x.basic_h().k_basis();
        for _ in 0..CS_SAMPLES {
            let xi = x.random_pretensor(&mut rng);
            let eta = x.random_pretensor(&mut rng);
            for f in [BimoduleX::inner_r, BimoduleX::inner_l] {
                let (xx, xy, yy) = (f(&x, &xi, &xi), f(&x, &xi, &eta), f(&x, &eta, &eta));
                let diff = &yy * re(linalg::op_norm(&xx)) - xy.adjoint() * &xy;
                let scale = linalg::op_norm(&xx) * linalg::op_norm(&yy);
                let m = -linalg::min_eigenvalue(&diff) / scale.max(1.0);
                ensure(m <= TOL, format!("{name}: Cauchy-Schwarz defect {m:.2e}"))?;
                cs = cs.max(m);
            }
            let mut k = CMat::zeros(x.basic_h().rank(), x.basic_h().rank());
            for b in &k_basis {
                k += b * gaussian(&mut rng);
            }
            let (xi, eta) = (x.random_class(&mut rng), x.random_class(&mut rng));
            let lhs = linalg::op_norm(&x.inner_r(&xi, &e(x.right_act(&eta, &k))?));
            let rhs = x.norm(&xi) * x.norm(&eta) * linalg::op_norm(&k);
            ensure(lhs <= (1.0 + SLACK) * rhs + 1e-14, format!("{name}: {lhs} > {rhs}"))?;
            bound = bound.max(lhs / rhs.max(f64::MIN_POSITIVE));
        }
    }
    Ok(format!("worst CS defect {cs:.1e}, worst bound ratio {bound:.9}"))
}

fn c5_bimodule_laws() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, inter) in fixture_set() {
        let dim = inter.descriptor().dim();
        let plan = SweepPlan::for_dim(dim, 1, SEED);
        ensure(plan.full, format!("{name}: dimension {dim} not swept"))?;
        let x = e(BimoduleX::build(&inter))?;
        let parts = [
            ("tensor sliding", x.tensor_sliding()),
            ("right module", e(x.right_module(&plan))?),
            ("compatibility", e(x.compatibility(&plan))?),
            ("ternary", e(x.ternary_formula(&plan))?),
            ("coefficient sliding", x.coefficient_sliding(&plan)),
        ];
        for (law, r) in parts {
            ensure(r <= TOL, format!("{name}: {law} residual {r:.2e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("worst residual {worst:.1e} over full basis sweeps"))
}

fn c6_round_trip() -> Outcome {
    let rep = e(CovariantRep::build(&e(BimoduleX::build(&fixtures::flip()))?))?;
    let rt = e(rep.round_trip())?;
    ensure(rt.v_distance <= TOL && rt.h_distance <= TOL, format!("{rt:?}"))?;
    // and from the M2 model directly
    let d = e(derive_from_partial_isometry(&fixtures::flip_partial_isometry(), &SolutionChoice::NearestIdentity, TOL))?;
    let (v, h) = fixtures::flip_maps();
    let direct = d.interaction.v().basis_distance(&v).max(d.interaction.h().basis_distance(&h));
    ensure(direct <= TOL, format!("M2 model derivation off by {direct:.2e}"))?;
    Ok(format!("V {:.1e}, H {:.1e}; M2 model {direct:.1e}", rt.v_distance, rt.h_distance))
}

fn c7_crossed_product() -> Outcome {
    let (alpha, l) = fixtures::swap_pair();
    let mut worst: f64 = 0.0;
    for n in [1, 2] {
        let (a, t) = (alpha.amplify(n), l.amplify(n));
        let inter = e(from_endo_transfer(&a, &t, TOL))?;
        let r = e(check_crossed_product(&a, &t, &e(BimoduleX::build(&inter))?))?;
        ensure(r.worst() <= TOL, format!("n = {n}: {r:?}"))?;
        worst = worst.max(r.worst());
    }
    Ok(format!("density, isometry, bimodule and ternary ≤ {worst:.1e} for n = 1, 2"))
}

fn first_row_m3() -> (ConcreteTRO, AlgebraDescriptor, Vec<Element>) {
    let m3 = AlgebraDescriptor::full(3).unwrap();
    let span: Vec<Element> = (0..3).map(|q| m3.matrix_unit(m3.index(0, 0, q))).collect();
    let a = AlgebraDescriptor::new(vec![1, 2]).unwrap();
    let embed = (0..a.dim())
        .map(|k| {
            let (b, p, q) = a.locate(k);
            m3.matrix_unit(m3.index(0, p + b, q + b))
        })
        .collect();
    (ConcreteTRO::new(&m3, &span, TOL).unwrap(), a, embed)
}

fn full_m2() -> (ConcreteTRO, AlgebraDescriptor, Vec<Element>) {
    let m2 = AlgebraDescriptor::full(2).unwrap();
    (ConcreteTRO::new(&m2, &m2.basis(), TOL).unwrap(), m2.clone(), m2.basis())
}

fn c8_tro_layer() -> Outcome {
    let mut comm: f64 = 0.0;
    let mut cube: f64 = 0.0;
    let mut classical: f64 = 0.0;
    let mut classical_count = 0;
    for (name, (tro, a, embed)) in [("corner", corner_tro()), ("first row of M3", first_row_m3()), ("M2", full_m2())] {
        ensure(tro.dim() <= 4, format!("{name} too large"))?;
        let g = e(GenCorrespondence::from_concrete(&tro, &a, &embed, TOL))?;
        let c = g.commutation();
        ensure(c <= TOL, format!("{name}: commutation {c:.2e}"))?;
        comm = comm.max(c);
        let q = g.cube_identity(50, SEED);
        ensure(q <= NORM_REL, format!("{name}: cube identity {q:.2e}"))?;
        cube = cube.max(q);
        // direct check in the ambient algebra: ‖ξξ*ξ‖ = ‖ξ‖³
        let basis = tro.space().elements();
        let mut rng = seeded(SEED);
        for _ in 0..50 {
            let xi = basis.iter().fold(tro.space().descriptor().zero(), |s, b| &s + &b.scale(gaussian(&mut rng)));
            let n = xi.op_norm();
            let rel = ((&(&xi * &xi.adjoint()) * &xi).op_norm() - n.powi(3)).abs() / n.powi(3).max(1e-300);
            ensure(rel <= NORM_REL, format!("{name}: ambient cube {rel:.2e}"))?;
        }
        if let Some(r) = g.classical_compacts() {
            ensure(r <= TOL, format!("{name}: classical identity {r:.2e}"))?;
            classical = classical.max(r);
            classical_count += 1;
        }
    }
    ensure(classical_count >= 2, "classical mode not exercised")?;
    Ok(format!("commutation {comm:.1e}, cube {cube:.1e}, classical {classical:.1e} on {classical_count} TROs"))
}

fn c9_determinism() -> Outcome {
    let p = e(Problem::load(fixture("flip.json")))?;
    let mut opts = RunOptions::for_problem(&p, Command::Report, None, TOL);
    opts.amplify = 2;
    opts.samples = 50;
    opts.seed = SEED;
    let a = checklist::run(&p, &opts).to_json();
    let b = checklist::run(&p, &opts).to_json();
    ensure(a == b, "fuzz reports differ between runs")?;
    ensure(checklist::run(&p, &opts).passed(), "amplified flip fails")?;
    let report = checklist::run(&p, &RunOptions::for_problem(&p, Command::Report, None, TOL)).to_json();
    let golden = std::fs::read_to_string(fixture("flip_report.golden.json")).map_err(|e| e.to_string())?;
    ensure(report == golden, "flip report differs from the golden file")?;
    Ok(format!("fuzz n=2 identical across runs ({} bytes); golden matches", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flip fixture end to end", c1_flip_end_to_end),
        ("norm formula agreement", c2_norm_formula),
        ("Choi certificate and transpose witness", c3_choi_certificate),
        ("Cauchy-Schwarz and the right action bound", c4_cauchy_schwarz),
        ("Hilbert bimodule laws", c5_bimodule_laws),
        ("partial isometry round trip", c6_round_trip),
        ("crossed product correspondence", c7_crossed_product),
        ("TRO layer", c8_tro_layer),
        ("determinism and golden report", c9_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} PASS  {name}: {d} [{secs:.2}s]", k + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {d} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
