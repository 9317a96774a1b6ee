//! Interactions `(V, H)`: pairs of positive maps with `VHV = V`, `HVH = H`,
//! `V` multiplicative against the range of `H` and vice versa.
//!
//! Besides the axiom checker this module builds interactions from an
//! endomorphism with a transfer operator, amplifies them to `M_n(A)`, and
//! recovers them from a concrete partial isometry.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fdstar::{generated_subalgebra, AlgebraDescriptor, Element, Subspace};
use crate::linalg::{self, CVec};
use crate::posmap::LinMap;
use crate::sampling;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Seed of the positivity falsifier used inside the axiom checker.
const POSITIVITY_SEED: u64 = 0x5eed_0001;
const POSITIVITY_TRIALS: usize = 24;

/// Counterexample attached to a failing check.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    #[serde(skip)]
    pub elements: Vec<Element>,
    pub labels: Vec<String>,
    pub note: String,
}

impl Witness {
    fn new(elements: Vec<Element>, note: impl Into<String>) -> Witness {
        let labels = elements.iter().map(describe).collect();
        Witness { elements, labels, note: note.into() }
    }
}

/// Short description of an element in terms of matrix units.
pub fn describe(x: &Element) -> String {
    let desc = x.descriptor();
    let c = x.coords();
    let terms: Vec<String> = (0..c.len())
        .filter(|&k| c[k].norm() > 1e-12)
        .map(|k| {
            let z = c[k];
            let label = desc.label(k);
            if (z - linalg::ONE).norm() < 1e-12 {
                label
            } else if z.im.abs() < 1e-12 {
                format!("{:.4}·{label}", z.re)
            } else {
                format!("({:.4}{:+.4}i)·{label}", z.re, z.im)
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub id: &'static str,
    pub residual: f64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub tol: f64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    fn push(&mut self, id: &'static str, residual: f64, witness: Option<Witness>) {
        let passed = residual <= self.tol;
        self.checks.push(AxiomCheck { id, residual, passed, witness: if passed { None } else { witness } });
    }
}

pub mod ids {
    pub const POSITIVE: &str = "axiom.positive";
    pub const VHV: &str = "axiom.vhv";
    pub const HVH: &str = "axiom.hvh";
    pub const V_MULT: &str = "axiom.v_multiplicative";
    pub const H_MULT: &str = "axiom.h_multiplicative";
    pub const REGULAR_V: &str = "regularity.v";
    pub const REGULAR_H: &str = "regularity.h";
}

/// Check every interaction axiom and report residuals separately.
pub fn verify_interaction(v: &LinMap, h: &LinMap, tol: f64) -> Result<AxiomReport> {
    if v.descriptor() != h.descriptor() {
        return Err(Error::ShapeMismatch(format!("V on {}, H on {}", v.descriptor(), h.descriptor())));
    }
    let desc = v.descriptor();
    let mut report = AxiomReport { tol, checks: Vec::new() };

    let mut rng = sampling::seeded(POSITIVITY_SEED);
    let mut pos = v.star_residual().max(h.star_residual());
    let mut pos_witness = None;
    for (name, t) in [("V", v), ("H", h)] {
        let c = t.positivity_certificate(POSITIVITY_TRIALS, &mut rng, tol);
        if c.worst_residual > pos {
            pos = c.worst_residual;
            pos_witness = c.witness.map(|w| Witness::new(vec![w], format!("{name} maps this positive element outside the positive cone")));
        }
    }
    report.push(ids::POSITIVE, pos, pos_witness);

    let basis = desc.basis();
    let (r, w) = worst_over(&basis, |e| (&v.apply(&h.apply(&v.apply(e))) - &v.apply(e)).op_norm());
    report.push(ids::VHV, r, w.map(|e| Witness::new(vec![e], "V(H(V(x))) differs from V(x)")));
    let (r, w) = worst_over(&basis, |e| (&h.apply(&v.apply(&h.apply(e))) - &h.apply(e)).op_norm());
    report.push(ids::HVH, r, w.map(|e| Witness::new(vec![e], "H(V(H(x))) differs from H(x)")));

    let range_h = h.range(tol);
    let range_v = v.range(tol);
    let (r, w) = multiplicativity(v, &range_h);
    report.push(ids::V_MULT, r, w);
    let (r, w) = multiplicativity(h, &range_v);
    report.push(ids::H_MULT, r, w);

    report.push(ids::REGULAR_V, v.compose(h)?.compose(v)?.basis_distance(v), None);
    report.push(ids::REGULAR_H, h.compose(v)?.compose(h)?.basis_distance(h), None);
    Ok(report)
}

fn worst_over(xs: &[Element], f: impl Fn(&Element) -> f64) -> (f64, Option<Element>) {
    let mut best = 0.0;
    let mut arg = None;
    for x in xs {
        let r = f(x);
        if r > best {
            best = r;
            arg = Some(x.clone());
        }
    }
    (best, arg)
}

/// Worst `‖T(xy) - T(x)T(y)‖` with `x` in the canonical basis of `range`,
/// `y` a matrix unit, both orders.  Ties in operator norm are broken by the
/// larger Hilbert-Schmidt defect, then by first occurrence.
fn multiplicativity(t: &LinMap, range: &Subspace) -> (f64, Option<Witness>) {
    let basis = t.descriptor().basis();
    let tbasis: Vec<Element> = basis.iter().map(|y| t.apply(y)).collect();
    let mut best: (f64, f64) = (0.0, 0.0);
    let mut witness = None;
    for x in range.elements() {
        let tx = t.apply(&x);
        for (y, ty) in basis.iter().zip(&tbasis) {
            for (p, q, tp, tq, order) in [(&x, y, &tx, ty, "xy"), (y, &x, ty, &tx, "yx")] {
                let d = &t.apply(&(p * q)) - &(tp * tq);
                let (r, f) = (d.op_norm(), d.hs_norm());
                let slack = 1e-12 * best.0.max(1.0);
                if r > best.0 + slack || ((r - best.0).abs() <= slack && f > best.1 + slack) {
                    best = (r, f);
                    let note = if order == "xy" {
                        "first element lies in the range; T(xy) differs from T(x)T(y)"
                    } else {
                        "first element lies in the range; T(yx) differs from T(y)T(x)"
                    };
                    witness = Some(Witness::new(vec![x.clone(), y.clone()], note));
                }
            }
        }
    }
    (best.0, witness)
}

/// A verified interaction together with its ranges.
#[derive(Clone, Debug)]
pub struct Interaction {
    v: LinMap,
    h: LinMap,
    tol: f64,
    range_v: Subspace,
    range_h: Subspace,
    report: AxiomReport,
}

impl Interaction {
    pub fn new(v: LinMap, h: LinMap, tol: f64) -> Result<Interaction> {
        let report = verify_interaction(&v, &h, tol)?;
        if !report.passed() {
            return Err(Error::AxiomsFailed(Box::new(report)));
        }
        let range_v = v.range(tol);
        let range_h = h.range(tol);
        Ok(Interaction { v, h, tol, range_v, range_h, report })
    }

    pub fn v(&self) -> &LinMap {
        &self.v
    }

    pub fn h(&self) -> &LinMap {
        &self.h
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        self.v.descriptor()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn range_v(&self) -> &Subspace {
        &self.range_v
    }

    pub fn range_h(&self) -> &Subspace {
        &self.range_h
    }

    pub fn report(&self) -> &AxiomReport {
        &self.report
    }

    /// `E_V = V∘H`, onto the range of `V`.
    pub fn expectation_v(&self) -> Result<CondExp> {
        CondExp::new(self.v.compose(&self.h)?, self.tol)
    }

    /// `E_H = H∘V`, onto the range of `H`.
    pub fn expectation_h(&self) -> Result<CondExp> {
        CondExp::new(self.h.compose(&self.v)?, self.tol)
    }

    /// Residuals of `V|H(A)` and `H|V(A)` being mutually inverse, and of
    /// `V = V∘E_H`, `H = H∘E_V`.
    pub fn inverse_pair(&self) -> Result<InverseReport> {
        let hv_on_h = self.range_h.elements().iter().map(|x| (&self.h.apply(&self.v.apply(x)) - x).op_norm()).fold(0.0, f64::max);
        let vh_on_v = self.range_v.elements().iter().map(|y| (&self.v.apply(&self.h.apply(y)) - y).op_norm()).fold(0.0, f64::max);
        let e_h = self.h.compose(&self.v)?;
        let e_v = self.v.compose(&self.h)?;
        let report = InverseReport {
            h_after_v_on_range_h: hv_on_h,
            v_after_h_on_range_v: vh_on_v,
            v_factorization: self.v.compose(&e_h)?.basis_distance(&self.v),
            h_factorization: self.h.compose(&e_v)?.basis_distance(&self.h),
        };
        if report.worst() > self.tol {
            return Err(Error::NotInverse(report.worst()));
        }
        Ok(report)
    }

    /// `(V_n, H_n)` on `M_n(A)`.
    pub fn amplified(&self, n: usize) -> Result<Interaction> {
        Interaction::new(self.v.amplify(n), self.h.amplify(n), self.tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseReport {
    pub h_after_v_on_range_h: f64,
    pub v_after_h_on_range_v: f64,
    pub v_factorization: f64,
    pub h_factorization: f64,
}

impl InverseReport {
    pub fn worst(&self) -> f64 {
        self.h_after_v_on_range_h.max(self.v_after_h_on_range_v).max(self.v_factorization).max(self.h_factorization)
    }
}

/// Conditional expectation onto its range: an idempotent, completely
/// positive, contractive map that is a bimodule map over its range.
#[derive(Clone, Debug)]
pub struct CondExp {
    map: LinMap,
    range: Subspace,
    residuals: CondExpResiduals,
}

#[derive(Clone, Debug, Serialize)]
pub struct CondExpResiduals {
    pub idempotence: f64,
    pub bimodularity: f64,
    pub complete_positivity: f64,
    /// `max(0, ‖E(1)‖ - 1)`
    pub contractivity: f64,
}

impl CondExpResiduals {
    pub fn worst(&self) -> f64 {
        self.idempotence.max(self.bimodularity).max(self.complete_positivity).max(self.contractivity)
    }
}

impl CondExp {
    pub fn new(map: LinMap, tol: f64) -> Result<CondExp> {
        let desc = map.descriptor().clone();
        let range = map.range(tol);
        let idempotence = map.compose(&map)?.basis_distance(&map);
        let mut bimodularity: f64 = 0.0;
        for a in desc.basis() {
            let ea = map.apply(&a);
            for b in range.elements() {
                bimodularity = bimodularity.max((&map.apply(&(&a * &b)) - &(&ea * &b)).op_norm()).max((&map.apply(&(&b * &a)) - &(&b * &ea)).op_norm());
            }
        }
        let cp = map.cp_certificate(tol);
        let residuals = CondExpResiduals { idempotence, bimodularity, complete_positivity: cp.residual, contractivity: (cp.unit_norm - 1.0).max(0.0) };
        if residuals.worst() > tol {
            return Err(Error::NotConditionalExpectation(format!("{residuals:?}")));
        }
        Ok(CondExp { map, range, residuals })
    }

    pub fn map(&self) -> &LinMap {
        &self.map
    }

    pub fn range(&self) -> &Subspace {
        &self.range
    }

    pub fn residuals(&self) -> &CondExpResiduals {
        &self.residuals
    }

    pub fn apply(&self, x: &Element) -> Element {
        self.map.apply(x)
    }
}

/// Build the interaction `(α, L)` from a *-endomorphism and a transfer
/// operator with `L(a α(b)) = L(a) b` and `L(1) = 1`.
pub fn from_endo_transfer(alpha: &LinMap, l: &LinMap, tol: f64) -> Result<Interaction> {
    if alpha.descriptor() != l.descriptor() {
        return Err(Error::ShapeMismatch(format!("α on {}, L on {}", alpha.descriptor(), l.descriptor())));
    }
    let desc = alpha.descriptor();
    let basis = desc.basis();
    let mut hom = alpha.star_residual();
    let mut transfer = 0.0;
    let mut transfer_at = (0, 0);
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            hom = f64::max(hom, (&alpha.apply(&(a * b)) - &(&alpha.apply(a) * &alpha.apply(b))).op_norm());
            let r = (&l.apply(&(a * &alpha.apply(b))) - &(&l.apply(a) * b)).op_norm();
            if r > transfer {
                transfer = r;
                transfer_at = (i, j);
            }
        }
    }
    if hom > tol {
        return Err(Error::EndoTransfer(format!("α is not a *-homomorphism (residual {hom:.3e})")));
    }
    if transfer > tol {
        return Err(Error::EndoTransfer(format!(
            "L(aα(b)) ≠ L(a)b at a = {}, b = {} (residual {transfer:.3e})",
            desc.label(transfer_at.0),
            desc.label(transfer_at.1)
        )));
    }
    let unital = (&l.apply(&desc.unit()) - &desc.unit()).op_norm();
    if unital > tol {
        return Err(Error::EndoTransfer(format!("L(1) ≠ 1 (residual {unital:.3e})")));
    }
    Interaction::new(alpha.clone(), l.clone(), tol)
}

/// A concrete realization: `A` sits inside `B` through `embed` (the images of
/// the matrix units of `A` under a *-homomorphism) and `S ∈ B` is a partial
/// isometry.
#[derive(Clone, Debug)]
pub struct PartialIsometryData {
    pub a: AlgebraDescriptor,
    pub b: AlgebraDescriptor,
    pub embed: Vec<Element>,
    pub s: Element,
}

/// How to pick `V(a)` when `b·SS* = S a S*` leaves part of `b` free.
///
/// The relations only fix `V(a)` modulo `{n ∈ A : n SS* = 0}` (and `H(a)`
/// modulo the annihilator of `S*S`), so a rule is needed.
#[derive(Clone, Debug)]
pub enum SolutionChoice {
    /// Solution closest to `a` itself: the unconstrained part of `a` is kept.
    NearestIdentity,
    /// Minimum-norm solution.
    MinimumNorm,
    /// Solution closest to the given pair of maps.
    NearestTo(LinMap, LinMap),
}

#[derive(Clone, Debug)]
pub struct DerivedInteraction {
    pub interaction: Interaction,
    /// Worst relative residual of the two linear solves.
    pub solve_residual: f64,
    pub gates: NondegeneracyGates,
}

/// Smallest singular values of `x ↦ xS` on `V(A)` and on the *-algebra it
/// generates, and of `x ↦ Sx` on `H(A)` and its *-algebra.  `None` means the
/// domain is zero.
#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyGates {
    pub right_on_range_v: Option<f64>,
    pub right_on_algebra_v: Option<f64>,
    pub left_on_range_h: Option<f64>,
    pub left_on_algebra_h: Option<f64>,
}

impl NondegeneracyGates {
    pub fn smallest(&self) -> f64 {
        [self.right_on_range_v, self.right_on_algebra_v, self.left_on_range_h, self.left_on_algebra_h].iter().flatten().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn nondegenerate(&self, tol: f64) -> bool {
        self.smallest() > tol
    }
}

/// Smallest singular value of a linear map defined on `domain ⊆ A`.
///
/// The domain carries the normalized trace of `A`; the codomain vectors are
/// compared in the Hilbert-Schmidt norm divided by `norm_sq`, the trace of the
/// relevant support projection.
pub fn injectivity_modulus(domain: &Subspace, norm_sq: f64, f: impl Fn(&Element) -> CVec) -> Option<f64> {
    if domain.dim() == 0 {
        return None;
    }
    if norm_sq <= f64::MIN_POSITIVE {
        return Some(0.0);
    }
    let w = (domain.descriptor().unit_trace() as f64).sqrt();
    let cols: Vec<CVec> = domain.elements().iter().map(|x| f(&x.scale(linalg::re(w))) / linalg::re(norm_sq.sqrt())).collect();
    let m = linalg::columns(&cols, cols[0].len());
    Some(linalg::singular_values(&m).iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Gates for a representation `x ↦ embed(x)` of `A` in `B` together with `S ∈ B`.
pub fn nondegeneracy_gates(inter: &Interaction, embed: impl Fn(&Element) -> Element, s: &Element) -> Result<NondegeneracyGates> {
    let a = inter.descriptor();
    let tol = inter.tol();
    let tr = (&s.adjoint() * s).trace().re;
    let right = |x: &Element| (&embed(x) * s).coords();
    let left = |x: &Element| (s * &embed(x)).coords();
    let alg_v = generated_subalgebra(a, &inter.range_v().elements(), tol)?;
    let alg_h = generated_subalgebra(a, &inter.range_h().elements(), tol)?;
    Ok(NondegeneracyGates {
        right_on_range_v: injectivity_modulus(inter.range_v(), tr, right),
        right_on_algebra_v: injectivity_modulus(&alg_v, tr, right),
        left_on_range_h: injectivity_modulus(inter.range_h(), tr, left),
        left_on_algebra_h: injectivity_modulus(&alg_h, tr, left),
    })
}

/// Recover `(V, H)` from `S a S* = V(a)·SS*` and `S* a S = H(a)·S*S`.
pub fn derive_from_partial_isometry(data: &PartialIsometryData, choice: &SolutionChoice, tol: f64) -> Result<DerivedInteraction> {
    let PartialIsometryData { a, b, embed, s } = data;
    if embed.len() != a.dim() {
        return Err(Error::ShapeMismatch(format!("{} embedded basis elements for dimension {}", embed.len(), a.dim())));
    }
    if s.descriptor() != b || embed.iter().any(|x| x.descriptor() != b) {
        return Err(Error::ShapeMismatch(format!("S and the embedding must live in {b}")));
    }
    let sn = s.op_norm().max(1.0);
    let pi_res = (&(&(s * &s.adjoint()) * s) - s).op_norm();
    if pi_res > tol * sn {
        return Err(Error::NotPartialIsometry(pi_res));
    }
    let basis = a.basis();
    let mut hom: f64 = 0.0;
    for (k, x) in basis.iter().enumerate() {
        hom = hom.max((&embed_elem(embed, b, &x.adjoint()) - &embed[k].adjoint()).op_norm());
        for (l, y) in basis.iter().enumerate() {
            hom = hom.max((&embed_elem(embed, b, &(x * y)) - &(&embed[k] * &embed[l])).op_norm());
        }
    }
    if hom > tol {
        return Err(Error::Precondition(format!("embedding is not a *-homomorphism (residual {hom:.3e})")));
    }

    let p = s * &s.adjoint();
    let q = &s.adjoint() * s;
    let mv = linalg::columns(&embed.iter().map(|x| (x * &p).coords()).collect::<Vec<_>>(), b.dim());
    let mh = linalg::columns(&embed.iter().map(|x| (x * &q).coords()).collect::<Vec<_>>(), b.dim());
    let mut vcols = Vec::new();
    let mut hcols = Vec::new();
    let mut solve_residual: f64 = 0.0;
    for (k, x) in embed.iter().enumerate() {
        let (prior_v, prior_h) = match choice {
            SolutionChoice::NearestIdentity => (basis[k].coords(), basis[k].coords()),
            SolutionChoice::MinimumNorm => (CVec::zeros(a.dim()), CVec::zeros(a.dim())),
            SolutionChoice::NearestTo(v0, h0) => (v0.apply(&basis[k]).coords(), h0.apply(&basis[k]).coords()),
        };
        let rhs_v = (&(s * x) * &s.adjoint()).coords();
        let rhs_h = (&(&s.adjoint() * x) * s).coords();
        for (m, rhs, prior, out) in [(&mv, rhs_v, prior_v, &mut vcols), (&mh, rhs_h, prior_h, &mut hcols)] {
            let beta = &prior + linalg::lstsq(m, &(&rhs - m * &prior), 1e-12);
            let r = (m * &beta - &rhs).norm() / rhs.norm().max(1.0);
            solve_residual = solve_residual.max(r);
            out.push(beta);
        }
    }
    if solve_residual > tol {
        return Err(Error::Unsolvable(format!("S a S* or S* a S is not a multiple of the support projection (residual {solve_residual:.3e})")));
    }
    let v = LinMap::new(a, linalg::columns(&vcols, a.dim()))?;
    let h = LinMap::new(a, linalg::columns(&hcols, a.dim()))?;
    let interaction = Interaction::new(v, h, tol)?;

    let gates = nondegeneracy_gates(&interaction, |x| embed_elem(embed, b, x), s)?;
    if !gates.nondegenerate(tol) {
        return Err(Error::Degenerate(format!("{gates:?}")));
    }
    Ok(DerivedInteraction { interaction, solve_residual, gates })
}

fn embed_elem(embed: &[Element], b: &AlgebraDescriptor, x: &Element) -> Element {
    let c = x.coords();
    let mut out = b.zero();
    for (k, e) in embed.iter().enumerate() {
        if c[k].norm() > 0.0 {
            out = &out + &e.scale(c[k]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{re, CMat};
    use proptest::prelude::*;

    #[test]
    fn flip_is_an_interaction() {
        let flip = fixtures::flip();
        assert!(flip.report().passed());
        assert_eq!(flip.range_v().dim(), 1);
        assert_eq!(flip.range_h().dim(), 1);
        let ev = flip.expectation_v().unwrap();
        // E_V(a) = (a1, a1)
        let x = Element::diagonal(flip.descriptor(), &[re(2.0), re(5.0)]).unwrap();
        assert_eq!(ev.apply(&x).coords().as_slice(), &[re(2.0), re(2.0)]);
        assert!(flip.inverse_pair().unwrap().worst() < 1e-14);
    }

    #[test]
    fn transpose_pair_fails_multiplicativity_with_witness() {
        let t = fixtures::transpose_map();
        let rep = verify_interaction(&t, &t, DEFAULT_TOL).unwrap();
        let pos = rep.get(ids::POSITIVE).unwrap();
        assert!(pos.passed);
        assert!(rep.get(ids::VHV).unwrap().passed && rep.get(ids::HVH).unwrap().passed);
        let vm = rep.get(ids::V_MULT).unwrap();
        assert!(!vm.passed);
        assert!((vm.residual - 1.0).abs() < 1e-12);
        let w = vm.witness.as_ref().unwrap();
        let m2 = t.descriptor();
        assert!((&w.elements[0] - &m2.matrix_unit(1)).op_norm() < 1e-12);
        assert!((&w.elements[1] - &m2.matrix_unit(2)).op_norm() < 1e-12);
        assert_eq!(w.labels, vec!["e(1,2)", "e(2,1)"]);
        assert!(matches!(Interaction::new(t.clone(), t, DEFAULT_TOL), Err(Error::AxiomsFailed(_))));
    }

    #[test]
    fn endo_transfer_cases() {
        let (alpha, l) = fixtures::swap_pair();
        let i = from_endo_transfer(&alpha, &l, DEFAULT_TOL).unwrap();
        assert_eq!(i.range_v().dim(), 2);
        // identity endomorphism with the averaging operator: L(e1 e2) = 0 but
        // L(e1) e2 = (0, 1/2)
        let d = alpha.descriptor().clone();
        let avg = LinMap::new(&d, CMat::from_element(2, 2, re(0.5))).unwrap();
        match from_endo_transfer(&LinMap::identity(&d), &avg, DEFAULT_TOL) {
            Err(Error::EndoTransfer(msg)) => assert!(msg.contains("5.000e-1"), "{msg}"),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn partial_isometry_recovers_flip() {
        let data = fixtures::flip_partial_isometry();
        let flip = fixtures::flip();
        let d = derive_from_partial_isometry(&data, &SolutionChoice::NearestIdentity, DEFAULT_TOL).unwrap();
        assert!(d.interaction.v().basis_distance(flip.v()) < 1e-12);
        assert!(d.interaction.h().basis_distance(flip.h()) < 1e-12);
        assert!((d.gates.smallest() - 1.0).abs() < 1e-12);
        // the minimum-norm rule gives the other interaction compatible with
        // the same relations: V(a) = (a2, 0), H(a) = (0, a1)
        let m = derive_from_partial_isometry(&data, &SolutionChoice::MinimumNorm, DEFAULT_TOL).unwrap();
        let x = Element::diagonal(&data.a, &[re(2.0), re(5.0)]).unwrap();
        let close = |y: Element, want: [f64; 2]| (&y - &Element::diagonal(&data.a, &want.map(re)).unwrap()).op_norm() < 1e-12;
        assert!(close(m.interaction.v().apply(&x), [5.0, 0.0]));
        assert!(close(m.interaction.h().apply(&x), [0.0, 2.0]));
    }

    #[test]
    fn non_partial_isometry_is_rejected() {
        let mut data = fixtures::flip_partial_isometry();
        data.s = data.s.scale(re(2.0));
        assert!(matches!(derive_from_partial_isometry(&data, &SolutionChoice::NearestIdentity, DEFAULT_TOL), Err(Error::NotPartialIsometry(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        // unitary conjugation α = Ad u with L = Ad u* is an interaction whose
        // amplifications stay interactions
        #[test]
        fn inner_automorphisms_amplify(seed in any::<u64>()) {
            let (alpha, l) = fixtures::inner_automorphism(2, seed);
            let i = from_endo_transfer(&alpha, &l, 1e-9).unwrap();
            prop_assert!(i.inverse_pair().unwrap().worst() <= 1e-9);
            let i2 = i.amplified(2).unwrap();
            prop_assert!(i2.report().passed());
        }
    }
}
