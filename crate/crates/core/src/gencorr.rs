//! Ternary rings of operators and generalized correspondences.
//!
//! A TRO is stored through its structure tensor in an orthonormal basis:
//! `T[i][j][k] = [e_i, e_j, e_k]`, linear in `i` and `k`, conjugate-linear in
//! `j`.  Two sources are supported: a concrete subspace `Y ⊆ B` closed under
//! `x y* z`, and the abstract bimodule `X` of an interaction.

use serde::Serialize;

use crate::bimodule::{BimoduleX, SweepPlan};
use crate::error::{Error, Result};
use crate::fdstar::{AlgebraDescriptor, Element, Subspace};
use crate::linalg::{self, CMat, CVec};
use crate::posmap::LinMap;
use crate::sampling::{self, CheckRng};

/// A subspace `Y ⊆ B` with `Y Y* Y ⊆ Y`.
#[derive(Clone, Debug)]
pub struct ConcreteTRO {
    space: Subspace,
}

impl ConcreteTRO {
    pub fn new(ambient: &AlgebraDescriptor, span: &[Element], tol: f64) -> Result<ConcreteTRO> {
        let space = Subspace::from_spanning(ambient, span, tol);
        let basis = space.elements();
        let mut worst: f64 = 0.0;
        for x in &basis {
            for y in &basis {
                let xy = x * &y.adjoint();
                for z in &basis {
                    worst = worst.max(space.membership(&(&xy * z), tol).1);
                }
            }
        }
        if worst > tol {
            return Err(Error::NotTernaryClosed(worst));
        }
        Ok(ConcreteTRO { space })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    fn coords_in(&self, x: &Element) -> CVec {
        self.space.coords().adjoint() * x.coords()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A pair `(a, k)` with `k` a generalized compact operator acting like `a`.
#[derive(Clone, Debug)]
pub struct Redundancy {
    pub a: Element,
    pub k: CMat,
    pub residual: f64,
    /// `a` lies in the annihilator of the kernel of the action.
    pub restricted: bool,
}

#[derive(Clone, Debug)]
pub struct RedundancyReport {
    pub side: Side,
    /// Basis of `{a : action(a) ∈ K}`.
    pub redundancies: Vec<Redundancy>,
    /// Central blocks of `A` acting as zero.
    pub kernel_blocks: Vec<usize>,
    /// Basis of the redundancies with `a` orthogonal to the kernel.
    pub restricted: Vec<Redundancy>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceResiduals {
    /// `[ξ, aη, ζ] = [ξ, η, a*ζ]`
    pub left_sliding: f64,
    /// `[ξ, ηa, ζ] = [ξa*, η, ζ]`
    pub right_sliding: f64,
    /// `λ` multiplicative and `ρ` anti-multiplicative.
    pub homomorphisms: f64,
}

impl CorrespondenceResiduals {
    pub fn worst(&self) -> f64 {
        self.left_sliding.max(self.right_sliding).max(self.homomorphisms)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedProductReport {
    /// `a⊗b = aα(b)⊗1`
    pub density: f64,
    /// `|‖⟨a⊗1, a⊗1⟩_r‖ − ‖L(a*a)‖|`
    pub isometry: f64,
    /// `φ(mα(a)) = φ(m)a` and `φ(am) = aφ(m)` with `φ(m) = m⊗1`.
    pub bimodule: f64,
    /// `φ(x α(L(y*z))) = [φ(x), φ(y), φ(z)]`
    pub ternary: f64,
}

impl CrossedProductReport {
    pub fn worst(&self) -> f64 {
        self.density.max(self.isometry).max(self.bimodule).max(self.ternary)
    }
}

#[derive(Clone, Debug)]
pub struct GenCorrespondence {
    coeff: AlgebraDescriptor,
    d: usize,
    /// `θ^ℓ_{e_i,e_j}` at `i·d + j`
    left_t: Vec<CMat>,
    /// `θ^r_{e_j,e_k}` at `j·d + k`
    right_t: Vec<CMat>,
    lam: Vec<CMat>,
    rho: Vec<CMat>,
    /// Coordinates in `A` of `⟨e_i, e_j⟩_r`, when every one of them lies in `A`.
    right_inner: Option<Vec<CVec>>,
    tol: f64,
}

impl GenCorrespondence {
    fn assemble(coeff: &AlgebraDescriptor, d: usize, tensor: &[CVec], lam: Vec<CMat>, rho: Vec<CMat>, tol: f64) -> GenCorrespondence {
        let mut left_t = vec![CMat::zeros(d, d); d * d];
        let mut right_t = vec![CMat::zeros(d, d); d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let t = &tensor[(i * d + j) * d + k];
                    left_t[i * d + j].set_column(k, t);
                    right_t[j * d + k].set_column(i, t);
                }
            }
        }
        GenCorrespondence { coeff: coeff.clone(), d, left_t, right_t, lam, rho, right_inner: None, tol }
    }

    /// Concrete mode: `A` acts on `Y ⊆ B` through the *-homomorphism given by
    /// the images `embed` of its matrix units.
    pub fn from_concrete(tro: &ConcreteTRO, coeff: &AlgebraDescriptor, embed: &[Element], tol: f64) -> Result<GenCorrespondence> {
        if embed.len() != coeff.dim() {
            return Err(Error::ShapeMismatch(format!("{} embedded basis elements for dimension {}", embed.len(), coeff.dim())));
        }
        let d = tro.dim();
        let basis = tro.space.elements();
        let mut tensor = Vec::with_capacity(d * d * d);
        for x in &basis {
            for y in &basis {
                let xy = x * &y.adjoint();
                for z in &basis {
                    tensor.push(tro.coords_in(&(&xy * z)));
                }
            }
        }
        let mut leak: f64 = 0.0;
        let mut act = |f: &dyn Fn(&Element) -> Element| {
            let cols: Vec<CVec> = basis
                .iter()
                .map(|y| {
                    let img = f(y);
                    leak = leak.max(tro.space.membership(&img, tol).1);
                    tro.coords_in(&img)
                })
                .collect();
            linalg::columns(&cols, d)
        };
        let lam: Vec<CMat> = embed.iter().map(|a| act(&|y| a * y)).collect();
        let rho: Vec<CMat> = embed.iter().map(|a| act(&|y| y * a)).collect();
        if leak > tol {
            return Err(Error::Precondition(format!("A does not act on the TRO (residual {leak:.3e})")));
        }
        let mut g = GenCorrespondence::assemble(coeff, d, &tensor, lam, rho, tol);
        let emb = linalg::columns(&embed.iter().map(|a| a.coords()).collect::<Vec<_>>(), tro.space.descriptor().dim());
        let targets: Vec<CVec> = (0..d * d).map(|ij| (&basis[ij / d].adjoint() * &basis[ij % d]).coords()).collect();
        g.right_inner = solve_all(&emb, &targets, tol);
        Ok(g)
    }

    /// Abstract mode: the bimodule of an interaction in class coordinates.
    pub fn from_bimodule(x: &BimoduleX) -> Result<GenCorrespondence> {
        let d = x.rank();
        let basis = x.basis();
        let tensor = x.ternary_table();
        let desc = x.descriptor();
        let units = desc.basis();
        let lam = units.iter().map(|a| x.left_a_matrix(a)).collect();
        let rho = units.iter().map(|a| x.right_a_matrix(a)).collect();
        let mut g = GenCorrespondence::assemble(desc, d, &tensor, lam, rho, x.tol());
        let bc = x.basic_h();
        let lam_h = linalg::columns(&bc.lambda_basis().iter().map(linalg::vec_of).collect::<Vec<_>>(), bc.rank() * bc.rank());
        let targets: Vec<CVec> = (0..d * d).map(|ij| linalg::vec_of(&x.inner_r(&basis[ij / d], &basis[ij % d]))).collect();
        g.right_inner = solve_all(&lam_h, &targets, x.tol());
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coefficients(&self) -> &AlgebraDescriptor {
        &self.coeff
    }

    fn act(&self, mats: &[CMat], a: &Element) -> CMat {
        let c = a.coords();
        let mut out = CMat::zeros(self.d, self.d);
        for (k, m) in mats.iter().enumerate() {
            if c[k].norm() > 0.0 {
                out += m * c[k];
            }
        }
        out
    }

    pub fn lambda(&self, a: &Element) -> CMat {
        self.act(&self.lam, a)
    }

    pub fn rho(&self, a: &Element) -> CMat {
        self.act(&self.rho, a)
    }

    /// `x ↦ [ξ, η, x]`
    pub fn theta_left(&self, xi: &CVec, eta: &CVec) -> CMat {
        let d = self.d;
        let mut out = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let c = xi[i] * eta[j].conj();
                if c.norm() > 0.0 {
                    out += &self.left_t[i * d + j] * c;
                }
            }
        }
        out
    }

    /// `x ↦ [x, ξ, η]`
    pub fn theta_right(&self, xi: &CVec, eta: &CVec) -> CMat {
        let d = self.d;
        let mut out = CMat::zeros(d, d);
        for j in 0..d {
            for k in 0..d {
                let c = xi[j].conj() * eta[k];
                if c.norm() > 0.0 {
                    out += &self.right_t[j * d + k] * c;
                }
            }
        }
        out
    }

    pub fn ternary(&self, x: &CVec, y: &CVec, z: &CVec) -> CVec {
        self.theta_left(x, y) * z
    }

    /// `‖ξ‖ = ‖θ^ℓ_{ξ,ξ}‖^{1/2}`.
    pub fn norm(&self, xi: &CVec) -> f64 {
        linalg::op_norm(&self.theta_left(xi, xi)).sqrt()
    }

    fn unit(&self, k: usize) -> CVec {
        CVec::from_fn(self.d, |i, _| if i == k { linalg::ONE } else { linalg::ZERO })
    }

    /// `count` slots, each the whole basis on a full sweep or one random vector.
    fn draw(&self, plan: &SweepPlan, rng: &mut CheckRng, count: usize) -> Vec<Vec<CVec>> {
        if plan.full {
            return vec![(0..self.d).map(|k| self.unit(k)).collect(); count];
        }
        (0..count).map(|_| vec![sampling::gaussian_vec(rng, self.d)]).collect()
    }

    /// Orthonormal bases (Hilbert-Schmidt) of the spans of the `θ^ℓ` and `θ^r`.
    pub fn compact_spans(&self) -> (Vec<CMat>, Vec<CMat>) {
        (self.span(&self.left_t), self.span(&self.right_t))
    }

    fn span(&self, mats: &[CMat]) -> Vec<CMat> {
        let d = self.d;
        let cols: Vec<CVec> = mats.iter().map(linalg::vec_of).collect();
        let b = linalg::orthonormal_range(&linalg::columns(&cols, d * d), self.tol);
        (0..b.ncols()).map(|j| linalg::unvec(&b.column(j).into_owned(), d, d)).collect()
    }

    /// Sliding laws against the matrix units of `A`, and the (anti-)multiplicativity of `λ`, `ρ`.
    pub fn correspondence(&self, plan: &SweepPlan) -> CorrespondenceResiduals {
        let units = self.coeff.basis();
        let mut rng = plan.rng(71);
        let mut left_sliding: f64 = 0.0;
        let mut right_sliding: f64 = 0.0;
        for _ in 0..plan.rounds() {
            let vs = self.draw(plan, &mut rng, 3);
            let coeffs = if plan.full { units.clone() } else { vec![sampling::random_element(&self.coeff, &mut rng)] };
            for a in &coeffs {
                let (la, ra) = (self.lambda(a), self.rho(a));
                let las = self.lambda(&a.adjoint());
                let ras = self.rho(&a.adjoint());
                for x in &vs[0] {
                    for y in &vs[1] {
                        for z in &vs[2] {
                            let l = self.ternary(x, &(&la * y), z) - self.ternary(x, y, &(&las * z));
                            let r = self.ternary(x, &(&ra * y), z) - self.ternary(&(&ras * x), y, z);
                            left_sliding = left_sliding.max(l.norm());
                            right_sliding = right_sliding.max(r.norm());
                        }
                    }
                }
            }
        }
        let mut homomorphisms: f64 = 0.0;
        for (k, a) in units.iter().enumerate() {
            homomorphisms = homomorphisms.max(linalg::op_norm(&(self.lambda(&a.adjoint()) - self.lam[k].adjoint())));
            homomorphisms = homomorphisms.max(linalg::op_norm(&(self.rho(&a.adjoint()) - self.rho[k].adjoint())));
            for (l, b) in units.iter().enumerate() {
                let ab = a * b;
                homomorphisms = homomorphisms.max(linalg::op_norm(&(self.lambda(&ab) - &self.lam[k] * &self.lam[l])));
                homomorphisms = homomorphisms.max(linalg::op_norm(&(self.rho(&ab) - &self.rho[l] * &self.rho[k])));
            }
        }
        CorrespondenceResiduals { left_sliding, right_sliding, homomorphisms }
    }

    /// Right operators commute with left operators, and `ρ(A)` with `λ(A)`.
    pub fn commutation(&self) -> f64 {
        let (kl, kr) = self.compact_spans();
        let mut worst: f64 = 0.0;
        for l in &kl {
            for r in &kr {
                worst = worst.max(linalg::op_norm(&(l * r - r * l)));
            }
        }
        for la in &self.lam {
            for rb in &self.rho {
                worst = worst.max(linalg::op_norm(&(la * rb - rb * la)));
            }
        }
        worst
    }

    /// `(θ_{ξ,η})* = θ_{η,ξ}` as matrices and in the ternary pairing
    /// `[z, θ^ℓ_{ξ,η}x, y] = [z, x, θ^ℓ_{η,ξ}y]`, `[θ^r_{ξ,η}x, y, z] = [x, θ^r_{η,ξ}y, z]`.
    pub fn theta_adjoint(&self, plan: &SweepPlan) -> f64 {
        let mut rng = plan.rng(73);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.rounds() {
            let vs = self.draw(plan, &mut rng, 5);
            for xi in &vs[0] {
                for eta in &vs[1] {
                    let (l, lt) = (self.theta_left(xi, eta), self.theta_left(eta, xi));
                    let (r, rt) = (self.theta_right(xi, eta), self.theta_right(eta, xi));
                    worst = worst.max(linalg::op_norm(&(l.adjoint() - &lt))).max(linalg::op_norm(&(r.adjoint() - &rt)));
                    for x in &vs[2] {
                        let (lx, rx) = (&l * x, &r * x);
                        for y in &vs[3] {
                            let (lty, rty) = (&lt * y, &rt * y);
                            for z in &vs[4] {
                                let a = self.ternary(z, &lx, y) - self.ternary(z, x, &lty);
                                let b = self.ternary(&rx, y, z) - self.ternary(x, &rty, z);
                                worst = worst.max(a.norm()).max(b.norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Largest `|‖[ξ,ξ,ξ]‖ − ‖ξ‖³| / ‖ξ‖³` over basis vectors and samples.
    pub fn cube_identity(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = sampling::seeded(seed);
        let mut vs: Vec<CVec> = (0..self.d).map(|k| self.unit(k)).collect();
        vs.extend((0..samples).map(|_| sampling::gaussian_vec(&mut rng, self.d)));
        let mut worst: f64 = 0.0;
        for x in &vs {
            let n3 = self.norm(x).powi(3);
            if n3 < 1e-12 {
                continue;
            }
            worst = worst.max((self.norm(&self.ternary(x, x, x)) - n3).abs() / n3);
        }
        worst
    }

    /// `θ^r_{ξ,η} = ρ(⟨ξ,η⟩_r)` over basis pairs; `None` when some inner
    /// product is not the image of an element of `A`.
    pub fn classical_compacts(&self) -> Option<f64> {
        let inner = self.right_inner.as_ref()?;
        let d = self.d;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = Element::from_coords(&self.coeff, &inner[i * d + j]).unwrap();
                let t = self.theta_right(&self.unit(i), &self.unit(j));
                worst = worst.max(linalg::op_norm(&(t - self.rho(&a))));
            }
        }
        Some(worst)
    }

    /// Redundancies `(a, k)` with `k ∈ K_r` equal to `ρ(a)` (right side) or
    /// `k ∈ K_ℓ` equal to `λ(a)` (left side).
    pub fn redundancies(&self, side: Side) -> RedundancyReport {
        let (kl, kr) = self.compact_spans();
        let (span, action) = match side {
            Side::Left => (kl, &self.lam),
            Side::Right => (kr, &self.rho),
        };
        let d = self.d;
        let n = self.coeff.dim();
        let kmat = linalg::columns(&span.iter().map(linalg::vec_of).collect::<Vec<_>>(), d * d);
        let proj = |v: &CVec| &kmat * (kmat.adjoint() * v);
        let defects: Vec<CVec> = action
            .iter()
            .map(|m| {
                let v = linalg::vec_of(m);
                &v - proj(&v)
            })
            .collect();
        let kernel = null_space(&linalg::columns(&defects, d * d), n, self.tol);

        let kernel_blocks: Vec<usize> =
            (0..self.coeff.blocks().len()).filter(|&i| linalg::op_norm(&self.act(action, &self.coeff.block_unit(i))) <= self.tol).collect();
        let killed: Vec<usize> = (0..n).filter(|&k| kernel_blocks.contains(&self.coeff.locate(k).0)).collect();

        let make = |c: CVec| {
            let a = Element::from_coords(&self.coeff, &c).unwrap();
            let act = self.act(action, &a);
            let k = linalg::unvec(&proj(&linalg::vec_of(&act)), d, d);
            let residual = linalg::op_norm(&(&act - &k));
            let restricted = killed.iter().all(|&i| c[i].norm() <= self.tol);
            Redundancy { a, k, residual, restricted }
        };
        let redundancies: Vec<Redundancy> = (0..kernel.ncols()).map(|j| make(kernel.column(j).into_owned())).collect();

        // coordinates of the redundancy space that vanish on the killed blocks
        let restricted = if killed.is_empty() {
            redundancies.clone()
        } else {
            let rows = CMat::from_fn(killed.len(), kernel.ncols(), |r, c| kernel[(killed[r], c)]);
            let inner = null_space(&rows, kernel.ncols(), self.tol);
            let sub = &kernel * inner;
            let sub = linalg::orthonormal_range(&sub, self.tol);
            (0..sub.ncols()).map(|j| make(sub.column(j).into_owned())).collect()
        };
        RedundancyReport { side, redundancies, kernel_blocks, restricted }
    }
}

/// Kernel with an absolute floor: a matrix of pure roundoff has full kernel.
fn null_space(m: &CMat, cols: usize, tol: f64) -> CMat {
    if linalg::op_norm(m) <= tol {
        return CMat::identity(cols, cols);
    }
    linalg::kernel(m, tol)
}

fn solve_all(m: &CMat, targets: &[CVec], tol: f64) -> Option<Vec<CVec>> {
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        let c = linalg::lstsq(m, t, 1e-12);
        if (m * &c - t).norm() > tol * t.norm().max(1.0) {
            return None;
        }
        out.push(c);
    }
    Some(out)
}

/// Checks that the bimodule of the interaction built from `(α, L)` is the
/// crossed-product correspondence, through `φ(m) = m⊗1`.
pub fn check_crossed_product(alpha: &LinMap, l: &LinMap, x: &BimoduleX) -> Result<CrossedProductReport> {
    let inter = x.interaction();
    let tol = x.tol();
    let gap = inter.v().basis_distance(alpha).max(inter.h().basis_distance(l));
    if gap > tol {
        return Err(Error::Precondition(format!("interaction is not (α, L) (distance {gap:.3e})")));
    }
    let desc = x.descriptor();
    let one = desc.unit();
    let units = desc.basis();
    let phi = |m: &Element| x.elementary(m, &one);

    let mut density: f64 = 0.0;
    for a in &units {
        for b in &units {
            density = density.max(x.distance(&x.elementary(a, b), &phi(&(a * &alpha.apply(b)))));
        }
    }

    let mut isometry: f64 = 0.0;
    let mut rng = sampling::seeded(0x7130);
    let mut samples = units.clone();
    samples.extend((0..8).map(|_| sampling::random_element(desc, &mut rng)));
    for a in &samples {
        let t = phi(a);
        let lhs = linalg::op_norm(&x.inner_r(&t, &t));
        let rhs = l.apply(&(&a.adjoint() * a)).op_norm();
        isometry = isometry.max((lhs - rhs).abs() / rhs.max(1.0));
    }

    let mut bimodule: f64 = 0.0;
    for m in &units {
        let pm = phi(m);
        for a in &units {
            let right = x.distance(&phi(&(m * &alpha.apply(a))), &x.a_action(a, &pm, false));
            let left = x.distance(&phi(&(a * m)), &x.a_action(a, &pm, true));
            bimodule = bimodule.max(right).max(left);
        }
    }

    let mut ternary: f64 = 0.0;
    for a in &units {
        let pa = phi(a);
        for b in &units {
            let pb = phi(b);
            for c in &units {
                let lhs = phi(&(a * &alpha.apply(&l.apply(&(&b.adjoint() * c)))));
                ternary = ternary.max(x.distance(&lhs, &x.ternary(&pa, &pb, &phi(c))));
            }
        }
    }
    Ok(CrossedProductReport { density, isometry, bimodule, ternary })
}

/// Dimension summary used to compare two correspondences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub dim: usize,
    pub k_left: usize,
    pub k_right: usize,
    pub left_redundancies: usize,
    pub right_redundancies: usize,
    pub left_restricted: usize,
    pub right_restricted: usize,
}

impl GenCorrespondence {
    pub fn shape(&self) -> Shape {
        let (kl, kr) = self.compact_spans();
        let l = self.redundancies(Side::Left);
        let r = self.redundancies(Side::Right);
        Shape {
            dim: self.d,
            k_left: kl.len(),
            k_right: kr.len(),
            left_redundancies: l.redundancies.len(),
            right_redundancies: r.redundancies.len(),
            left_restricted: l.restricted.len(),
            right_restricted: r.restricted.len(),
        }
    }
}

/// `ℂe12 ⊆ M2` with the diagonal copy of `ℂ²`.
pub fn corner_tro() -> (ConcreteTRO, AlgebraDescriptor, Vec<Element>) {
    let m2 = AlgebraDescriptor::full(2).unwrap();
    let tro = ConcreteTRO::new(&m2, &[m2.matrix_unit(1)], 1e-9).unwrap();
    let a = AlgebraDescriptor::new(vec![1, 1]).unwrap();
    (tro, a, vec![m2.matrix_unit(0), m2.matrix_unit(3)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::interaction::from_endo_transfer;

    fn plan() -> SweepPlan {
        SweepPlan { full: true, samples: 8, seed: 5 }
    }

    #[test]
    fn corner_tro_matches_flip_bimodule() {
        let (tro, a, embed) = corner_tro();
        let concrete = GenCorrespondence::from_concrete(&tro, &a, &embed, 1e-9).unwrap();
        let x = BimoduleX::build(&fixtures::flip()).unwrap();
        let abstract_ = GenCorrespondence::from_bimodule(&x).unwrap();
        let s = concrete.shape();
        assert_eq!(s, abstract_.shape());
        assert_eq!((s.dim, s.k_left, s.k_right), (1, 1, 1));
        assert_eq!((s.right_redundancies, s.right_restricted), (2, 1));
        let r = concrete.redundancies(Side::Right);
        assert_eq!(r.kernel_blocks, vec![0]);
        // the kept redundancy is supported on the second coordinate
        let c = r.restricted[0].a.coords();
        assert!(c[0].norm() < 1e-12 && (c[1].norm() - 1.0).abs() < 1e-12);
        assert!(r.redundancies.iter().all(|x| x.residual < 1e-12));
    }

    #[test]
    fn corner_compacts_are_diagonal_units() {
        let (tro, a, embed) = corner_tro();
        let g = GenCorrespondence::from_concrete(&tro, &a, &embed, 1e-9).unwrap();
        let (kl, kr) = g.compact_spans();
        // on the one-dimensional space e11 (left) and e22 (right) both act as 1
        assert!((kl[0][(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((kr[0][(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(g.commutation() < 1e-12);
        assert!(g.correspondence(&plan()).worst() < 1e-12);
    }

    #[test]
    fn zero_tro_has_no_restricted_redundancies() {
        let m2 = AlgebraDescriptor::full(2).unwrap();
        let tro = ConcreteTRO::new(&m2, &[], 1e-9).unwrap();
        let a = fixtures::c2();
        let g = GenCorrespondence::from_concrete(&tro, &a, &[m2.matrix_unit(0), m2.matrix_unit(3)], 1e-9).unwrap();
        let r = g.redundancies(Side::Right);
        assert_eq!(r.redundancies.len(), 2);
        assert_eq!(r.kernel_blocks, vec![0, 1]);
        assert!(r.restricted.is_empty());
    }

    #[test]
    fn ternary_closure_is_checked() {
        let m2 = AlgebraDescriptor::full(2).unwrap();
        let u = |k| m2.matrix_unit(k);
        // first row, off-diagonal units, and a single rank-one element are closed
        assert!(ConcreteTRO::new(&m2, &[u(0), u(1)], 1e-9).is_ok());
        assert!(ConcreteTRO::new(&m2, &[u(1), u(2)], 1e-9).is_ok());
        assert!(ConcreteTRO::new(&m2, &[&u(0) + &u(1)], 1e-9).is_ok());
        // e11 e11* (e12 + e21) = e12 leaves the span
        let span = [u(0), &u(1) + &u(2)];
        assert!(matches!(ConcreteTRO::new(&m2, &span, 1e-9), Err(Error::NotTernaryClosed(_))));
    }

    #[test]
    fn concrete_tro_cube_and_adjoint() {
        let m3 = AlgebraDescriptor::full(3).unwrap();
        // first row of M3 together with the diagonal copy of M1 ⊕ M2 acting on it
        let span: Vec<Element> = (0..3).map(|q| m3.matrix_unit(m3.index(0, 0, q))).collect();
        let tro = ConcreteTRO::new(&m3, &span, 1e-9).unwrap();
        let a = AlgebraDescriptor::new(vec![1, 2]).unwrap();
        let embed: Vec<Element> = (0..a.dim())
            .map(|k| {
                let (b, p, q) = a.locate(k);
                m3.matrix_unit(m3.index(0, p + b, q + b))
            })
            .collect();
        let g = GenCorrespondence::from_concrete(&tro, &a, &embed, 1e-9).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(g.cube_identity(20, 1) < 1e-12);
        assert!(g.theta_adjoint(&plan()) < 1e-12);
        assert!(g.commutation() < 1e-12);
        assert!(g.correspondence(&plan()).worst() < 1e-12);
        // ξ*η leaves the block-diagonal copy of A
        assert!(g.classical_compacts().is_none());
    }

    #[test]
    fn full_matrix_tro_is_classical() {
        let m2 = AlgebraDescriptor::full(2).unwrap();
        let tro = ConcreteTRO::new(&m2, &m2.basis(), 1e-9).unwrap();
        let g = GenCorrespondence::from_concrete(&tro, &m2, &m2.basis(), 1e-9).unwrap();
        assert_eq!(g.dim(), 4);
        assert!(g.classical_compacts().unwrap() < 1e-12);
        assert!(g.cube_identity(20, 3) < 1e-12);
        assert!(g.commutation() < 1e-12);
        let r = g.redundancies(Side::Right);
        assert_eq!((r.redundancies.len(), r.restricted.len()), (4, 4));
    }

    #[test]
    fn identity_bimodule_is_classical() {
        let x = BimoduleX::build(&fixtures::identity(&AlgebraDescriptor::full(2).unwrap())).unwrap();
        let g = GenCorrespondence::from_bimodule(&x).unwrap();
        let (kl, kr) = g.compact_spans();
        assert_eq!((kl.len(), kr.len()), (4, 4));
        assert!(g.classical_compacts().unwrap() < 1e-9);
        assert_eq!(g.redundancies(Side::Right).redundancies.len(), 4);
        assert!(g.correspondence(&plan()).worst() < 1e-9);
    }

    #[test]
    fn amplified_identity_compacts_commute() {
        let i = fixtures::identity(&AlgebraDescriptor::full(2).unwrap()).amplified(2).unwrap();
        let g = GenCorrespondence::from_bimodule(&BimoduleX::build(&i).unwrap()).unwrap();
        let (kl, kr) = g.compact_spans();
        assert_eq!((kl.len(), kr.len()), (16, 16));
        assert!(g.commutation() < 1e-9);
    }

    #[test]
    fn flip_bimodule_compacts_are_classical() {
        let x = BimoduleX::build(&fixtures::flip()).unwrap();
        let g = GenCorrespondence::from_bimodule(&x).unwrap();
        // K_H = λ_H(ℂ²) ≅ ℂ, so every right inner product comes from A
        assert!(g.classical_compacts().unwrap() < 1e-9);
        assert!(g.cube_identity(10, 2) < 1e-9);
    }

    #[test]
    fn swap_crossed_product() {
        let (alpha, l) = fixtures::swap_pair();
        let inter = from_endo_transfer(&alpha, &l, 1e-9).unwrap();
        let x = BimoduleX::build(&inter).unwrap();
        let rep = check_crossed_product(&alpha, &l, &x).unwrap();
        assert!(rep.worst() < 1e-9, "{rep:?}");
        // ‖(1,0)⊗1‖ = ‖L((1,0))‖^{1/2} = 1
        let e1 = fixtures::c2().matrix_unit(0);
        assert!((x.norm(&x.elementary(&e1, &fixtures::c2().unit())) - 1.0).abs() < 1e-12);
        let flip = fixtures::flip_maps();
        assert!(matches!(check_crossed_product(&flip.0, &flip.1, &x), Err(Error::Precondition(_))));
    }
}
