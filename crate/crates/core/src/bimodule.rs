//! The bimodule `X`: the algebraic tensor product `A ⊙ A` divided by the
//! null space of
//!
//! ```text
//! ⟨a⊗b, c⊗d⟩_r = b* H(a*c) e_H d      (valued in K_H)
//! ⟨a⊗b, c⊗d⟩_ℓ = a V(bd*) e_V c*      (valued in K_V)
//! ```
//!
//! with right `K_H` action `(x⊗y)(a e_H b) = x V(ya) ⊗ b`, left `K_V` action
//! `(a e_V b)(x⊗y) = a ⊗ H(bx) y` and ternary product
//! `[u⊗v, x⊗y, z⊗w] = u V(vy*) ⊗ H(x*z) w`.
//!
//! A tensor is stored as its `n × n` coefficient matrix `T` with
//! `x = Σ T[k,l] e_k ⊗ e_l` over the matrix units.  Classes live in `ℂ^r`,
//! orthonormal for `φ(⟨x, y⟩_r)` where `φ` is the normalized trace on the
//! quotient space of the basic construction for `E_H`.

use rand::Rng;
use serde::Serialize;

use crate::basicc::{BasicConstruction, GramQuotient};
use crate::error::{Error, Result};
use crate::fdstar::{AlgebraDescriptor, Element};
use crate::interaction::Interaction;
use crate::linalg::{self, CMat, CVec, C64};
use crate::sampling::{self, CheckRng};

#[derive(Clone, Debug)]
pub struct TensorElt {
    pub coeffs: CMat,
    pub class: CVec,
}

/// How exhaustive a check is: basis sweeps on small fixtures, seeded samples
/// otherwise.
#[derive(Clone, Copy, Debug)]
pub struct SweepPlan {
    pub full: bool,
    pub samples: usize,
    pub seed: u64,
}

impl SweepPlan {
    /// Full sweeps for algebras of dimension at most 8.
    pub fn for_dim(dim: usize, samples: usize, seed: u64) -> SweepPlan {
        SweepPlan { full: dim <= 8, samples, seed }
    }

    /// Passes over the drawn elements: one full sweep, or one per sample.
    pub(crate) fn rounds(&self) -> usize {
        if self.full {
            1
        } else {
            self.samples.max(1)
        }
    }

    pub(crate) fn rng(&self, salt: u64) -> CheckRng {
        sampling::seeded(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormComparison {
    /// `‖H(aa*)^{1/2} H(V(bb*))^{1/2}‖`
    pub via_h: f64,
    /// `‖V(H(aa*))^{1/2} V(bb*)^{1/2}‖`
    pub via_v: f64,
    /// `‖⟨x, x⟩_r‖^{1/2}`
    pub gram_right: f64,
    /// `‖⟨x, x⟩_ℓ‖^{1/2}`
    pub gram_left: f64,
}

impl NormComparison {
    pub fn max_relative_gap(&self) -> f64 {
        let v = [self.via_h, self.via_v, self.gram_right, self.gram_left];
        let hi = v.iter().cloned().fold(0.0, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        if hi == 0.0 {
            0.0
        } else {
            (hi - lo) / hi
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeminormComparison {
    pub rank_right: usize,
    pub rank_left: usize,
    /// Largest value of either form on the other's null space.
    pub cross_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fullness {
    pub span_right: usize,
    pub k_h_dim: usize,
    pub span_left: usize,
    pub k_v_dim: usize,
}

#[derive(Clone, Debug)]
pub struct BimoduleX {
    inter: Interaction,
    desc: AlgebraDescriptor,
    n: usize,
    bc_v: BasicConstruction,
    bc_h: BasicConstruction,
    units: Vec<Element>,
    /// `V(e_l e_q*)` at `l·n + q`
    v_star: Vec<Element>,
    /// `H(e_k* e_p)` at `k·n + p`
    h_star: Vec<Element>,
    /// `V(e_l e_i)` at `l·n + i`
    v_prod: Vec<Element>,
    /// `H(e_j e_k)` at `j·n + k`
    h_prod: Vec<Element>,
    /// `λ_H(H(e_k* e_p)) e_H`
    right_kernel: Vec<CMat>,
    /// `λ_V(V(e_l e_q*)) e_V`
    left_kernel: Vec<CMat>,
    /// `vec(x) ↦ vec(U)` with `U[:, q] = Σ_l col_l(x) V(e_l e_q*)`
    ternary_left: CMat,
    /// `vec(zᵀ) ↦ vec(W)` with `W[:, p] = Σ_k H(e_p* e_k) row_k(z)`
    ternary_right: CMat,
    quotient: GramQuotient,
    tol: f64,
}

fn flat(t: &CMat) -> CVec {
    CVec::from_iterator(t.len(), t.transpose().iter().cloned())
}

fn unflat(v: &CVec, n: usize) -> CMat {
    CMat::from_row_slice(n, n, v.as_slice())
}

fn outer(a: &Element, b: &Element) -> CMat {
    a.coords() * b.coords().transpose()
}

impl BimoduleX {
    pub fn build(inter: &Interaction) -> Result<BimoduleX> {
        let tol = inter.tol();
        let desc = inter.descriptor().clone();
        let n = desc.dim();
        let bc_v = BasicConstruction::build(&inter.expectation_v()?, tol)?;
        let bc_h = BasicConstruction::build(&inter.expectation_h()?, tol)?;
        let units = desc.basis();
        let (v, h) = (inter.v(), inter.h());
        let mut v_star = Vec::with_capacity(n * n);
        let mut h_star = Vec::with_capacity(n * n);
        let mut v_prod = Vec::with_capacity(n * n);
        let mut h_prod = Vec::with_capacity(n * n);
        for a in &units {
            for b in &units {
                v_star.push(v.apply(&(a * &b.adjoint())));
                h_star.push(h.apply(&(&a.adjoint() * b)));
                v_prod.push(v.apply(&(a * b)));
                h_prod.push(h.apply(&(a * b)));
            }
        }
        let right_kernel: Vec<CMat> = h_star.iter().map(|x| bc_h.lambda(x) * bc_h.e()).collect();
        let left_kernel: Vec<CMat> = v_star.iter().map(|x| bc_v.lambda(x) * bc_v.e()).collect();
        let mut ternary_left = CMat::zeros(n * n, n * n);
        let mut ternary_right = CMat::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let r = crate::basicc::right_mult(&desc, &v_star[b * n + a]);
                ternary_left.view_mut((n * a, n * b), (n, n)).copy_from(&r);
                let l = crate::basicc::left_mult(&desc, &h_star[a * n + b]);
                ternary_right.view_mut((n * a, n * b), (n, n)).copy_from(&l);
            }
        }

        let mut x = BimoduleX {
            inter: inter.clone(),
            desc,
            n,
            bc_v,
            bc_h,
            units,
            v_star,
            h_star,
            v_prod,
            h_prod,
            right_kernel,
            left_kernel,
            ternary_left,
            ternary_right,
            quotient: GramQuotient::new(&CMat::zeros(0, 0), tol)?,
            tol,
        };
        let gram = x.gram_right();
        x.quotient = GramQuotient::new(&gram, tol)?;
        Ok(x)
    }

    pub fn interaction(&self) -> &Interaction {
        &self.inter
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.desc
    }

    pub fn basic_v(&self) -> &BasicConstruction {
        &self.bc_v
    }

    pub fn basic_h(&self) -> &BasicConstruction {
        &self.bc_h
    }

    pub fn quotient(&self) -> &GramQuotient {
        &self.quotient
    }

    /// Dimension of `X`.
    pub fn rank(&self) -> usize {
        self.quotient.rank()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn elem(&self, c: CVec) -> Element {
        Element::from_coords(&self.desc, &c).unwrap()
    }

    /// Second tensor factor paired with `e_k`: `x = Σ_k e_k ⊗ row(k)`.
    fn row(&self, t: &CMat, k: usize) -> Element {
        self.elem(t.row(k).transpose())
    }

    /// First tensor factor paired with `e_l`: `x = Σ_l col(l) ⊗ e_l`.
    fn col(&self, t: &CMat, l: usize) -> Element {
        self.elem(t.column(l).into_owned())
    }

    fn gram_right(&self) -> CMat {
        let n = self.n;
        let m = self.bc_h.rank();
        let lam = self.bc_h.lambda_basis();
        // tr(λ_l* M λ_q) = sum(M ∘ (λ_q λ_l*)ᵀ)
        let mut prods = Vec::with_capacity(n * n);
        for q in 0..n {
            for l in 0..n {
                prods.push((&lam[q] * lam[l].adjoint()).transpose());
            }
        }
        let mut g = CMat::zeros(n * n, n * n);
        if m == 0 {
            return g;
        }
        let phi = linalg::re(1.0 / m as f64);
        for k in 0..n {
            for p in 0..n {
                let mk = &self.right_kernel[k * n + p];
                for l in 0..n {
                    for q in 0..n {
                        g[(k * n + l, p * n + q)] = mk.component_mul(&prods[q * n + l]).sum() * phi;
                    }
                }
            }
        }
        g
    }

    fn gram_left(&self) -> CMat {
        let n = self.n;
        let m = self.bc_v.rank();
        let lam = self.bc_v.lambda_basis();
        // entry (kl, pq) is φ(⟨e_p⊗e_q, e_k⊗e_l⟩_ℓ) = tr(N_ql λ_k* λ_p) / m
        let mut prods = Vec::with_capacity(n * n);
        for k in 0..n {
            for p in 0..n {
                prods.push((lam[k].adjoint() * &lam[p]).transpose());
            }
        }
        let mut g = CMat::zeros(n * n, n * n);
        if m == 0 {
            return g;
        }
        let phi = linalg::re(1.0 / m as f64);
        for q in 0..n {
            for l in 0..n {
                let nk = &self.left_kernel[q * n + l];
                for k in 0..n {
                    for p in 0..n {
                        g[(k * n + l, p * n + q)] = nk.component_mul(&prods[k * n + p]).sum() * phi;
                    }
                }
            }
        }
        g
    }

    /// `φ(⟨x, y⟩_r)` on coefficient matrices flattened row-major.
    pub fn gram(&self) -> CMat {
        self.gram_right()
    }

    pub fn tensor(&self, coeffs: CMat) -> TensorElt {
        let class = &self.quotient.q * flat(&coeffs);
        TensorElt { coeffs, class }
    }

    pub fn elementary(&self, a: &Element, b: &Element) -> TensorElt {
        self.tensor(outer(a, b))
    }

    /// Canonical representative of a class.
    pub fn from_class(&self, c: &CVec) -> TensorElt {
        let coeffs = unflat(&(&self.quotient.lift * c), self.n);
        TensorElt { coeffs, class: c.clone() }
    }

    /// Representatives of the orthonormal basis of `X`.
    pub fn basis(&self) -> Vec<TensorElt> {
        let r = self.rank();
        (0..r).map(|j| self.from_class(&CVec::from_fn(r, |i, _| if i == j { linalg::ONE } else { linalg::ZERO }))).collect()
    }

    pub fn random_pretensor<R: Rng>(&self, rng: &mut R) -> TensorElt {
        self.tensor(sampling::gaussian_matrix(rng, self.n, self.n))
    }

    pub fn random_class<R: Rng>(&self, rng: &mut R) -> TensorElt {
        self.from_class(&sampling::gaussian_vec(rng, self.rank()))
    }

    pub fn add(&self, x: &TensorElt, y: &TensorElt) -> TensorElt {
        TensorElt { coeffs: &x.coeffs + &y.coeffs, class: &x.class + &y.class }
    }

    pub fn sub(&self, x: &TensorElt, y: &TensorElt) -> TensorElt {
        TensorElt { coeffs: &x.coeffs - &y.coeffs, class: &x.class - &y.class }
    }

    pub fn scale(&self, x: &TensorElt, s: C64) -> TensorElt {
        TensorElt { coeffs: &x.coeffs * s, class: &x.class * s }
    }

    /// `⟨x, y⟩_r ∈ K_H`, conjugate-linear in `x`.
    pub fn inner_r(&self, x: &TensorElt, y: &TensorElt) -> CMat {
        let n = self.n;
        let m = self.bc_h.rank();
        let rows: Vec<Option<Element>> = (0..n).map(|k| nonzero_row(&x.coeffs, k).then(|| self.row(&x.coeffs, k).adjoint())).collect();
        let mut out = CMat::zeros(m, m);
        for p in (0..n).filter(|&p| nonzero_row(&y.coeffs, p)) {
            // Σ_k x_k* H(e_k* e_p), then one λ-product per p
            let mut c = self.desc.zero();
            for (k, a) in rows.iter().enumerate() {
                if let Some(a) = a {
                    c = &c + &(a * &self.h_star[k * n + p]);
                }
            }
            out += self.bc_h.lambda(&c) * self.bc_h.e() * self.bc_h.lambda(&self.row(&y.coeffs, p));
        }
        out
    }

    /// `⟨x, y⟩_ℓ ∈ K_V`, linear in `x`.
    pub fn inner_l(&self, x: &TensorElt, y: &TensorElt) -> CMat {
        let n = self.n;
        let m = self.bc_v.rank();
        let cols: Vec<Option<Element>> = (0..n).map(|l| nonzero_col(&x.coeffs, l).then(|| self.col(&x.coeffs, l))).collect();
        let mut out = CMat::zeros(m, m);
        for q in (0..n).filter(|&q| nonzero_col(&y.coeffs, q)) {
            let mut c = self.desc.zero();
            for (l, a) in cols.iter().enumerate() {
                if let Some(a) = a {
                    c = &c + &(a * &self.v_star[l * n + q]);
                }
            }
            out += self.bc_v.lambda(&c) * self.bc_v.e() * self.bc_v.lambda(&self.col(&y.coeffs, q).adjoint());
        }
        out
    }

    /// `‖x‖ = ‖⟨x, x⟩_r‖^{1/2}`.
    pub fn norm(&self, x: &TensorElt) -> f64 {
        linalg::op_norm(&self.inner_r(x, x)).sqrt()
    }

    /// Linear upper bound for `‖x‖`, `√m · ‖class(x)‖`; used for residuals
    /// of differences, where the square root in [`norm`](Self::norm) would
    /// amplify rounding.
    pub fn norm_bound(&self, x: &TensorElt) -> f64 {
        (self.bc_h.rank() as f64).sqrt() * x.class.norm()
    }

    /// `‖class(x) − class(y)‖` as a bound in the norm of `X`.
    pub fn distance(&self, x: &TensorElt, y: &TensorElt) -> f64 {
        (self.bc_h.rank() as f64).sqrt() * (&x.class - &y.class).norm()
    }

    /// `x · (a e_H b)`.
    pub fn right_elementary(&self, x: &TensorElt, a: &Element, b: &Element) -> TensorElt {
        let mut w = self.desc.zero();
        for l in 0..self.n {
            if nonzero_col(&x.coeffs, l) {
                w = &w + &(&self.col(&x.coeffs, l) * &self.inter.v().apply(&(&self.units[l] * a)));
            }
        }
        self.elementary(&w, b)
    }

    /// `(a e_V b) · x`.
    pub fn left_elementary(&self, a: &Element, b: &Element, x: &TensorElt) -> TensorElt {
        let mut w = self.desc.zero();
        for k in 0..self.n {
            if nonzero_row(&x.coeffs, k) {
                w = &w + &(&self.inter.h().apply(&(b * &self.units[k])) * &self.row(&x.coeffs, k));
            }
        }
        self.elementary(a, &w)
    }

    /// Right action for a presentation `k = Σ c[i·n+j] λ_H(e_i) e_H λ_H(e_j)`.
    pub fn right_act_presented(&self, x: &TensorElt, c: &CVec) -> TensorElt {
        let n = self.n;
        let mut out = CMat::zeros(n, n);
        for j in 0..n {
            let cj: Vec<(usize, C64)> = (0..n).map(|i| (i, c[i * n + j])).filter(|(_, z)| z.norm() > 0.0).collect();
            if cj.is_empty() {
                continue;
            }
            let mut w = self.desc.zero();
            for l in 0..n {
                if !nonzero_col(&x.coeffs, l) {
                    continue;
                }
                let mut s = self.desc.zero();
                for &(i, z) in &cj {
                    s = &s + &self.v_prod[l * n + i].scale(z);
                }
                w = &w + &(&self.col(&x.coeffs, l) * &s);
            }
            out.set_column(j, &(out.column(j) + w.coords()));
        }
        self.tensor(out)
    }

    /// Left action for a presentation `k = Σ c[i·n+j] λ_V(e_i) e_V λ_V(e_j)`.
    pub fn left_act_presented(&self, c: &CVec, x: &TensorElt) -> TensorElt {
        let n = self.n;
        let t: Vec<Element> = (0..n)
            .map(|j| {
                let mut s = self.desc.zero();
                for k in 0..n {
                    if nonzero_row(&x.coeffs, k) {
                        s = &s + &(&self.h_prod[j * n + k] * &self.row(&x.coeffs, k));
                    }
                }
                s
            })
            .collect();
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            let mut u = self.desc.zero();
            for (j, tj) in t.iter().enumerate() {
                let z = c[i * n + j];
                if z.norm() > 0.0 {
                    u = &u + &tj.scale(z);
                }
            }
            out.set_row(i, &u.coords().transpose());
        }
        self.tensor(out)
    }

    /// `x · k` for `k ∈ K_H`.
    pub fn right_act(&self, x: &TensorElt, k: &CMat) -> Result<TensorElt> {
        let c = self.bc_h.express_in_spanning(k)?;
        Ok(self.right_act_presented(x, &c))
    }

    /// `k · x` for `k ∈ K_V`.
    pub fn left_act(&self, k: &CMat, x: &TensorElt) -> Result<TensorElt> {
        let c = self.bc_v.express_in_spanning(k)?;
        Ok(self.left_act_presented(&c, x))
    }

    /// `[x, y, z]`, conjugate-linear in `y`.
    pub fn ternary(&self, x: &TensorElt, y: &TensorElt, z: &TensorElt) -> TensorElt {
        let n = self.n;
        let u = linalg::unvec(&(&self.ternary_left * linalg::vec_of(&x.coeffs)), n, n);
        let w = linalg::unvec(&(&self.ternary_right * linalg::vec_of(&z.coeffs.transpose())), n, n);
        self.tensor(u * y.coeffs.adjoint() * w.transpose())
    }

    /// Classes of `[e_i, e_j, e_k]` over the basis, at `(i·r + j)·r + k`.
    pub fn ternary_table(&self) -> Vec<CVec> {
        let n = self.n;
        let basis = self.basis();
        let us: Vec<CMat> = basis.iter().map(|x| linalg::unvec(&(&self.ternary_left * linalg::vec_of(&x.coeffs)), n, n)).collect();
        let ws: Vec<CMat> = basis.iter().map(|z| linalg::unvec(&(&self.ternary_right * linalg::vec_of(&z.coeffs.transpose())), n, n).transpose()).collect();
        let mut out = Vec::with_capacity(basis.len().pow(3));
        for u in &us {
            for y in &basis {
                let uy = u * y.coeffs.adjoint();
                for w in &ws {
                    out.push(&self.quotient.q * flat(&(&uy * w)));
                }
            }
        }
        out
    }

    /// `a · x` (`left == true`) or `x · a`.
    pub fn a_action(&self, a: &Element, x: &TensorElt, left: bool) -> TensorElt {
        if left {
            self.tensor(crate::basicc::left_mult(&self.desc, a) * &x.coeffs)
        } else {
            self.tensor(&x.coeffs * crate::basicc::right_mult(&self.desc, a).transpose())
        }
    }

    /// Matrix of `a·` on classes.
    pub fn left_a_matrix(&self, a: &Element) -> CMat {
        self.class_matrix(|x| self.a_action(a, x, true))
    }

    /// Matrix of `·a` on classes.
    pub fn right_a_matrix(&self, a: &Element) -> CMat {
        self.class_matrix(|x| self.a_action(a, x, false))
    }

    /// Matrix on class coordinates of a linear map on tensors.
    pub fn class_matrix(&self, f: impl Fn(&TensorElt) -> TensorElt) -> CMat {
        let cols: Vec<CVec> = self.basis().iter().map(|x| f(x).class).collect();
        linalg::columns(&cols, self.rank())
    }

    // ---- checks -------------------------------------------------------

    /// Null spaces of the two seminorms agree.
    pub fn two_seminorms(&self) -> Result<SeminormComparison> {
        let gr = self.gram_right();
        let gl = self.gram_left();
        let scale = linalg::op_norm(&gr).max(linalg::op_norm(&gl)).max(1.0);
        let kr = linalg::kernel(&gr, self.tol);
        let kl = linalg::kernel(&gl, self.tol);
        let cross = linalg::op_norm(&(&gl * &kr)).max(linalg::op_norm(&(&gr * &kl))) / scale;
        let ql = GramQuotient::new(&gl, self.tol)?;
        Ok(SeminormComparison { rank_right: self.rank(), rank_left: ql.rank(), cross_residual: cross })
    }

    /// Positivity and symmetry of both inner products on sampled tensors.
    pub fn positive_inner_products(&self, plan: &SweepPlan) -> f64 {
        let mut rng = plan.rng(52);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.samples {
            let x = self.random_pretensor(&mut rng);
            let y = self.random_pretensor(&mut rng);
            for (xx, xy, yx) in
                [(self.inner_r(&x, &x), self.inner_r(&x, &y), self.inner_r(&y, &x)), (self.inner_l(&x, &x), self.inner_l(&x, &y), self.inner_l(&y, &x))]
            {
                let s = linalg::op_norm(&xx).max(1.0);
                worst = worst
                    .max(-linalg::min_eigenvalue(&xx) / s)
                    .max(linalg::hermiticity_defect(&xx) / s)
                    .max(linalg::op_norm(&(xy.adjoint() - yx)) / s.max(linalg::op_norm(&xy)));
            }
            worst = worst.max(self.bc_h.k_membership(&self.inner_r(&x, &y))).max(self.bc_v.k_membership(&self.inner_l(&x, &y)));
        }
        worst
    }

    /// `⟨x,y⟩⟨y,x⟩ ≤ ⟨x,x⟩ ‖⟨y,y⟩‖` for both inner products on sampled unit vectors; returns the
    /// most negative eigenvalue of the difference (as a positive number).
    pub fn cauchy_schwarz(&self, plan: &SweepPlan) -> f64 {
        let mut rng = plan.rng(53);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.samples {
            let Some(x) = self.unit(self.random_pretensor(&mut rng)) else { continue };
            let Some(y) = self.unit(self.random_pretensor(&mut rng)) else { continue };
            for f in [Self::inner_r, Self::inner_l] {
                let xy = f(self, &x, &y);
                let d = f(self, &x, &x) * linalg::re(linalg::op_norm(&f(self, &y, &y))) - &xy * xy.adjoint();
                worst = worst.max(-linalg::min_eigenvalue(&d));
            }
        }
        worst
    }

    fn unit(&self, x: TensorElt) -> Option<TensorElt> {
        let n = self.norm(&x);
        (n > 1e-8).then(|| self.scale(&x, linalg::re(1.0 / n)))
    }

    /// Closed-form norms of `x = Σ a_i* ⊗ b_i` against the Gram norms.
    pub fn norm_two_ways(&self, terms: &[(Element, Element)]) -> Result<NormComparison> {
        let nt = terms.len();
        if nt == 0 {
            return Ok(NormComparison { via_h: 0.0, via_v: 0.0, gram_right: 0.0, gram_left: 0.0 });
        }
        let base = &self.desc;
        let aa: Vec<Vec<Element>> = (0..nt).map(|i| (0..nt).map(|j| &terms[i].0 * &terms[j].0.adjoint()).collect()).collect();
        let bb: Vec<Vec<Element>> = (0..nt).map(|i| (0..nt).map(|j| &terms[i].1 * &terms[j].1.adjoint()).collect()).collect();
        let aa = Element::from_grid(base, &aa)?;
        let bb = Element::from_grid(base, &bb)?;
        let (v, h) = (self.inter.v(), self.inter.h());
        let h_aa = h.apply_amplified(nt, &aa);
        let v_bb = v.apply_amplified(nt, &bb);
        let hv_bb = h.apply_amplified(nt, &v_bb);
        let vh_aa = v.apply_amplified(nt, &h_aa);
        let tol = self.tol;
        let via_h = (&h_aa.sqrt_psd(tol)? * &hv_bb.sqrt_psd(tol)?).op_norm();
        let via_v = (&vh_aa.sqrt_psd(tol)? * &v_bb.sqrt_psd(tol)?).op_norm();
        let mut x = self.tensor(CMat::zeros(self.n, self.n));
        for (a, b) in terms {
            x = self.add(&x, &self.elementary(&a.adjoint(), b));
        }
        let gram_right = self.norm(&x);
        let gram_left = linalg::op_norm(&self.inner_l(&x, &x)).sqrt();
        Ok(NormComparison { via_h, via_v, gram_right, gram_left })
    }

    /// Worst relative disagreement among the four norms on sampled sums of
    /// one to three elementary tensors.
    pub fn norm_formula(&self, plan: &SweepPlan) -> Result<f64> {
        let mut rng = plan.rng(54);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.samples {
            let nt = rng.random_range(1..=3);
            let terms: Vec<(Element, Element)> =
                (0..nt).map(|_| (sampling::random_element(&self.desc, &mut rng), sampling::random_element(&self.desc, &mut rng))).collect();
            worst = worst.max(self.norm_two_ways(&terms)?.max_relative_gap());
        }
        Ok(worst)
    }

    /// `ac⊗b = a⊗H(c)b` for `c ∈ V(A)` and `a⊗cb = aV(c)⊗b` for `c ∈ H(A)`,
    /// swept over matrix units `a, b`.
    pub fn tensor_sliding(&self) -> f64 {
        let (v, h) = (self.inter.v(), self.inter.h());
        let mut worst: f64 = 0.0;
        for c in self.inter.range_v().elements() {
            let hc = h.apply(&c);
            for a in &self.units {
                let ac = a * &c;
                for b in &self.units {
                    let d = self.distance(&self.elementary(&ac, b), &self.elementary(a, &(&hc * b)));
                    worst = worst.max(d);
                }
            }
        }
        for c in self.inter.range_h().elements() {
            let vc = v.apply(&c);
            for a in &self.units {
                let avc = a * &vc;
                for b in &self.units {
                    let d = self.distance(&self.elementary(a, &(&c * b)), &self.elementary(&avc, b));
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// Random element `Σ a_k* e_H b_k` of `K_H`, its presentation, and norm.
    fn random_k<R: Rng>(&self, rng: &mut R, terms: usize) -> (Vec<(Element, Element)>, CMat) {
        let pairs: Vec<(Element, Element)> =
            (0..terms).map(|_| (sampling::random_element(&self.desc, rng), sampling::random_element(&self.desc, rng))).collect();
        let mut k = CMat::zeros(self.bc_h.rank(), self.bc_h.rank());
        for (a, b) in &pairs {
            k += self.bc_h.elementary(&a.adjoint(), b);
        }
        (pairs, k)
    }

    fn act_pairs(&self, x: &TensorElt, pairs: &[(Element, Element)], scale: f64) -> TensorElt {
        let mut out = self.tensor(CMat::zeros(self.n, self.n));
        for (a, b) in pairs {
            out = self.add(&out, &self.right_elementary(x, &a.adjoint(), b));
        }
        self.scale(&out, linalg::re(scale))
    }

    /// `‖⟨ξ, Σ R_{a_k*, b_k} η⟩_r‖ ≤ ‖ξ‖‖η‖‖φ‖` on unit-normalized samples;
    /// returns the largest excess of the left side over the right side.
    pub fn right_action_bound(&self, plan: &SweepPlan) -> f64 {
        let mut rng = plan.rng(59);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.samples {
            let Some(xi) = self.unit(self.random_class(&mut rng)) else { continue };
            let Some(eta) = self.unit(self.random_class(&mut rng)) else { continue };
            let (pairs, k) = self.random_k(&mut rng, 3);
            let kn = linalg::op_norm(&k);
            if kn < 1e-8 {
                continue;
            }
            let moved = self.act_pairs(&eta, &pairs, 1.0 / kn);
            let lhs = linalg::op_norm(&self.inner_r(&xi, &moved));
            worst = worst.max(lhs - 1.0);
        }
        worst.max(0.0)
    }

    /// `‖ηφ‖ ≤ ‖η‖‖φ‖` on unit-normalized samples.
    pub fn module_contraction(&self, plan: &SweepPlan) -> f64 {
        let mut rng = plan.rng(510);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.samples {
            let Some(eta) = self.unit(self.random_class(&mut rng)) else { continue };
            let (pairs, k) = self.random_k(&mut rng, 3);
            let kn = linalg::op_norm(&k);
            if kn < 1e-8 {
                continue;
            }
            worst = worst.max(self.norm(&self.act_pairs(&eta, &pairs, 1.0 / kn)) - 1.0);
        }
        worst.max(0.0)
    }

    /// `count` slots, each the whole basis on a full sweep or one random class.
    fn draw_classes(&self, plan: &SweepPlan, rng: &mut CheckRng, count: usize) -> Vec<Vec<TensorElt>> {
        if plan.full {
            let b = self.basis();
            return vec![b; count];
        }
        (0..count).map(|_| vec![self.random_class(rng)]).collect()
    }

    /// The basis of `K` on a full sweep, else two random elements.
    fn draw_k(&self, bc: &BasicConstruction, plan: &SweepPlan, rng: &mut CheckRng) -> Vec<CMat> {
        let basis = bc.k_basis();
        if plan.full {
            return basis;
        }
        (0..2)
            .map(|_| {
                let mut k = CMat::zeros(bc.rank(), bc.rank());
                for b in &basis {
                    k += b * sampling::gaussian(rng);
                }
                k
            })
            .collect()
    }

    /// `(ηφ)ψ = η(φψ)` and `⟨ξ, ηφ⟩ = ⟨ξ, η⟩φ`.
    pub fn right_module(&self, plan: &SweepPlan) -> Result<f64> {
        let mut rng = plan.rng(511);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.rounds() {
            let xs = self.draw_classes(plan, &mut rng, 2);
            let ks = self.draw_k(&self.bc_h, plan, &mut rng);
            for eta in &xs[0] {
                for phi in &ks {
                    let eta_phi = self.right_act(eta, phi)?;
                    for psi in &ks {
                        let lhs = self.right_act(&eta_phi, psi)?;
                        let rhs = self.right_act(eta, &(phi * psi))?;
                        worst = worst.max(self.distance(&lhs, &rhs));
                    }
                    for xi in &xs[1] {
                        let d = self.inner_r(xi, &eta_phi) - self.inner_r(xi, eta) * phi;
                        worst = worst.max(linalg::op_norm(&d));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `⟨ξ,η⟩_ℓ ζ = ξ ⟨η,ζ⟩_r`.
    pub fn compatibility(&self, plan: &SweepPlan) -> Result<f64> {
        let mut rng = plan.rng(513);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.rounds() {
            let xs = self.draw_classes(plan, &mut rng, 3);
            for xi in &xs[0] {
                for eta in &xs[1] {
                    let l = self.inner_l(xi, eta);
                    for zeta in &xs[2] {
                        let lhs = self.left_act(&l, zeta)?;
                        let rhs = self.right_act(xi, &self.inner_r(eta, zeta))?;
                        worst = worst.max(self.distance(&lhs, &rhs));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// The elementary ternary formula agrees with `ξ⟨η,ζ⟩_r` and `⟨ξ,η⟩_ℓ ζ`.
    pub fn ternary_formula(&self, plan: &SweepPlan) -> Result<f64> {
        let mut rng = plan.rng(514);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.rounds() {
            let xs = self.draw_classes(plan, &mut rng, 3);
            for xi in &xs[0] {
                for eta in &xs[1] {
                    let l = self.inner_l(xi, eta);
                    for zeta in &xs[2] {
                        let t = self.ternary(xi, eta, zeta);
                        let via_r = self.right_act(xi, &self.inner_r(eta, zeta))?;
                        let via_l = self.left_act(&l, zeta)?;
                        worst = worst.max(self.distance(&t, &via_r)).max(self.distance(&t, &via_l));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Dimensions of the spans of the inner products against `K_H`, `K_V`.
    pub fn fullness(&self) -> Fullness {
        let b = self.basis();
        let mut right = Vec::new();
        let mut left = Vec::new();
        for x in &b {
            for y in &b {
                right.push(linalg::vec_of(&self.inner_r(x, y)));
                left.push(linalg::vec_of(&self.inner_l(x, y)));
            }
        }
        let mh = self.bc_h.rank();
        let mv = self.bc_v.rank();
        Fullness {
            span_right: linalg::orthonormal_range(&linalg::columns(&right, mh * mh), self.tol).ncols(),
            k_h_dim: self.bc_h.k_dim(),
            span_left: linalg::orthonormal_range(&linalg::columns(&left, mv * mv), self.tol).ncols(),
            k_v_dim: self.bc_v.k_dim(),
        }
    }

    /// `[ξ, aη, ζ] = [ξ, η, a*ζ]` and `[ξ, ηa, ζ] = [ξa*, η, ζ]`.
    pub fn coefficient_sliding(&self, plan: &SweepPlan) -> f64 {
        let mut rng = plan.rng(517);
        let mut worst: f64 = 0.0;
        for _ in 0..plan.rounds() {
            let xs = self.draw_classes(plan, &mut rng, 3);
            let coeffs = if plan.full { self.units.clone() } else { vec![sampling::random_element(&self.desc, &mut rng)] };
            for a in &coeffs {
                let astar = a.adjoint();
                for xi in &xs[0] {
                    let xi_as = self.a_action(&astar, xi, false);
                    for eta in &xs[1] {
                        let a_eta = self.a_action(a, eta, true);
                        let eta_a = self.a_action(a, eta, false);
                        for zeta in &xs[2] {
                            let l1 = self.ternary(xi, &a_eta, zeta);
                            let r1 = self.ternary(xi, eta, &self.a_action(&astar, zeta, true));
                            let l2 = self.ternary(xi, &eta_a, zeta);
                            let r2 = self.ternary(&xi_as, eta, zeta);
                            worst = worst.max(self.distance(&l1, &r1)).max(self.distance(&l2, &r2));
                        }
                    }
                }
            }
        }
        worst
    }

    /// The right action does not depend on how an element of `K_H` is
    /// written as a combination of `λ(a) e λ(b)`.
    pub fn presentation_independence(&self, plan: &SweepPlan) -> Result<f64> {
        let mut rng = plan.rng(9);
        let ker = self.bc_h.presentation_kernel();
        let mut worst: f64 = 0.0;
        for _ in 0..plan.samples.clamp(1, 8) {
            let x = self.random_class(&mut rng);
            let (_, k) = self.random_k(&mut rng, 2);
            let c = self.bc_h.express_in_spanning(&k)?;
            let shift = &ker * sampling::gaussian_vec(&mut rng, ker.ncols());
            let a = self.right_act_presented(&x, &c);
            let b = self.right_act_presented(&x, &(&c + shift));
            worst = worst.max(self.distance(&a, &b) / self.norm_bound(&a).max(1.0));
        }
        if worst > self.tol {
            return Err(Error::PresentationDependent(worst));
        }
        Ok(worst)
    }
}

fn nonzero_row(t: &CMat, k: usize) -> bool {
    t.row(k).iter().any(|z| z.norm() > 0.0)
}

fn nonzero_col(t: &CMat, l: usize) -> bool {
    t.column(l).iter().any(|z| z.norm() > 0.0)
}
