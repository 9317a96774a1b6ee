//! Covariant representations `(π, S)` on a finite-dimensional Hilbert space.
//!
//! The linking representation acts on `H1 ⊕ H2` with `H1 = X` and
//! `H2 = K_H`, both carrying the normalized trace of the basic construction
//! for `E_H`.  `π(a)` is left multiplication on each summand and `S` maps
//! `k ∈ K_H` to the class of `(1⊗1)·k`.

use serde::Serialize;

use crate::basicc::left_mult;
use crate::bimodule::BimoduleX;
use crate::error::{Error, Result};
use crate::fdstar::{AlgebraDescriptor, Element};
use crate::interaction::{self, Interaction, NondegeneracyGates, PartialIsometryData, SolutionChoice};
use crate::linalg::{self, CMat, CVec};
use crate::sampling;

#[derive(Clone, Debug)]
pub struct CovariantRep {
    inter: Interaction,
    /// `π(e_k)` for the matrix units of `A`.
    pi_basis: Vec<CMat>,
    s: CMat,
    /// Dimension of `H1`; `0` for representations not built from `X`.
    h1: usize,
    tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    /// `max ‖Sπ(a)S* − π(V(a))SS*‖ / ‖a‖` over the matrix units.
    pub covariance_v: f64,
    /// `max ‖S*π(a)S − π(H(a))S*S‖ / ‖a‖`.
    pub covariance_h: f64,
    /// `max ‖[π(V(a)), SS*]‖`.
    pub commutation_v: f64,
    /// `max ‖[π(H(a)), S*S]‖`.
    pub commutation_h: f64,
    pub worst_element: String,
}

impl CovarianceReport {
    pub fn worst(&self) -> f64 {
        self.covariance_v.max(self.covariance_h).max(self.commutation_v).max(self.commutation_h)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegeneracyReport {
    pub gates: NondegeneracyGates,
    pub nondegenerate: bool,
    /// Whether passing the range gate implied passing the algebra gate.
    pub implication_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressionReport {
    /// `a ↦ π(V(a))SS*` on `H(A)`: multiplicativity defect.
    pub multiplicative: f64,
    /// `|‖π(V(a))SS*‖ − ‖a‖|` on `H(A)`.
    pub isometric: f64,
    /// `|‖π(V(a))SS*‖ − ‖V(a)‖|` on `A`.
    pub norm_identity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub v_distance: f64,
    pub h_distance: f64,
    pub solve_residual: f64,
}

fn hs_mats(a: &CMat, b: &CMat) -> f64 {
    linalg::op_norm(&(a - b))
}

impl CovariantRep {
    /// The linking representation on `X ⊕ K_H`.
    pub fn build(x: &BimoduleX) -> Result<CovariantRep> {
        let inter = x.interaction().clone();
        let desc = inter.descriptor().clone();
        let bc = x.basic_h();
        let m = bc.rank();
        let kb = bc.k_basis();
        let (r, s) = (x.rank(), kb.len());
        let scale = linalg::re((m as f64).sqrt());

        let pi_basis: Vec<CMat> = desc
            .basis()
            .iter()
            .map(|a| {
                let la = bc.lambda(a);
                let on_k = CMat::from_fn(s, s, |u, v| (kb[u].adjoint() * &la * &kb[v]).trace());
                linalg::direct_sum(&x.left_a_matrix(a), &on_k)
            })
            .collect();

        let one = x.elementary(&desc.unit(), &desc.unit());
        let mut smat = CMat::zeros(r + s, r + s);
        for (v, k) in kb.iter().enumerate() {
            let col = x.right_act(&one, &(k * scale))?.class;
            smat.view_mut((0, r + v), (r, 1)).copy_from(&col);
        }
        let rep = CovariantRep { inter, pi_basis, s: smat, h1: r, tol: x.tol() };
        rep.verify()?;
        Ok(rep)
    }

    /// A representation given directly by `π(e_k)` and `S`; invariants are
    /// verified.
    pub fn from_parts(inter: &Interaction, pi_basis: Vec<CMat>, s: CMat) -> Result<CovariantRep> {
        let n = s.nrows();
        if pi_basis.len() != inter.descriptor().dim() || s.ncols() != n || pi_basis.iter().any(|p| p.shape() != (n, n)) {
            return Err(Error::ShapeMismatch("π(e_k) and S must be square of one size".into()));
        }
        let rep = CovariantRep { inter: inter.clone(), pi_basis, s, h1: 0, tol: inter.tol() };
        rep.verify()?;
        Ok(rep)
    }

    /// The regular representation of `A` with `S = 0`: covariant but degenerate.
    pub fn zero(inter: &Interaction) -> Result<CovariantRep> {
        let desc = inter.descriptor();
        let pi: Vec<CMat> = desc.basis().iter().map(|a| left_mult(desc, a)).collect();
        CovariantRep::from_parts(inter, pi, CMat::zeros(desc.dim(), desc.dim()))
    }

    fn verify(&self) -> Result<()> {
        let desc = self.inter.descriptor();
        let basis = desc.basis();
        for (k, a) in basis.iter().enumerate() {
            let star = hs_mats(&self.pi(&a.adjoint()), &self.pi_basis[k].adjoint());
            if star > self.tol {
                return Err(self.invariant("π(a*) = π(a)*", k, star));
            }
            for (l, b) in basis.iter().enumerate() {
                let d = hs_mats(&self.pi(&(a * b)), &(&self.pi_basis[k] * &self.pi_basis[l]));
                if d > self.tol {
                    return Err(self.invariant("π multiplicative", k * desc.dim() + l, d));
                }
            }
        }
        let sn = linalg::op_norm(&self.s).max(1.0);
        let pi_res = hs_mats(&(&self.s * self.s.adjoint() * &self.s), &self.s) / sn;
        if pi_res > self.tol {
            return Err(Error::NotPartialIsometry(pi_res));
        }
        let cov = self.covariance();
        if cov.covariance_v.max(cov.covariance_h) > self.tol {
            return Err(Error::Invariant { check: "covariance".into(), element: cov.worst_element.clone(), residual: cov.covariance_v.max(cov.covariance_h) });
        }
        Ok(())
    }

    fn invariant(&self, check: &str, k: usize, residual: f64) -> Error {
        let desc = self.inter.descriptor();
        let element = if k < desc.dim() { desc.label(k) } else { format!("({}, {})", desc.label(k / desc.dim()), desc.label(k % desc.dim())) };
        Error::Invariant { check: check.into(), element, residual }
    }

    pub fn interaction(&self) -> &Interaction {
        &self.inter
    }

    /// Dimension of the Hilbert space.
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// Dimension of the `X` summand (`0` if not built from `X`).
    pub fn x_dim(&self) -> usize {
        self.h1
    }

    pub fn s(&self) -> &CMat {
        &self.s
    }

    pub fn pi_basis(&self) -> &[CMat] {
        &self.pi_basis
    }

    pub fn pi(&self, a: &Element) -> CMat {
        let c = a.coords();
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for (k, p) in self.pi_basis.iter().enumerate() {
            if c[k].norm() > 0.0 {
                out += p * c[k];
            }
        }
        out
    }

    /// Covariance and range-projection commutation over the matrix units.
    pub fn covariance(&self) -> CovarianceReport {
        let (v, h) = (self.inter.v(), self.inter.h());
        let p = &self.s * self.s.adjoint();
        let q = self.s.adjoint() * &self.s;
        let desc = self.inter.descriptor();
        let mut rep = CovarianceReport { covariance_v: 0.0, covariance_h: 0.0, commutation_v: 0.0, commutation_h: 0.0, worst_element: String::new() };
        let mut worst = -1.0;
        for (k, a) in desc.basis().iter().enumerate() {
            let pa = &self.pi_basis[k];
            let an = a.op_norm().max(f64::MIN_POSITIVE);
            let pv = self.pi(&v.apply(a));
            let ph = self.pi(&h.apply(a));
            let cv = hs_mats(&(&self.s * pa * self.s.adjoint()), &(&pv * &p)) / an;
            let ch = hs_mats(&(self.s.adjoint() * pa * &self.s), &(&ph * &q)) / an;
            rep.covariance_v = rep.covariance_v.max(cv);
            rep.covariance_h = rep.covariance_h.max(ch);
            rep.commutation_v = rep.commutation_v.max(hs_mats(&(&pv * &p), &(&p * &pv)));
            rep.commutation_h = rep.commutation_h.max(hs_mats(&(&ph * &q), &(&q * &ph)));
            if cv.max(ch) > worst {
                worst = cv.max(ch);
                rep.worst_element = desc.label(k);
            }
        }
        rep
    }

    fn as_element(&self, m: &CMat) -> Element {
        let b = AlgebraDescriptor::full(self.dim()).unwrap();
        Element::from_blocks(&b, vec![m.clone()]).unwrap()
    }

    /// Smallest singular values of `x ↦ π(x)S` and `x ↦ Sπ(x)` on the ranges
    /// and on the *-algebras they generate.
    pub fn nondegeneracy(&self) -> Result<NondegeneracyReport> {
        if self.dim() == 0 {
            return Err(Error::Degenerate("zero-dimensional representation".into()));
        }
        let s = self.as_element(&self.s);
        let gates = interaction::nondegeneracy_gates(&self.inter, |x| self.as_element(&self.pi(x)), &s)?;
        let tol = self.tol;
        let pass = |g: Option<f64>| g.is_none_or(|x| x > tol);
        let implication_holds =
            (!pass(gates.right_on_range_v) || pass(gates.right_on_algebra_v)) && (!pass(gates.left_on_range_h) || pass(gates.left_on_algebra_h));
        Ok(NondegeneracyReport { nondegenerate: gates.nondegenerate(tol), gates, implication_holds })
    }

    /// `‖π(V(1))SS* − SS*‖` and `‖π(H(1))S*S − S*S‖`.
    pub fn unit_projection(&self) -> f64 {
        let one = self.inter.descriptor().unit();
        let p = &self.s * self.s.adjoint();
        let q = self.s.adjoint() * &self.s;
        let a = hs_mats(&(self.pi(&self.inter.v().apply(&one)) * &p), &p);
        let b = hs_mats(&(self.pi(&self.inter.h().apply(&one)) * &q), &q);
        a.max(b)
    }

    /// `a ↦ π(V(a))SS*` on `H(A)` is an isometric *-homomorphism and
    /// `‖π(V(a))SS*‖ = ‖V(a)‖` on `A`; sampled with `samples` random elements.
    pub fn compression(&self, samples: usize, seed: u64) -> CompressionReport {
        let v = self.inter.v();
        let p = &self.s * self.s.adjoint();
        let comp = |a: &Element| self.pi(&v.apply(a)) * &p;
        let range = self.inter.range_h().elements();
        let mut multiplicative: f64 = 0.0;
        for a in &range {
            for b in &range {
                multiplicative = multiplicative.max(hs_mats(&comp(&(a * b)), &(comp(a) * comp(b))));
            }
            multiplicative = multiplicative.max(hs_mats(&comp(&a.adjoint()), &comp(a).adjoint()));
        }
        let mut rng = sampling::seeded(seed);
        let desc = self.inter.descriptor();
        let mut isometric: f64 = 0.0;
        let mut norm_identity: f64 = 0.0;
        let ranged = self.inter.range_h();
        let mut samples_h: Vec<Element> = range.clone();
        let mut samples_a: Vec<Element> = desc.basis();
        for _ in 0..samples {
            let c = sampling::gaussian_vec(&mut rng, ranged.dim());
            samples_h.push(Element::from_coords(desc, &(ranged.coords() * c)).unwrap());
            samples_a.push(sampling::random_element(desc, &mut rng));
        }
        for a in &samples_h {
            isometric = isometric.max((linalg::op_norm(&comp(a)) - a.op_norm()).abs() / a.op_norm().max(1.0));
        }
        for a in &samples_a {
            let va = v.apply(a).op_norm();
            norm_identity = norm_identity.max((linalg::op_norm(&comp(a)) - va).abs() / va.max(1.0));
        }
        CompressionReport { multiplicative, isometric, norm_identity }
    }

    /// Smallest singular value of `a ↦ π(a)` for the normalized trace on `A`
    /// and the normalized Hilbert-Schmidt norm on the codomain.
    pub fn pi_injectivity(&self) -> f64 {
        let desc = self.inter.descriptor();
        let w = (desc.unit_trace() as f64 / self.dim().max(1) as f64).sqrt();
        let cols: Vec<CVec> = self.pi_basis.iter().map(|p| linalg::vec_of(p) * linalg::re(w)).collect();
        linalg::singular_values(&linalg::columns(&cols, self.dim() * self.dim())).iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Direct sum with the regular representation of `A` carrying `S ⊕ 0`.
    pub fn faithful_extension(&self) -> Result<FaithfulRep> {
        let desc = self.inter.descriptor();
        let pi: Vec<CMat> = desc.basis().iter().zip(&self.pi_basis).map(|(a, p)| linalg::direct_sum(p, &left_mult(desc, a))).collect();
        let s = linalg::direct_sum(&self.s, &CMat::zeros(desc.dim(), desc.dim()));
        let mut rep = CovariantRep::from_parts(&self.inter, pi, s)?;
        rep.h1 = self.h1;
        Ok(FaithfulRep { rep })
    }

    /// Recover `(V, H)` from `(M_dim, π(A), S)` and measure the distance to
    /// the original maps on the basis.
    pub fn round_trip(&self) -> Result<RoundTrip> {
        let b = AlgebraDescriptor::full(self.dim())?;
        let data = PartialIsometryData {
            a: self.inter.descriptor().clone(),
            embed: self.pi_basis.iter().map(|p| self.as_element(p)).collect(),
            s: self.as_element(&self.s),
            b,
        };
        let derived = interaction::derive_from_partial_isometry(&data, &SolutionChoice::NearestIdentity, self.tol)?;
        Ok(RoundTrip {
            v_distance: derived.interaction.v().basis_distance(self.inter.v()),
            h_distance: derived.interaction.h().basis_distance(self.inter.h()),
            solve_residual: derived.solve_residual,
        })
    }
}

/// A covariant representation whose `π` is injective.
#[derive(Clone, Debug)]
pub struct FaithfulRep {
    rep: CovariantRep,
}

impl FaithfulRep {
    pub fn rep(&self) -> &CovariantRep {
        &self.rep
    }

    pub fn injectivity(&self) -> f64 {
        self.rep.pi_injectivity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::re;

    fn flip_rep() -> CovariantRep {
        CovariantRep::build(&BimoduleX::build(&fixtures::flip()).unwrap()).unwrap()
    }

    #[test]
    fn flip_rep_is_the_two_by_two_model() {
        let rep = flip_rep();
        assert_eq!(rep.dim(), 2);
        let d = fixtures::c2();
        let a = Element::diagonal(&d, &[re(3.0), re(-2.0)]).unwrap();
        let want = CMat::from_row_slice(2, 2, &[re(3.0), re(0.0), re(0.0), re(-2.0)]);
        assert!(hs_mats(&rep.pi(&a), &want) < 1e-12);
        let e12 = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        assert!(hs_mats(rep.s(), &e12) < 1e-12);
        let cov = rep.covariance();
        assert!(cov.worst() < 1e-12);
        let nd = rep.nondegeneracy().unwrap();
        assert!(nd.nondegenerate && nd.implication_holds);
        assert!((nd.gates.smallest() - 1.0).abs() < 1e-12);
        assert!(rep.unit_projection() < 1e-12);
        let c = rep.compression(10, 4);
        assert!(c.multiplicative < 1e-12 && c.isometric < 1e-12 && c.norm_identity < 1e-12);
    }

    #[test]
    fn zero_rep_is_degenerate() {
        let rep = CovariantRep::zero(&fixtures::flip()).unwrap();
        let nd = rep.nondegeneracy().unwrap();
        assert!(!nd.nondegenerate);
        assert_eq!(nd.gates.smallest(), 0.0);
    }

    #[test]
    fn faithful_extension_keeps_covariance() {
        let rep = flip_rep();
        let f = rep.faithful_extension().unwrap();
        assert_eq!(f.rep().dim(), 4);
        assert!(f.rep().covariance().worst() < 1e-12);
        assert!(f.injectivity() > 0.5);
        assert!(f.rep().nondegeneracy().unwrap().nondegenerate);
        // π of the zero representation is already injective; S = 0 stays degenerate
        let z = CovariantRep::zero(&fixtures::flip()).unwrap().faithful_extension().unwrap();
        assert!(z.injectivity() > 0.5);
    }

    #[test]
    fn round_trip_recovers_the_maps() {
        for inter in [fixtures::flip(), fixtures::flip().amplified(2).unwrap(), fixtures::identity(&fixtures::c2())] {
            let rep = CovariantRep::build(&BimoduleX::build(&inter).unwrap()).unwrap();
            assert!(rep.covariance().worst() < 1e-9);
            let rt = rep.round_trip().unwrap();
            assert!(rt.v_distance < 1e-9 && rt.h_distance < 1e-9, "{rt:?}");
        }
    }

    #[test]
    fn broken_covariance_is_reported() {
        let inter = fixtures::flip();
        let rep = flip_rep();
        // S = e21 swaps the roles of V and H
        let s = rep.s().transpose();
        let err = CovariantRep::from_parts(&inter, rep.pi_basis().to_vec(), s).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }), "{err}");
    }
}
