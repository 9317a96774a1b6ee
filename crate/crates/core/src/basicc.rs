//! Reduced basic construction of a conditional expectation `E: A → B`.
//!
//! `A` is completed to the Hilbert space given by `⟨a, b⟩ = τ(E(a* b))`, with
//! `τ` the normalized trace, and the null space is divided out.  `λ(a)` is
//! left multiplication, `e` is `[a] ↦ [E(a)]`, and `K` is the span of the
//! operators `λ(a) e λ(b)`.  Everything is stored as matrices on orthonormal
//! coordinates of the quotient.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fdstar::{AlgebraDescriptor, Element};
use crate::interaction::CondExp;
use crate::linalg::{self, CMat, CVec};

/// Window (in orders of magnitude on either side of the rank cut) inside
/// which an eigenvalue makes the quotient ill-conditioned.
const GAP_WINDOW: f64 = 1e3;

/// Quotient of a coordinate space by the null space of a positive
/// semidefinite Gram matrix.
#[derive(Clone, Debug)]
pub struct GramQuotient {
    /// `rank × n`; `‖Q x‖² = x* G x`.
    pub q: CMat,
    /// `n × rank` right inverse of `q` supported on the range of `G`.
    pub lift: CMat,
    pub spectrum: Vec<f64>,
    /// Smallest kept eigenvalue over the largest dropped one.
    pub gap: Option<f64>,
}

impl GramQuotient {
    pub fn new(gram: &CMat, tol: f64) -> Result<GramQuotient> {
        let n = gram.nrows();
        let (vals, vecs) = linalg::hermitian_eigen(gram);
        let top = vals.last().cloned().unwrap_or(0.0).max(0.0);
        if let Some(&low) = vals.first() {
            if low < -tol * top.max(1.0) {
                return Err(Error::NotPositive(low));
            }
        }
        let cut = tol * top;
        if top > 0.0 {
            if let Some(bad) = vals.iter().find(|&&x| x > cut / GAP_WINDOW && x < cut * GAP_WINDOW) {
                return Err(Error::IllConditioned(format!("Gram eigenvalue {bad:.3e} within {GAP_WINDOW:e}x of the cut {cut:.3e}")));
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&k| top > 0.0 && vals[k] > cut).collect();
        let dropped = (0..n).filter(|k| !keep.contains(k)).map(|k| vals[k].abs()).fold(0.0, f64::max);
        let smallest_kept = keep.iter().map(|&k| vals[k]).fold(f64::INFINITY, f64::min);
        let gap = if keep.is_empty() || keep.len() == n {
            None
        } else if dropped == 0.0 {
            Some(f64::INFINITY)
        } else {
            Some(smallest_kept / dropped)
        };
        let u = linalg::columns(&keep.iter().map(|&k| vecs.column(k).into_owned()).collect::<Vec<_>>(), n);
        let w = linalg::canonical_basis(&u);
        let c = w.adjoint() * gram * &w;
        let (cv, cu) = linalg::hermitian_eigen(&c);
        let root = &cu * CMat::from_diagonal(&CVec::from_iterator(cv.len(), cv.iter().map(|x| linalg::re(x.sqrt())))) * cu.adjoint();
        let inv_root = &cu * CMat::from_diagonal(&CVec::from_iterator(cv.len(), cv.iter().map(|x| linalg::re(1.0 / x.sqrt())))) * cu.adjoint();
        Ok(GramQuotient { q: root * w.adjoint(), lift: w * inv_root, spectrum: vals, gap })
    }

    pub fn rank(&self) -> usize {
        self.q.nrows()
    }

    /// Matrix on the quotient of an operator that preserves the null space.
    pub fn compress(&self, op: &CMat) -> CMat {
        &self.q * op * &self.lift
    }

    /// How far `op` is from preserving the null space.
    pub fn leakage(&self, op: &CMat) -> f64 {
        let n = self.q.ncols();
        let null = CMat::identity(n, n) - &self.lift * &self.q;
        linalg::op_norm(&(&self.q * op * null))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasicResiduals {
    pub well_defined: f64,
    pub projection: f64,
    pub jones: f64,
    pub range_isometry: f64,
}

#[derive(Clone, Debug)]
pub struct BasicConstruction {
    desc: AlgebraDescriptor,
    expectation: CondExp,
    quotient: GramQuotient,
    lambda: Vec<CMat>,
    e: CMat,
    spanning: CMat,
    spanning_pinv: CMat,
    k_basis: CMat,
    residuals: BasicResiduals,
    tol: f64,
}

impl BasicConstruction {
    pub fn build(expectation: &CondExp, tol: f64) -> Result<BasicConstruction> {
        let desc = expectation.map().descriptor().clone();
        let n = desc.dim();
        let basis = desc.basis();
        let mut gram = CMat::zeros(n, n);
        for (k, a) in basis.iter().enumerate() {
            for (l, b) in basis.iter().enumerate() {
                gram[(k, l)] = expectation.apply(&(&a.adjoint() * b)).normalized_trace();
            }
        }
        let quotient = GramQuotient::new(&gram, tol)?;
        let left: Vec<CMat> = basis.iter().map(|x| left_mult(&desc, x)).collect();
        let well_defined = left.iter().map(|l| quotient.leakage(l)).fold(0.0, f64::max);
        let lambda: Vec<CMat> = left.iter().map(|l| quotient.compress(l)).collect();
        let e = quotient.compress(expectation.map().matrix());
        let m = quotient.rank();

        let mut cols = Vec::with_capacity(n * n);
        for li in &lambda {
            let le = li * &e;
            for lj in &lambda {
                cols.push(linalg::vec_of(&(&le * lj)));
            }
        }
        let spanning = linalg::columns(&cols, m * m);
        let k_basis = linalg::orthonormal_range(&spanning, tol);
        let spanning_pinv = linalg::pinv(&spanning, 1e-12);

        let projection = linalg::op_norm(&(&e * &e - &e)).max(linalg::hermiticity_defect(&e));
        let mut bc = BasicConstruction {
            desc,
            expectation: expectation.clone(),
            quotient,
            lambda,
            e,
            spanning,
            spanning_pinv,
            k_basis,
            residuals: BasicResiduals { well_defined, projection, jones: 0.0, range_isometry: 0.0 },
            tol,
        };
        let jones = basis
            .iter()
            .map(|a| {
                let lhs = &bc.e * bc.lambda(a) * &bc.e;
                let rhs = bc.lambda(&expectation.apply(a)) * &bc.e;
                linalg::op_norm(&(lhs - rhs))
            })
            .fold(0.0, f64::max);
        let range_isometry = expectation.range().elements().iter().map(|x| (linalg::op_norm(&(bc.lambda(x) * &bc.e)) - x.op_norm()).abs()).fold(0.0, f64::max);
        bc.residuals.jones = jones;
        bc.residuals.range_isometry = range_isometry;
        Ok(bc)
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.desc
    }

    pub fn expectation(&self) -> &CondExp {
        &self.expectation
    }

    pub fn quotient(&self) -> &GramQuotient {
        &self.quotient
    }

    /// Dimension of the quotient Hilbert space.
    pub fn rank(&self) -> usize {
        self.quotient.rank()
    }

    pub fn lambda(&self, x: &Element) -> CMat {
        let c = x.coords();
        let m = self.rank();
        let mut out = CMat::zeros(m, m);
        for (k, l) in self.lambda.iter().enumerate() {
            if c[k] != linalg::ZERO {
                out += l * c[k];
            }
        }
        out
    }

    pub fn lambda_basis(&self) -> &[CMat] {
        &self.lambda
    }

    pub fn e(&self) -> &CMat {
        &self.e
    }

    /// `λ(a) e λ(b)`.
    pub fn elementary(&self, a: &Element, b: &Element) -> CMat {
        self.lambda(a) * &self.e * self.lambda(b)
    }

    pub fn k_dim(&self) -> usize {
        self.k_basis.ncols()
    }

    /// Orthonormal basis of `K` for the trace inner product on matrices.
    pub fn k_basis(&self) -> Vec<CMat> {
        let m = self.rank();
        (0..self.k_dim()).map(|j| linalg::unvec(&self.k_basis.column(j).into_owned(), m, m)).collect()
    }

    pub fn residuals(&self) -> &BasicResiduals {
        &self.residuals
    }

    /// Distance of a matrix from `K`, relative to `max(1, ‖k‖)`.
    pub fn k_membership(&self, k: &CMat) -> f64 {
        let v = linalg::vec_of(k);
        let p = &self.k_basis * (self.k_basis.adjoint() * &v);
        (v - p).norm() / linalg::op_norm(k).max(1.0)
    }

    /// Coefficients `c` with `k = Σ_ij c[i·n + j] λ(e_i) e λ(e_j)` (minimum norm).
    pub fn express_in_spanning(&self, k: &CMat) -> Result<CVec> {
        let v = linalg::vec_of(k);
        let c = &self.spanning_pinv * &v;
        let r = (&self.spanning * &c - v).norm() / linalg::op_norm(k).max(1.0);
        if r > self.tol {
            return Err(Error::NotInSpan(r));
        }
        Ok(c)
    }

    /// Directions in coefficient space that present the zero operator.
    pub fn presentation_kernel(&self) -> CMat {
        linalg::kernel(&self.spanning, 1e-10)
    }
}

/// Matrix of `y ↦ x y` on coordinates.
pub fn left_mult(desc: &AlgebraDescriptor, x: &Element) -> CMat {
    let cols: Vec<CVec> = desc.basis().iter().map(|e| (x * e).coords()).collect();
    linalg::columns(&cols, desc.dim())
}

/// Matrix of `y ↦ y x` on coordinates.
pub fn right_mult(desc: &AlgebraDescriptor, x: &Element) -> CMat {
    let cols: Vec<CVec> = desc.basis().iter().map(|e| (e * x).coords()).collect();
    linalg::columns(&cols, desc.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::interaction::DEFAULT_TOL;
    use crate::linalg::re;
    use crate::posmap::LinMap;
    use crate::sampling::{random_element, seeded};
    use proptest::prelude::*;

    fn scalar_expectation(n: usize) -> CondExp {
        let d = AlgebraDescriptor::full(n).unwrap();
        let map = LinMap::from_fn(&d, |x| d.unit().scale(x.normalized_trace())).unwrap();
        CondExp::new(map, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn flip_expectation_has_rank_one_gram() {
        let flip = fixtures::flip();
        let bc = BasicConstruction::build(&flip.expectation_h().unwrap(), DEFAULT_TOL).unwrap();
        // hand Gram matrix [[0, 0], [0, 1]]
        assert_eq!(bc.quotient().spectrum.len(), 2);
        assert!(bc.quotient().spectrum[0].abs() < 1e-15 && (bc.quotient().spectrum[1] - 1.0).abs() < 1e-15);
        assert_eq!(bc.rank(), 1);
        let a = Element::diagonal(bc.descriptor(), &[re(3.0), re(7.0)]).unwrap();
        assert!((bc.lambda(&a)[(0, 0)] - re(7.0)).norm() < 1e-14);
        assert!((bc.e()[(0, 0)] - re(1.0)).norm() < 1e-14);
        assert_eq!(bc.k_dim(), 1);
    }

    #[test]
    fn identity_expectation_gives_left_regular_representation() {
        let d = AlgebraDescriptor::full(2).unwrap();
        let bc = BasicConstruction::build(&fixtures::identity(&d).expectation_v().unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(bc.rank(), 4);
        assert!((bc.e() - CMat::identity(4, 4)).norm() < 1e-12);
        assert_eq!(bc.k_dim(), 4);
    }

    #[test]
    fn scalar_expectation_on_m2_gives_m4() {
        let bc = BasicConstruction::build(&scalar_expectation(2), DEFAULT_TOL).unwrap();
        assert_eq!(bc.rank(), 4);
        assert_eq!(bc.k_dim(), 16);
        let r = bc.residuals();
        assert!(r.well_defined < 1e-12 && r.projection < 1e-12 && r.jones < 1e-12 && r.range_isometry < 1e-12);
        // e has rank one: it projects onto the scalars
        assert!((bc.e().trace() - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn ill_conditioned_gram_is_reported() {
        let g = CMat::from_diagonal(&CVec::from_vec(vec![re(1.0), re(1e-9)]));
        assert!(matches!(GramQuotient::new(&g, 1e-9), Err(Error::IllConditioned(_))));
        let q = GramQuotient::new(&CMat::from_diagonal(&CVec::from_vec(vec![re(1.0), re(0.0)])), 1e-9).unwrap();
        assert_eq!(q.rank(), 1);
        assert_eq!(q.gap, Some(f64::INFINITY));
    }

    #[test]
    fn elements_outside_k_are_rejected() {
        let flip = fixtures::flip();
        let bc = BasicConstruction::build(&flip.expectation_v().unwrap(), DEFAULT_TOL).unwrap();
        let k = bc.k_basis()[0].clone();
        let c = bc.express_in_spanning(&k).unwrap();
        assert!(c.len() == 4);
        let bc2 = BasicConstruction::build(&scalar_expectation(2), DEFAULT_TOL).unwrap();
        assert!(bc2.express_in_spanning(&CMat::identity(4, 4)).is_ok());
        let ident = BasicConstruction::build(&fixtures::identity(&AlgebraDescriptor::full(2).unwrap()).expectation_v().unwrap(), DEFAULT_TOL).unwrap();
        // a rank-one operator is not a left multiplication
        let mut r1 = CMat::zeros(4, 4);
        r1[(0, 0)] = re(1.0);
        assert!(matches!(ident.express_in_spanning(&r1), Err(Error::NotInSpan(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn jones_relation_on_random_elements(seed in any::<u64>(), n in 1usize..=3) {
            let ce = scalar_expectation(n);
            let bc = BasicConstruction::build(&ce, DEFAULT_TOL).unwrap();
            let a = random_element(bc.descriptor(), &mut seeded(seed));
            let lhs = bc.e() * bc.lambda(&a) * bc.e();
            let rhs = bc.lambda(&ce.apply(&a)) * bc.e();
            prop_assert!(linalg::op_norm(&(lhs - rhs)) <= 1e-9 * a.op_norm().max(1.0));
            // λ is a *-homomorphism
            let b = random_element(bc.descriptor(), &mut seeded(seed ^ 1));
            let prod = bc.lambda(&(&a * &b)) - bc.lambda(&a) * bc.lambda(&b);
            prop_assert!(linalg::op_norm(&prod) <= 1e-9 * (a.op_norm() * b.op_norm()).max(1.0));
            let star = bc.lambda(&a.adjoint()) - bc.lambda(&a).adjoint();
            prop_assert!(linalg::op_norm(&star) <= 1e-9 * a.op_norm().max(1.0));
        }
    }
}
