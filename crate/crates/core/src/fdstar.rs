//! Finite-dimensional C*-algebras `M_{d_1} ⊕ ... ⊕ M_{d_k}`.
//!
//! The canonical basis is the list of matrix units, block by block and
//! row-major inside a block.  Coordinates with respect to it are orthonormal
//! for the unnormalized trace `⟨x, y⟩ = Σ_i tr(x_i* y_i)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ONE};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraDescriptor {
    blocks: Vec<usize>,
}

impl TryFrom<Vec<usize>> for AlgebraDescriptor {
    type Error = Error;
    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        AlgebraDescriptor::new(blocks)
    }
}

impl From<AlgebraDescriptor> for Vec<usize> {
    fn from(d: AlgebraDescriptor) -> Self {
        d.blocks
    }
}

impl AlgebraDescriptor {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidDescriptor("no blocks".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidDescriptor(format!("zero block size in {blocks:?}")));
        }
        Ok(AlgebraDescriptor { blocks })
    }

    /// The full matrix algebra `M_n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|d| d * d).sum()
    }

    /// `Σ d_i`, the trace of the unit.
    pub fn unit_trace(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.blocks[..block].iter().map(|d| d * d).sum()
    }

    pub fn index(&self, block: usize, p: usize, q: usize) -> usize {
        self.offset(block) + p * self.blocks[block] + q
    }

    /// Inverse of [`index`](Self::index).
    pub fn locate(&self, k: usize) -> (usize, usize, usize) {
        let mut rest = k;
        for (i, &d) in self.blocks.iter().enumerate() {
            if rest < d * d {
                return (i, rest / d, rest % d);
            }
            rest -= d * d;
        }
        panic!("basis index {k} out of range for {:?}", self.blocks)
    }

    /// Descriptor of `M_n(A)`.
    pub fn amplified(&self, n: usize) -> Self {
        AlgebraDescriptor { blocks: self.blocks.iter().map(|d| d * n).collect() }
    }

    /// Human-readable name of the k-th matrix unit, 1-based.
    pub fn label(&self, k: usize) -> String {
        let (i, p, q) = self.locate(k);
        if self.blocks.len() == 1 {
            format!("e({},{})", p + 1, q + 1)
        } else {
            format!("e{}({},{})", i + 1, p + 1, q + 1)
        }
    }

    pub fn matrix_unit(&self, k: usize) -> Element {
        let mut c = CVec::zeros(self.dim());
        c[k] = ONE;
        Element::from_coords(self, &c).unwrap()
    }

    pub fn basis(&self) -> Vec<Element> {
        (0..self.dim()).map(|k| self.matrix_unit(k)).collect()
    }

    pub fn zero(&self) -> Element {
        Element { desc: self.clone(), blocks: self.blocks.iter().map(|&d| CMat::zeros(d, d)).collect() }
    }

    pub fn unit(&self) -> Element {
        Element { desc: self.clone(), blocks: self.blocks.iter().map(|&d| CMat::identity(d, d)).collect() }
    }

    /// Unit of the i-th block, a minimal central projection.
    pub fn block_unit(&self, block: usize) -> Element {
        let mut z = self.zero();
        z.blocks[block] = CMat::identity(self.blocks[block], self.blocks[block]);
        z
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|d| format!("M{d}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    desc: AlgebraDescriptor,
    blocks: Vec<CMat>,
}

impl Element {
    pub fn from_blocks(desc: &AlgebraDescriptor, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != desc.blocks.len() {
            return Err(Error::ShapeMismatch(format!("{} blocks given for descriptor {:?}", blocks.len(), desc.blocks)));
        }
        for (b, &d) in blocks.iter().zip(&desc.blocks) {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::ShapeMismatch(format!("block {}x{} where {d}x{d} expected", b.nrows(), b.ncols())));
            }
        }
        Ok(Element { desc: desc.clone(), blocks })
    }

    pub fn from_coords(desc: &AlgebraDescriptor, c: &CVec) -> Result<Self> {
        if c.len() != desc.dim() {
            return Err(Error::ShapeMismatch(format!("{} coordinates for dimension {}", c.len(), desc.dim())));
        }
        let mut k = 0;
        let blocks = desc
            .blocks
            .iter()
            .map(|&d| {
                let mut m = CMat::zeros(d, d);
                for p in 0..d {
                    for q in 0..d {
                        m[(p, q)] = c[k];
                        k += 1;
                    }
                }
                m
            })
            .collect();
        Ok(Element { desc: desc.clone(), blocks })
    }

    /// Diagonal element of a commutative algebra `ℂ^n` from its entries.
    pub fn diagonal(desc: &AlgebraDescriptor, entries: &[C64]) -> Result<Self> {
        if desc.blocks.iter().any(|&d| d != 1) {
            return Err(Error::ShapeMismatch("diagonal() needs a commutative descriptor".into()));
        }
        Self::from_coords(desc, &CVec::from_column_slice(entries))
    }

    pub fn coords(&self) -> CVec {
        let mut c = CVec::zeros(self.desc.dim());
        let mut k = 0;
        for b in &self.blocks {
            for p in 0..b.nrows() {
                for q in 0..b.ncols() {
                    c[k] = b[(p, q)];
                    k += 1;
                }
            }
        }
        c
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.desc
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.desc != other.desc {
            return Err(Error::ShapeMismatch(format!("{} vs {}", self.desc, other.desc)));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a * b))
    }

    pub fn plus(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    fn zip(&self, other: &Element, f: impl Fn(&CMat, &CMat) -> CMat) -> Element {
        Element { desc: self.desc.clone(), blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect() }
    }

    fn map(&self, f: impl Fn(&CMat) -> CMat) -> Element {
        Element { desc: self.desc.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn scale(&self, s: C64) -> Element {
        self.map(|b| b * s)
    }

    pub fn adjoint(&self) -> Element {
        self.map(|b| b.adjoint())
    }

    /// Operator (C*) norm: the largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt norm for the unnormalized trace.
    pub fn hs_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// Unnormalized trace `Σ_i tr(x_i)`.
    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// Normalized trace, `τ(1) = 1`.
    pub fn normalized_trace(&self) -> C64 {
        self.trace() / linalg::re(self.desc.unit_trace() as f64)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.op_norm().max(1.0);
        self.blocks.iter().all(|b| linalg::hermiticity_defect(b) <= tol * scale)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().map(linalg::min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// Hermitian within `tol` and no eigenvalue below `-tol·max(1, ‖x‖)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let scale = self.op_norm().max(1.0);
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol * scale
    }

    /// Positive square root; fails on elements that are not positive within `tol`.
    pub fn sqrt_psd(&self, tol: f64) -> Result<Element> {
        if !self.is_hermitian(tol) {
            return Err(Error::NotPositive(f64::NAN));
        }
        let slack = tol * self.op_norm().max(1.0);
        let blocks = self.blocks.iter().map(|b| linalg::psd_sqrt(b, slack).map_err(Error::NotPositive)).collect::<Result<Vec<_>>>()?;
        Ok(Element { desc: self.desc.clone(), blocks })
    }

    /// Entry `(r, s)` of an element of `M_n(A)`, where `self` lives on the
    /// amplified descriptor and `base` is the descriptor of `A`.
    pub fn grid_entry(&self, base: &AlgebraDescriptor, n: usize, r: usize, s: usize) -> Element {
        debug_assert_eq!(self.desc, base.amplified(n));
        let blocks = base.blocks.iter().zip(&self.blocks).map(|(&d, big)| big.view((r * d, s * d), (d, d)).into_owned()).collect();
        Element { desc: base.clone(), blocks }
    }

    /// Assemble an element of `M_n(A)` from its `n × n` grid of entries.
    pub fn from_grid(base: &AlgebraDescriptor, grid: &[Vec<Element>]) -> Result<Element> {
        let n = grid.len();
        let desc = base.amplified(n);
        let mut out = desc.zero();
        for (r, row) in grid.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch("grid is not square".into()));
            }
            for (s, x) in row.iter().enumerate() {
                if &x.desc != base {
                    return Err(Error::ShapeMismatch(format!("grid entry over {} not {}", x.desc, base)));
                }
                for (i, &d) in base.blocks.iter().enumerate() {
                    out.blocks[i].view_mut((r * d, s * d), (d, d)).copy_from(&x.blocks[i]);
                }
            }
        }
        Ok(out)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.plus(rhs).expect("descriptor mismatch in addition")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.check_same(rhs).expect("descriptor mismatch in subtraction");
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.multiply(rhs).expect("descriptor mismatch in product")
    }
}

impl Mul<C64> for &Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        self.scale(rhs)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(-ONE)
    }
}

/// A linear subspace of `A` with a canonical orthonormal basis (trace inner
/// product), stored as coordinate columns.
#[derive(Clone, Debug)]
pub struct Subspace {
    desc: AlgebraDescriptor,
    basis: CMat,
}

impl Subspace {
    pub fn from_spanning(desc: &AlgebraDescriptor, span: &[Element], tol: f64) -> Subspace {
        let cols: Vec<CVec> = span.iter().map(|x| x.coords()).collect();
        let m = linalg::columns(&cols, desc.dim());
        Subspace { desc: desc.clone(), basis: linalg::orthonormal_range(&m, tol) }
    }

    /// From coordinate columns that are already orthonormal.
    pub fn from_orthonormal(desc: &AlgebraDescriptor, basis: CMat) -> Subspace {
        Subspace { desc: desc.clone(), basis }
    }

    pub fn whole(desc: &AlgebraDescriptor) -> Subspace {
        Subspace { desc: desc.clone(), basis: CMat::identity(desc.dim(), desc.dim()) }
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.desc
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn coords(&self) -> &CMat {
        &self.basis
    }

    pub fn elements(&self) -> Vec<Element> {
        (0..self.dim()).map(|j| Element::from_coords(&self.desc, &self.basis.column(j).into_owned()).unwrap()).collect()
    }

    pub fn project(&self, x: &Element) -> Element {
        let c = x.coords();
        let p = &self.basis * (self.basis.adjoint() * c);
        Element::from_coords(&self.desc, &p).unwrap()
    }

    /// `(member, residual)` with residual `‖x - Px‖₂ / max(1, ‖x‖₂)`.
    pub fn membership(&self, x: &Element, tol: f64) -> (bool, f64) {
        let r = (x - &self.project(x)).hs_norm() / x.hs_norm().max(1.0);
        (r <= tol, r)
    }

    pub fn contains(&self, x: &Element, tol: f64) -> bool {
        self.membership(x, tol).0
    }
}

const CLOSURE_ROUNDS: usize = 64;

/// The *-subalgebra generated by `gens` (no unit is adjoined).
pub fn generated_subalgebra(desc: &AlgebraDescriptor, gens: &[Element], tol: f64) -> Result<Subspace> {
    let mut span: Vec<Element> = gens.to_vec();
    span.extend(gens.iter().map(|g| g.adjoint()));
    let mut sub = Subspace::from_spanning(desc, &span, tol);
    for _ in 0..CLOSURE_ROUNDS {
        let basis = sub.elements();
        let mut next = basis.clone();
        for x in &basis {
            for y in &basis {
                next.push(x * y);
            }
        }
        let grown = Subspace::from_spanning(desc, &next, tol);
        if grown.dim() == sub.dim() {
            return Ok(grown);
        }
        sub = grown;
    }
    Err(Error::NoClosure(CLOSURE_ROUNDS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_element, seeded};
    use proptest::prelude::*;

    fn c2() -> AlgebraDescriptor {
        AlgebraDescriptor::new(vec![1, 1]).unwrap()
    }

    #[test]
    fn descriptor_dimensions() {
        assert_eq!(AlgebraDescriptor::new(vec![1, 2]).unwrap().dim(), 5);
        assert_eq!(AlgebraDescriptor::new(vec![3]).unwrap().dim(), 9);
        assert!(AlgebraDescriptor::new(vec![]).is_err());
        assert!(AlgebraDescriptor::new(vec![2, 0]).is_err());
        let d = AlgebraDescriptor::new(vec![1, 2]).unwrap();
        assert_eq!(d.locate(3), (1, 1, 0));
        assert_eq!(d.index(1, 1, 0), 3);
        assert_eq!(d.label(3), "e2(2,1)");
    }

    #[test]
    fn commutative_product_and_mismatch() {
        let d = c2();
        let x = Element::diagonal(&d, &[crate::linalg::re(1.0), crate::linalg::re(2.0)]).unwrap();
        let y = Element::diagonal(&d, &[crate::linalg::re(3.0), crate::linalg::re(4.0)]).unwrap();
        assert_eq!((&x * &y).coords().as_slice(), &[crate::linalg::re(3.0), crate::linalg::re(8.0)]);
        let m2 = AlgebraDescriptor::full(2).unwrap();
        assert!(x.multiply(&m2.unit()).is_err());
    }

    #[test]
    fn positivity_and_sqrt() {
        let d = c2();
        assert!(!Element::diagonal(&d, &[crate::linalg::re(1.0), crate::linalg::re(-1.0)]).unwrap().is_positive(1e-9));
        let x = Element::diagonal(&d, &[crate::linalg::re(4.0), crate::linalg::re(9.0)]).unwrap();
        let s = x.sqrt_psd(1e-9).unwrap();
        assert_eq!(s.coords().as_slice(), &[crate::linalg::re(2.0), crate::linalg::re(3.0)]);
        assert!(Element::diagonal(&d, &[crate::linalg::re(1.0), crate::linalg::re(-1.0)]).unwrap().sqrt_psd(1e-9).is_err());
        assert!(d.zero().is_positive(1e-9));
    }

    #[test]
    fn membership_residuals() {
        let m2 = AlgebraDescriptor::full(2).unwrap();
        let e11 = m2.matrix_unit(0);
        let sub = Subspace::from_spanning(&m2, &[e11.clone()], 1e-9);
        let (inside, r) = sub.membership(&m2.unit(), 1e-9);
        assert!(!inside);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
        let (_, r) = sub.membership(&m2.matrix_unit(3), 1e-9);
        assert!((r - 1.0).abs() < 1e-12);
        assert!(sub.contains(&e11, 1e-9));
    }

    #[test]
    fn generated_subalgebras() {
        let m2 = AlgebraDescriptor::full(2).unwrap();
        assert_eq!(generated_subalgebra(&m2, &[m2.unit()], 1e-9).unwrap().dim(), 1);
        let e12 = m2.matrix_unit(1);
        assert_eq!(generated_subalgebra(&m2, &[e12], 1e-9).unwrap().dim(), 4);
        assert_eq!(generated_subalgebra(&m2, &[m2.matrix_unit(0)], 1e-9).unwrap().dim(), 1);
    }

    #[test]
    fn grid_round_trip() {
        let d = c2();
        let mut rng = seeded(3);
        let grid: Vec<Vec<Element>> = (0..2).map(|_| (0..2).map(|_| random_element(&d, &mut rng)).collect()).collect();
        let big = Element::from_grid(&d, &grid).unwrap();
        assert_eq!(big.descriptor().blocks(), &[2, 2]);
        for r in 0..2 {
            for s in 0..2 {
                assert_eq!(big.grid_entry(&d, 2, r, s), grid[r][s]);
            }
        }
    }

    fn descriptors() -> impl Strategy<Value = AlgebraDescriptor> {
        prop::collection::vec(1usize..=3, 1..=3).prop_map(|b| AlgebraDescriptor::new(b).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn product_is_associative_and_star_reverses(desc in descriptors(), seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let x = random_element(&desc, &mut rng);
            let y = random_element(&desc, &mut rng);
            let z = random_element(&desc, &mut rng);
            let scale = x.op_norm() * y.op_norm() * z.op_norm();
            prop_assert!((&(&(&x * &y) * &z) - &(&x * &(&y * &z))).op_norm() <= 1e-12 * scale.max(1.0));
            prop_assert!((&(&x * &y).adjoint() - &(&y.adjoint() * &x.adjoint())).op_norm() <= 1e-12 * scale.max(1.0));
            prop_assert_eq!(Element::from_coords(&desc, &x.coords()).unwrap(), x);
        }

        #[test]
        fn cstar_identity_and_sqrt(desc in descriptors(), seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let x = random_element(&desc, &mut rng);
            let xx = &x.adjoint() * &x;
            prop_assert!((xx.op_norm() - x.op_norm().powi(2)).abs() <= 1e-10 * xx.op_norm().max(1.0));
            prop_assert!(xx.is_positive(1e-9));
            let s = xx.sqrt_psd(1e-9).unwrap();
            prop_assert!((&(&s * &s) - &xx).op_norm() <= 1e-9 * xx.op_norm().max(1.0));
        }

        #[test]
        fn generated_subalgebra_is_closed(desc in descriptors(), seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let g = random_element(&desc, &mut rng);
            let sub = generated_subalgebra(&desc, &[g.clone()], 1e-9).unwrap();
            prop_assert!(sub.contains(&g, 1e-9));
            prop_assert!(sub.contains(&g.adjoint(), 1e-9));
            for a in sub.elements() {
                for b in sub.elements() {
                    prop_assert!(sub.contains(&(&a * &b), 1e-8));
                }
            }
        }
    }
}
