//! Linear maps on a multimatrix algebra, their amplifications, Choi matrices
//! and positivity certificates.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fdstar::{AlgebraDescriptor, Element, Subspace};
use crate::linalg::{self, CMat, CVec, C64};
use crate::sampling;

/// A linear map `A → A`, stored as its matrix on the matrix-unit basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinMap {
    desc: AlgebraDescriptor,
    matrix: CMat,
}

impl LinMap {
    pub fn new(desc: &AlgebraDescriptor, matrix: CMat) -> Result<LinMap> {
        let n = desc.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch(format!("map matrix is {}x{}, algebra dimension {n}", matrix.nrows(), matrix.ncols())));
        }
        Ok(LinMap { desc: desc.clone(), matrix })
    }

    pub fn from_fn(desc: &AlgebraDescriptor, f: impl Fn(&Element) -> Element) -> Result<LinMap> {
        let cols: Vec<CVec> = desc
            .basis()
            .iter()
            .map(|e| {
                let y = f(e);
                if y.descriptor() != desc {
                    Err(Error::ShapeMismatch(format!("map lands in {} not {}", y.descriptor(), desc)))
                } else {
                    Ok(y.coords())
                }
            })
            .collect::<Result<_>>()?;
        Ok(LinMap { desc: desc.clone(), matrix: linalg::columns(&cols, desc.dim()) })
    }

    pub fn identity(desc: &AlgebraDescriptor) -> LinMap {
        LinMap { desc: desc.clone(), matrix: CMat::identity(desc.dim(), desc.dim()) }
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.desc
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Element {
        assert_eq!(x.descriptor(), &self.desc, "map applied to an element of another algebra");
        Element::from_coords(&self.desc, &(&self.matrix * x.coords())).unwrap()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> Result<LinMap> {
        if self.desc != other.desc {
            return Err(Error::ShapeMismatch(format!("compose {} with {}", self.desc, other.desc)));
        }
        Ok(LinMap { desc: self.desc.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn scaled_sum(&self, a: C64, other: &LinMap, b: C64) -> Result<LinMap> {
        if self.desc != other.desc {
            return Err(Error::ShapeMismatch(format!("sum of maps on {} and {}", self.desc, other.desc)));
        }
        Ok(LinMap { desc: self.desc.clone(), matrix: &self.matrix * a + &other.matrix * b })
    }

    /// `max_k ‖(self - other)(e_k)‖` over the matrix units.
    pub fn basis_distance(&self, other: &LinMap) -> f64 {
        let diff = LinMap { desc: self.desc.clone(), matrix: &self.matrix - &other.matrix };
        self.desc.basis().iter().map(|e| diff.apply(e).op_norm()).fold(0.0, f64::max)
    }

    /// `max_k ‖T(e_k*) - T(e_k)*‖`.
    pub fn star_residual(&self) -> f64 {
        self.desc.basis().iter().map(|e| (&self.apply(&e.adjoint()) - &self.apply(e).adjoint()).op_norm()).fold(0.0, f64::max)
    }

    /// Apply `id_n ⊗ T` to an element of `M_n(A)` entry by entry.
    pub fn apply_amplified(&self, n: usize, x: &Element) -> Element {
        let grid: Vec<Vec<Element>> = (0..n).map(|r| (0..n).map(|s| self.apply(&x.grid_entry(&self.desc, n, r, s))).collect()).collect();
        Element::from_grid(&self.desc, &grid).unwrap()
    }

    /// `id_n ⊗ T` as a map on `M_n(A)`.
    pub fn amplify(&self, n: usize) -> LinMap {
        let big = self.desc.amplified(n);
        LinMap::from_fn(&big, |x| self.apply_amplified(n, x)).unwrap()
    }

    pub fn choi(&self) -> ChoiMatrix {
        let blocks = self.desc.blocks();
        let mut out = Vec::new();
        for (i, &di) in blocks.iter().enumerate() {
            let images: Vec<Element> = (0..di * di).map(|k| self.apply(&self.desc.matrix_unit(self.desc.offset(i) + k))).collect();
            for (j, &dj) in blocks.iter().enumerate() {
                let mut c = CMat::zeros(di * dj, di * dj);
                for p in 0..di {
                    for q in 0..di {
                        let t = images[p * di + q].block(j);
                        c.view_mut((p * dj, q * dj), (dj, dj)).copy_from(t);
                    }
                }
                out.push(ChoiBlock { input: i, output: j, matrix: c });
            }
        }
        ChoiMatrix { blocks: out }
    }

    /// Complete positivity through the Choi matrix.
    pub fn cp_certificate(&self, tol: f64) -> CpCertificate {
        let choi = self.choi();
        let residual = choi.negativity();
        CpCertificate { completely_positive: residual <= tol, residual, unit_norm: self.apply(&self.desc.unit()).op_norm() }
    }

    /// Randomized positivity falsifier: images of structured rank-one
    /// positives and of `trials` random `z* z` must be positive.
    pub fn positivity_certificate<R: Rng>(&self, trials: usize, rng: &mut R, tol: f64) -> PositivityCertificate {
        let mut probes = structured_positives(&self.desc);
        for _ in 0..trials {
            let z = sampling::random_element(&self.desc, rng);
            let y = &z.adjoint() * &z;
            let n = y.op_norm().max(f64::MIN_POSITIVE);
            probes.push(y.scale(linalg::re(1.0 / n)));
        }
        let mut worst = 0.0;
        let mut witness = None;
        for y in probes {
            let r = negativity(&self.apply(&y));
            if r > worst {
                worst = r;
                witness = Some(y);
            }
        }
        PositivityCertificate { positive: worst <= tol, worst_residual: worst, witness }
    }

    /// Canonical orthonormal basis of the range.
    pub fn range(&self, tol: f64) -> Subspace {
        Subspace::from_orthonormal(&self.desc, linalg::orthonormal_range(&self.matrix, tol))
    }
}

/// Relative failure of positivity: Hermitian defect or negative eigenvalue,
/// divided by `max(1, ‖y‖)`.
fn negativity(y: &Element) -> f64 {
    let scale = y.op_norm().max(1.0);
    let herm = y.blocks().iter().map(linalg::hermiticity_defect).fold(0.0, f64::max);
    herm.max(-y.min_eigenvalue()).max(0.0) / scale
}

/// `v v*` for `v ∈ {e_p, e_p + e_q, e_p + i e_q}` in every block.
fn structured_positives(desc: &AlgebraDescriptor) -> Vec<Element> {
    let mut out = Vec::new();
    for (i, &d) in desc.blocks().iter().enumerate() {
        let mut vecs: Vec<CVec> = Vec::new();
        for p in 0..d {
            vecs.push(CVec::from_fn(d, |k, _| if k == p { linalg::ONE } else { linalg::ZERO }));
            for q in p + 1..d {
                for phase in [linalg::ONE, C64::new(0.0, 1.0)] {
                    vecs.push(CVec::from_fn(d, |k, _| {
                        if k == p {
                            linalg::ONE
                        } else if k == q {
                            phase
                        } else {
                            linalg::ZERO
                        }
                    }));
                }
            }
        }
        for v in vecs {
            let mut blocks: Vec<CMat> = desc.blocks().iter().map(|&e| CMat::zeros(e, e)).collect();
            let n2 = v.norm_squared();
            blocks[i] = &v * v.adjoint() / linalg::re(n2);
            out.push(Element::from_blocks(desc, blocks).unwrap());
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ChoiBlock {
    pub input: usize,
    pub output: usize,
    pub matrix: CMat,
}

/// Choi matrix of a map on a multimatrix algebra: one block per pair of
/// (input block, output block).
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    pub blocks: Vec<ChoiBlock>,
}

impl ChoiMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().map(|b| linalg::min_eigenvalue(&b.matrix)).fold(f64::INFINITY, f64::min)
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| linalg::op_norm(&b.matrix)).fold(0.0, f64::max)
    }

    /// Relative failure of positive semidefiniteness.
    pub fn negativity(&self) -> f64 {
        let scale = self.norm().max(1.0);
        let herm = self.blocks.iter().map(|b| linalg::hermiticity_defect(&b.matrix)).fold(0.0, f64::max);
        herm.max(-self.min_eigenvalue()).max(0.0) / scale
    }
}

#[derive(Clone, Debug)]
pub struct CpCertificate {
    pub completely_positive: bool,
    pub residual: f64,
    /// `‖T(1)‖`, which equals the cb-norm of a completely positive map.
    pub unit_norm: f64,
}

#[derive(Clone, Debug)]
pub struct PositivityCertificate {
    pub positive: bool,
    pub worst_residual: f64,
    pub witness: Option<Element>,
}
