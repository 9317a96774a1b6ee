//! Dense complex linear algebra helpers shared by every module.
//!
//! Bases returned here are canonical: an orthonormal basis of a subspace is
//! produced by pivoted Gram-Schmidt over the projections of the standard basis
//! vectors, so the result does not depend on the phase conventions of the
//! underlying eigen or singular value solver.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest singular value, zero for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let g = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    let top = SymmetricEigen::new(g).eigenvalues.iter().cloned().fold(0.0, f64::max);
    top.max(0.0).sqrt()
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    svd(m).s
}

/// Thin singular value decomposition `m = u diag(s) v_t`.
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v_t: CMat,
}

impl Svd {
    fn recompose(&self) -> CMat {
        let mut us = self.u.clone();
        for (j, &s) in self.s.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * &self.v_t
    }
}

/// SVD with a reconstruction check.  The QR iteration occasionally returns
/// garbage on large structured matrices, so a failed check retries on the
/// adjoint and then falls back to the eigendecomposition of the Gram matrix.
pub fn svd(m: &CMat) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd { u: CMat::zeros(r, 0), s: Vec::new(), v_t: CMat::zeros(0, c) };
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let good = |d: &Svd| (d.recompose() - m).norm() <= 1e-11 * scale * (k as f64).sqrt();
    let from = |d: SVD<C64, nalgebra::Dyn, nalgebra::Dyn>| Svd { u: d.u.unwrap(), s: d.singular_values.iter().cloned().collect(), v_t: d.v_t.unwrap() };
    let direct = from(SVD::new(m.clone(), true, true));
    if good(&direct) {
        return direct;
    }
    let t = from(SVD::new(m.adjoint(), true, true));
    let flipped = Svd { u: t.v_t.adjoint(), s: t.s, v_t: t.u.adjoint() };
    if good(&flipped) {
        return flipped;
    }
    let (vals, vecs) = hermitian_eigen(&(m.adjoint() * m));
    let order: Vec<usize> = (0..c).rev().take(k).collect();
    let mut u = CMat::zeros(r, k);
    let mut v = CMat::zeros(c, k);
    let mut s = Vec::with_capacity(k);
    for (j, &i) in order.iter().enumerate() {
        let sigma = vals[i].max(0.0).sqrt();
        v.set_column(j, &vecs.column(i));
        if sigma > 1e-14 * scale {
            u.set_column(j, &(m * vecs.column(i) / re(sigma)));
        }
        s.push(sigma);
    }
    Svd { u, s, v_t: v.adjoint() }
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = (m + m.adjoint()) * re(0.5);
    let e = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vecs.set_column(j, &e.eigenvectors.column(k));
    }
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigen(m).0.first().cloned().unwrap_or(0.0)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// Orthonormal columns spanning the column space of `m`, keeping singular
/// values above `tol * sigma_max`.
pub fn orthonormal_range(m: &CMat, tol: f64) -> CMat {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return CMat::zeros(rows, 0);
    }
    let Svd { u, s, .. } = svd(m);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax <= f64::MIN_POSITIVE {
        return CMat::zeros(rows, 0);
    }
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > tol * smax).collect();
    let mut out = CMat::zeros(rows, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        out.set_column(j, &u.column(k));
    }
    canonical_basis(&out)
}

/// Canonical orthonormal basis of the span of the orthonormal columns `u`.
pub fn canonical_basis(u: &CMat) -> CMat {
    let n = u.nrows();
    let r = u.ncols();
    let p = u * u.adjoint();
    projector_basis(&p, r, n)
}

/// Pivoted Gram-Schmidt over the columns of a projector of known rank.
fn projector_basis(p: &CMat, rank: usize, n: usize) -> CMat {
    let mut cols: Vec<CVec> = (0..n).map(|k| p.column(k).into_owned()).collect();
    let mut chosen: Vec<CVec> = Vec::with_capacity(rank);
    for _ in 0..rank {
        let norms: Vec<f64> = cols.iter().map(|c| c.norm()).collect();
        let best = norms.iter().cloned().fold(0.0, f64::max);
        if best <= 1e-12 {
            break;
        }
        let k = norms.iter().position(|&x| x >= best * (1.0 - 1e-9)).unwrap();
        let mut v = cols[k].clone();
        for w in &chosen {
            let c = w.dotc(&v);
            v -= w * c;
        }
        let nv = v.norm();
        v /= re(nv);
        for c in cols.iter_mut() {
            let proj = v.dotc(c);
            *c -= &v * proj;
        }
        chosen.push(v);
    }
    let mut out = CMat::zeros(n, chosen.len());
    for (j, v) in chosen.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Canonical orthonormal basis of the kernel of `m`.
pub fn kernel(m: &CMat, tol: f64) -> CMat {
    let n = m.ncols();
    let row_space = orthonormal_range(&m.adjoint(), tol);
    let p = CMat::identity(n, n) - &row_space * row_space.adjoint();
    projector_basis(&p, n - row_space.ncols(), n)
}

/// Minimum-norm least squares solution of `m x = b`.
pub fn lstsq(m: &CMat, b: &CVec, tol: f64) -> CVec {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CVec::zeros(m.ncols());
    }
    let Svd { u, s: sv, v_t: vt } = svd(m);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = (tol * smax).max(f64::MIN_POSITIVE);
    let mut x = CVec::zeros(m.ncols());
    for (k, &s) in sv.iter().enumerate() {
        if s > cut {
            let coef = u.column(k).dotc(b) / re(s);
            x += vt.row(k).adjoint() * coef;
        }
    }
    x
}

/// Moore-Penrose pseudo-inverse, dropping singular values below `tol * sigma_max`.
pub fn pinv(m: &CMat, tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.ncols(), m.nrows());
    }
    let Svd { u, s: sv, v_t: vt } = svd(m);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = (tol * smax).max(f64::MIN_POSITIVE);
    let mut out = CMat::zeros(m.ncols(), m.nrows());
    for (k, &s) in sv.iter().enumerate() {
        if s > cut {
            out += vt.row(k).adjoint() * u.column(k).adjoint() / re(s);
        }
    }
    out
}

/// Square root of a Hermitian positive semidefinite matrix.  Eigenvalues
/// down to `-slack` are clamped to zero; anything lower is an error.
pub fn psd_sqrt(m: &CMat, slack: f64) -> Result<CMat, f64> {
    let (vals, vecs) = hermitian_eigen(m);
    let mut d = Vec::with_capacity(vals.len());
    for &v in &vals {
        if v < -slack {
            return Err(v);
        }
        d.push(re(v.max(0.0).sqrt()));
    }
    let diag = CMat::from_diagonal(&CVec::from_vec(d));
    Ok(&vecs * diag * vecs.adjoint())
}

/// Stack the columns of a matrix into one vector.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

/// Matrix whose columns are the given vectors.
pub fn columns(vs: &[CVec], rows: usize) -> CMat {
    let mut m = CMat::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Block-diagonal sum.
pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: [f64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &a.map(re))
    }

    #[test]
    fn canonical_basis_of_full_space_is_standard() {
        let u = orthonormal_range(&m2([0.0, 1.0, 1.0, 0.0]), 1e-9);
        assert!((u - CMat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn canonical_basis_has_positive_pivot() {
        let u = orthonormal_range(&m2([-1.0, 0.0, -1.0, 0.0]), 1e-9);
        assert_eq!(u.ncols(), 1);
        let s = 0.5f64.sqrt();
        assert!((u[(0, 0)] - re(s)).norm() < 1e-14 && (u[(1, 0)] - re(s)).norm() < 1e-14);
    }

    #[test]
    fn kernel_and_lstsq() {
        let m = m2([1.0, 1.0, 1.0, 1.0]);
        let k = kernel(&m, 1e-9);
        assert_eq!(k.ncols(), 1);
        assert!((&m * &k).norm() < 1e-14);
        let x = lstsq(&m, &CVec::from_vec(vec![re(2.0), re(2.0)]), 1e-12);
        assert!((x - CVec::from_vec(vec![ONE, ONE])).norm() < 1e-12);
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = crate::sampling::seeded(3);
        let a = crate::sampling::gaussian_matrix(&mut rng, 7, 3);
        // rank 3 inside 9×9 with repeated zero singular values
        let v = crate::sampling::gaussian_matrix(&mut rng, 3, 1);
        let k = (&v * v.adjoint()).kronecker(&CMat::identity(3, 3));
        for m in [a.clone(), a.adjoint(), k, CMat::zeros(4, 2)] {
            let d = svd(&m);
            assert!((d.recompose() - &m).norm() <= 1e-10 * m.norm().max(1.0));
            assert!((op_norm(&m) - d.s.iter().cloned().fold(0.0, f64::max)).abs() < 1e-10 * m.norm().max(1.0));
        }
    }

    #[test]
    fn sqrt_and_empty() {
        let s = psd_sqrt(&m2([4.0, 0.0, 0.0, 9.0]), 1e-12).unwrap();
        assert!((s - m2([2.0, 0.0, 0.0, 3.0])).norm() < 1e-12);
        assert!(psd_sqrt(&m2([-1.0, 0.0, 0.0, 1.0]), 1e-9).is_err());
        assert_eq!(op_norm(&CMat::zeros(0, 0)), 0.0);
        assert_eq!(orthonormal_range(&CMat::zeros(3, 0), 1e-9).ncols(), 0);
    }
}
