//! Small named interactions used by the examples, the tests and the CLI.

use nalgebra::QR;

use crate::fdstar::{AlgebraDescriptor, Element};
use crate::interaction::{Interaction, PartialIsometryData, DEFAULT_TOL};
use crate::linalg::CMat;
use crate::posmap::LinMap;
use crate::sampling;

pub fn c2() -> AlgebraDescriptor {
    AlgebraDescriptor::new(vec![1, 1]).unwrap()
}

/// `V(a1, a2) = (a2, a2)`, `H(a1, a2) = (a1, a1)` on `ℂ²`.
pub fn flip_maps() -> (LinMap, LinMap) {
    let d = c2();
    let v = LinMap::from_fn(&d, |x| {
        let c = x.coords();
        Element::diagonal(&d, &[c[1], c[1]]).unwrap()
    })
    .unwrap();
    let h = LinMap::from_fn(&d, |x| {
        let c = x.coords();
        Element::diagonal(&d, &[c[0], c[0]]).unwrap()
    })
    .unwrap();
    (v, h)
}

pub fn flip() -> Interaction {
    let (v, h) = flip_maps();
    Interaction::new(v, h, DEFAULT_TOL).expect("flip pair is an interaction")
}

/// The coordinate swap on `ℂ²`, used both as endomorphism and transfer operator.
pub fn swap_pair() -> (LinMap, LinMap) {
    let d = c2();
    let s = LinMap::from_fn(&d, |x| {
        let c = x.coords();
        Element::diagonal(&d, &[c[1], c[0]]).unwrap()
    })
    .unwrap();
    (s.clone(), s)
}

/// Transpose on `M_2`: positive, not completely positive, not multiplicative.
pub fn transpose_map() -> LinMap {
    let d = AlgebraDescriptor::full(2).unwrap();
    LinMap::from_fn(&d, |x| Element::from_blocks(&d, vec![x.block(0).transpose()]).unwrap()).unwrap()
}

/// `(id, id)` on any algebra.
pub fn identity(desc: &AlgebraDescriptor) -> Interaction {
    Interaction::new(LinMap::identity(desc), LinMap::identity(desc), DEFAULT_TOL).expect("identity is an interaction")
}

/// Diagonals of `M_2` with `S = e12`.
pub fn flip_partial_isometry() -> PartialIsometryData {
    let b = AlgebraDescriptor::full(2).unwrap();
    PartialIsometryData { a: c2(), embed: vec![b.matrix_unit(0), b.matrix_unit(3)], s: b.matrix_unit(1), b }
}

/// `α = Ad u`, `L = Ad u*` on `M_n` for a seeded random unitary `u`.
pub fn inner_automorphism(n: usize, seed: u64) -> (LinMap, LinMap) {
    let d = AlgebraDescriptor::full(n).unwrap();
    let g = sampling::gaussian_matrix(&mut sampling::seeded(seed), n, n);
    let u: CMat = QR::new(g).q();
    let ue = Element::from_blocks(&d, vec![u]).unwrap();
    let alpha = LinMap::from_fn(&d, |x| &(&ue * x) * &ue.adjoint()).unwrap();
    let l = LinMap::from_fn(&d, |x| &(&ue.adjoint() * x) * &ue).unwrap();
    (alpha, l)
}
