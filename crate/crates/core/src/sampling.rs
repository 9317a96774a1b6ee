//! Seeded random draws.  Every randomized check in the crate takes its
//! generator from here so a seed fully determines a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fdstar::{AlgebraDescriptor, Element};
use crate::linalg::{CMat, CVec, C64};

pub type CheckRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> CheckRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    // fill row-major so draws do not depend on storage order
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Element with i.i.d. standard complex normal matrix entries.
pub fn random_element<R: Rng>(desc: &AlgebraDescriptor, rng: &mut R) -> Element {
    Element::from_coords(desc, &gaussian_vec(rng, desc.dim())).expect("length matches")
}
