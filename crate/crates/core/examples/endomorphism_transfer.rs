//! Endomorphisms with a transfer operator give interactions (α, L).
//!
//! The coordinate swap on ℂ² and an inner automorphism of M_3 are accepted;
//! the averaging map is not an endomorphism and is rejected.

use interactions::fdstar::AlgebraDescriptor;
use interactions::fixtures;
use interactions::interaction::{from_endo_transfer, DEFAULT_TOL};
use interactions::linalg::{re, CMat};
use interactions::posmap::LinMap;

fn main() -> interactions::Result<()> {
    let (alpha, l) = fixtures::swap_pair();
    let swap = from_endo_transfer(&alpha, &l, DEFAULT_TOL)?;
    println!("swap: dim V(A) = {}, dim H(A) = {}", swap.range_v().dim(), swap.range_h().dim());

    let (alpha, l) = fixtures::inner_automorphism(3, 11);
    let ad = from_endo_transfer(&alpha, &l, DEFAULT_TOL)?;
    println!("Ad u on M_3: passes = {}, inverse residual {:.3e}", ad.report().passed(), ad.inverse_pair()?.worst());

    let c2 = AlgebraDescriptor::new(vec![1, 1])?;
    let avg = LinMap::new(&c2, CMat::from_element(2, 2, re(0.5)))?;
    match from_endo_transfer(&avg, &avg, DEFAULT_TOL) {
        Ok(_) => println!("averaging accepted"),
        Err(e) => println!("averaging rejected: {e}"),
    }
    Ok(())
}
