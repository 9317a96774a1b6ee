//! Ternary rings of operators as generalized correspondences.
//!
//! ℂe12 ⊆ M_2 over ℂ² has the same shape as the flip bimodule: one dimension,
//! one-dimensional compacts on both sides, and a single restricted redundancy.

use interactions::bimodule::BimoduleX;
use interactions::fixtures;
use interactions::gencorr::{corner_tro, GenCorrespondence, Side};

fn main() -> interactions::Result<()> {
    let (tro, a, embed) = corner_tro();
    let corner = GenCorrespondence::from_concrete(&tro, &a, &embed, 1e-9)?;
    let flip = GenCorrespondence::from_bimodule(&BimoduleX::build(&fixtures::flip())?)?;
    for (name, g) in [("corner", &corner), ("flip", &flip)] {
        println!("{name}: {:?}", g.shape());
        println!("  [ξ,ξ,ξ] vs ‖ξ‖³: {:.1e}, θ commutation {:.1e}", g.cube_identity(10, 1), g.commutation());
        let r = g.redundancies(Side::Right);
        for red in &r.redundancies {
            println!("  redundancy (a = {}) residual {:.1e}, restricted = {}", interactions::interaction::describe(&red.a), red.residual, red.restricted);
        }
        match g.classical_compacts() {
            Some(res) => println!("  θ^r = ρ(⟨·,·⟩_r) to {res:.1e}"),
            None => println!("  right inner products leave A"),
        }
    }
    Ok(())
}
