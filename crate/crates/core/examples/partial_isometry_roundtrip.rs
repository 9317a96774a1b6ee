//! Interactions from a partial isometry, and back.
//!
//! The diagonal of M_2 with S = e12 yields the flip.  Building the covariant
//! representation of the result and deriving again recovers the same maps.

use interactions::bimodule::BimoduleX;
use interactions::covrep::CovariantRep;
use interactions::fixtures;
use interactions::interaction::{derive_from_partial_isometry, SolutionChoice, DEFAULT_TOL};

fn main() -> interactions::Result<()> {
    let data = fixtures::flip_partial_isometry();
    let derived = derive_from_partial_isometry(&data, &SolutionChoice::NearestIdentity, DEFAULT_TOL)?;
    let (v, h) = fixtures::flip_maps();
    println!(
        "derived pair vs flip: V {:.1e}, H {:.1e}, solve residual {:.1e}",
        derived.interaction.v().basis_distance(&v),
        derived.interaction.h().basis_distance(&h),
        derived.solve_residual
    );
    println!("gates: {:?}", derived.gates);

    for (name, inter) in [("flip", fixtures::flip()), ("flip ⊗ M_2", fixtures::flip().amplified(2)?)] {
        let rep = CovariantRep::build(&BimoduleX::build(&inter)?)?;
        let rt = rep.round_trip()?;
        println!("{name} round trip: V {:.1e}, H {:.1e}", rt.v_distance, rt.h_distance);
    }
    Ok(())
}
