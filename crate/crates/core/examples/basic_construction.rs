//! Basic construction ⟨A, e⟩ for the conditional expectations of an interaction.

use interactions::basicc::BasicConstruction;
use interactions::fdstar::AlgebraDescriptor;
use interactions::fixtures;

fn main() -> interactions::Result<()> {
    let cases = [("flip", fixtures::flip()), ("identity on M_2", fixtures::identity(&AlgebraDescriptor::full(2)?))];
    for (name, inter) in &cases {
        for (side, e) in [("V", inter.expectation_v()?), ("H", inter.expectation_h()?)] {
            let bc = BasicConstruction::build(&e, inter.tol())?;
            let r = bc.residuals();
            println!("{name} E_{side}: L²(A) rank {}, dim K = {}, e·λ(a)·e residual {:.1e}, projection {:.1e}", bc.rank(), bc.k_dim(), r.jones, r.projection);
        }
    }
    Ok(())
}
