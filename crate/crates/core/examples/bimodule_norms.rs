//! The bimodule X of an interaction: Gram quotient, inner products and norms.
//!
//! For the flip, X is one-dimensional and ‖a ⊗ b‖ = |a1 b2|.  Random tensors
//! are compared across the two closed forms and both Gram norms.

use interactions::bimodule::BimoduleX;
use interactions::fixtures;
use interactions::sampling::{random_element, seeded};

fn main() -> interactions::Result<()> {
    for (name, inter) in [("flip", fixtures::flip()), ("flip ⊗ M_2", fixtures::flip().amplified(2)?)] {
        let x = BimoduleX::build(&inter)?;
        let desc = inter.descriptor();
        println!("{name}: {} pretensor coordinates, dim X = {}", desc.dim() * desc.dim(), x.rank());
        let mut rng = seeded(5);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let terms: Vec<_> = (0..2).map(|_| (random_element(desc, &mut rng), random_element(desc, &mut rng))).collect();
            let c = x.norm_two_ways(&terms)?;
            worst = worst.max(c.max_relative_gap());
        }
        println!("  largest relative gap between the four norms: {worst:.2e}");
    }

    let x = BimoduleX::build(&fixtures::flip())?;
    let d = x.descriptor().clone();
    let a = d.matrix_unit(0).scale(interactions::linalg::re(3.0));
    let b = d.matrix_unit(1).scale(interactions::linalg::re(2.0));
    println!("‖3e1 ⊗ 2e2‖ = {:.6}", x.norm(&x.elementary(&a, &b)));
    println!("‖3e1 ⊗ 2e1‖ = {:.6}", x.norm(&x.elementary(&a, &d.matrix_unit(0))));
    Ok(())
}
