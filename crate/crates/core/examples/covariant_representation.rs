//! The covariant representation (π, S) on X ⊕ K_H.
//!
//! For the flip, π is diagonal on ℂ² and S is the matrix unit e12.

use interactions::bimodule::BimoduleX;
use interactions::covrep::CovariantRep;
use interactions::fixtures;
use interactions::linalg::CMat;

fn show(m: &CMat) -> String {
    let rows: Vec<String> = m.row_iter().map(|r| r.iter().map(|z| format!("{:>5.2}", z.re)).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join(" ; "))
}

fn main() -> interactions::Result<()> {
    let x = BimoduleX::build(&fixtures::flip())?;
    let rep = CovariantRep::build(&x)?;
    let desc = x.descriptor();
    for k in 0..desc.dim() {
        println!("π({}) = {}", desc.label(k), show(&rep.pi_basis()[k]));
    }
    println!("S = {}", show(rep.s()));

    let cov = rep.covariance();
    println!("covariance residuals: V {:.1e}, H {:.1e}", cov.covariance_v, cov.covariance_h);
    let nd = rep.nondegeneracy()?;
    println!("smallest nondegeneracy gate {:.6}, nondegenerate = {}", nd.gates.smallest(), nd.nondegenerate);
    println!("unit projection residual {:.1e}", rep.unit_projection());

    let faithful = rep.faithful_extension()?;
    println!("faithful extension: dimension {}, injectivity modulus {:.4}", faithful.rep().dim(), faithful.injectivity());
    Ok(())
}
