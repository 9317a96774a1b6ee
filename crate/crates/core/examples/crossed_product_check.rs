//! For an endomorphism α with transfer operator L, X is the crossed-product
//! correspondence: A·(1 ⊗ 1) is dense, ‖a ⊗ 1‖² = ‖L(a*a)‖, and the
//! bimodule and ternary structures match.

use interactions::bimodule::BimoduleX;
use interactions::fixtures;
use interactions::gencorr::check_crossed_product;
use interactions::interaction::{from_endo_transfer, DEFAULT_TOL};

fn main() -> interactions::Result<()> {
    let (alpha, l) = fixtures::swap_pair();
    for n in [1, 2] {
        let (a, t) = if n == 1 { (alpha.clone(), l.clone()) } else { (alpha.amplify(n), l.amplify(n)) };
        let inter = from_endo_transfer(&a, &t, DEFAULT_TOL)?;
        let r = check_crossed_product(&a, &t, &BimoduleX::build(&inter)?)?;
        println!("swap ⊗ M_{n}: density {:.1e}, isometry {:.1e}, bimodule {:.1e}, ternary {:.1e}", r.density, r.isometry, r.bimodule, r.ternary);
    }

    // the flip is an interaction but not of this form
    let x = BimoduleX::build(&fixtures::flip())?;
    if let Err(e) = check_crossed_product(&alpha, &l, &x) {
        println!("flip: {e}");
    }
    Ok(())
}
