//! The flip pair on ℂ²: V(a1, a2) = (a2, a2), H(a1, a2) = (a1, a1).
//!
//! Checks the axioms, prints the ranges and the two conditional expectations,
//! and shows the transpose map failing with a witness.

use interactions::fixtures;
use interactions::interaction::{describe, verify_interaction, DEFAULT_TOL};

fn main() -> interactions::Result<()> {
    let (v, h) = fixtures::flip_maps();
    let report = verify_interaction(&v, &h, DEFAULT_TOL)?;
    for c in &report.checks {
        println!("{:<22} {:>10.3e} {}", c.id, c.residual, if c.passed { "ok" } else { "FAIL" });
    }

    let inter = fixtures::flip();
    for (name, range) in [("V(A)", inter.range_v()), ("H(A)", inter.range_h())] {
        let basis: Vec<String> = range.elements().iter().map(describe).collect();
        println!("{name}: {}", basis.join(", "));
    }
    let ev = inter.expectation_v()?;
    let eh = inter.expectation_h()?;
    println!("E_V residual {:.3e}, E_H residual {:.3e}", ev.residuals().worst(), eh.residuals().worst());
    println!("V∘H∘V = V and H∘V∘H = H: inverse residual {:.3e}", inter.inverse_pair()?.worst());

    // positive but not completely positive, and not multiplicative on its range
    let t = fixtures::transpose_map();
    let report = verify_interaction(&t, &t, DEFAULT_TOL)?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        match &c.witness {
            Some(w) if !w.labels.is_empty() => println!("transpose fails {} at ({})", c.id, w.labels.join(", ")),
            _ => println!("transpose fails {}", c.id),
        }
    }
    println!("transpose Choi min eigenvalue {:.3}", t.choi().min_eigenvalue());
    Ok(())
}
