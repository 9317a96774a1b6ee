//! Interactions `(V, H)` on finite-dimensional C*-algebras `A = ⊕ M_{d_i}`.
//!
//! * [`fdstar`]: block algebras, elements, functional calculus.
//! * [`posmap`]: linear maps on `A`, Choi matrices, positivity falsifiers.
//! * [`interaction`]: the axioms, endomorphism/transfer pairs, derivation
//!   from a partial isometry.
//! * [`basicc`]: the basic construction `K_H` of a conditional expectation.
//! * [`bimodule`]: the bimodule `X` as a Gram quotient of `A ⊙ A`.
//! * [`covrep`]: the covariant representation `(π, S)` on `X ⊕ K_H`.
//! * [`gencorr`]: ternary rings of operators and generalized correspondences.
//! * [`checklist`], [`problem`]: the JSON problem format and the check report
//!   behind the `interact` binary.
//!
//! Every capability has a runnable example:
//!
//! ```text
//! cargo run --example flip_interaction
//! cargo run --example endomorphism_transfer
//! cargo run --example basic_construction
//! cargo run --example bimodule_norms
//! cargo run --example covariant_representation
//! cargo run --example partial_isometry_roundtrip
//! cargo run --example crossed_product_check
//! cargo run --example ternary_redundancy
//! cargo run --example amplification_fuzz -- fixtures/flip.json 2
//! ```

pub mod basicc;
pub mod bimodule;
pub mod checklist;
pub mod covrep;
pub mod error;
pub mod fdstar;
pub mod fixtures;
pub mod gencorr;
pub mod interaction;
pub mod linalg;
pub mod posmap;
pub mod problem;
pub mod sampling;

pub use error::{Error, Result};
