//! Functional calculus on finite vector lattices.
//!
//! The crate works with real-valued functions on a finite evaluation grid
//! ([`lattice::GridLattice`]), which form an Archimedean vector lattice under
//! pointwise order. On top of that it provides:
//!
//! - lattice operations and relative-uniform convergence checks
//!   ([`lattice`]),
//! - a registry of continuous positively-homogeneous functions — Stolarsky
//!   and Gini means, the Euclidean norm, the scaled geometric mean and the
//!   p-th power means — with gradients and curvature certification
//!   ([`homogeneous`]),
//! - three independent ways to evaluate `h(a_1, ..., a_m)` for lattice
//!   elements `a_k`: the pointwise oracle, the supporting-hyperplane
//!   supremum over sampled unit gradients, and the dyadic angle-grid
//!   approximation sequence, plus the square-mean/geometric-mean/complex
//!   modulus grid forms ([`calculus`]),
//! - symbolic completion towers closed under a set of homogeneous
//!   functions, lattice normal forms, homomorphism extension and
//!   preservation checks ([`completion`]),
//! - a small command-line front end ([`cli`]).
//!
//! Every operation is deterministic: randomized checks take explicit seeds,
//! and grid sweeps (`sup`/`inf` folds) are independent of thread count.
//!
//! The `examples/` directory contains one runnable example per major
//! capability; start with `cargo run --example lattice_basics`.

pub mod calculus;
pub mod cli;
pub mod completion;
pub mod error;
pub mod homogeneous;
pub mod lattice;

pub use error::{Error, Result};
