//! Symbolic completion towers and homomorphism extension.
//!
//! Elements of a completion are represented as expression trees over a seed
//! of generators, with scalar multiples, sums, joins, meets and applications
//! of homogeneous functions ([`Expr`]). A [`Tower`] stores a finite,
//! reproducible sample of each stage of the closure of the seed under a set
//! of homogeneous functions: each step adjoins every application of a set
//! function to the previous stage (up to a budget) together with a
//! deterministic set of lattice combinations.
//!
//! [`normalize`] rewrites any expression into an inf-of-sups of linear
//! combinations of atoms (generators and applications), the normal form of
//! elements of a generated sublattice. [`extend_homomorphism`] pushes a
//! lattice homomorphism of the seed grid through an expression, which is the
//! unique extension to the completion; [`extend_positive_map_by_limits`]
//! extends a positive map along a relatively uniformly Cauchy sequence.
//! Preservation checks probe the characterization of lattice homomorphisms
//! as the linear maps commuting with the homogeneous calculus.

mod certify;
mod expr;
mod maps;
mod normal_form;
mod tower;

pub use certify::{
    certify_not_h_complete, CertificateStatus, CompletenessCertificate, SecondDifferenceWitness,
};
pub use expr::{eval_expr, Expr};
pub use maps::{
    check_homomorphism_preserves, check_preservation_implies_modulus,
    extend_homomorphism, extend_positive_map_by_limits, ConverseReport, LinearMapRep,
    PreservationReport, PreservationWitness, DEFAULT_CHECK_TOL,
};
pub use normal_form::{normalize, InfSupForm};
pub use tower::Tower;
