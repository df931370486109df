//! Lattice homomorphisms are exactly the linear maps that commute with the
//! homogeneous calculus. On a grid, homomorphisms into another grid are the
//! nonnegative row-sparse matrices; anything denser breaks preservation on
//! a strictly curved mean, with an explicit witness.
//!
//! Run with `cargo run --example homomorphism_probe`.

use latcalc::completion::{
    check_homomorphism_preserves, check_preservation_implies_modulus, LinearMapRep,
    DEFAULT_CHECK_TOL,
};
use latcalc::homogeneous::resolve_spec;
use latcalc::lattice::GridLattice;

fn main() -> latcalc::Result<()> {
    let source = GridLattice::with_size(4)?;
    let target = GridLattice::new(vec!["t0".into(), "t1".into()])?;
    let mu = resolve_spec("mu:2,4")?;

    // a weighted point-selection map: one nonnegative entry per row
    let sparse = LinearMapRep::new(
        source.clone(),
        target.clone(),
        vec![vec![0.0, 2.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 0.5]],
    )?;
    let report = check_homomorphism_preserves(&sparse, &mu, 50, 42, DEFAULT_CHECK_TOL)?;
    println!(
        "row-sparse map: homomorphism = {}, preserves mu:2,4 = {} (max dev {:.2e})",
        sparse.is_homomorphism(),
        report.passed,
        report.max_deviation
    );

    // averaging is positive but mixes points; preservation fails
    let averaging = LinearMapRep::new(
        source.clone(),
        target.clone(),
        vec![vec![0.5, 0.5, 0.0, 0.0], vec![0.0, 0.0, 0.5, 0.5]],
    )?;
    let report = check_homomorphism_preserves(&averaging, &mu, 50, 42, DEFAULT_CHECK_TOL)?;
    println!(
        "averaging map:  homomorphism = {}, preserves mu:2,4 = {} (max dev {:.2e})",
        averaging.is_homomorphism(),
        report.passed,
        report.max_deviation
    );
    if let Some(w) = &report.witness {
        println!(
            "  witness: trial {}, point {}, {} vs {}",
            w.trial, w.point, w.lhs, w.rhs
        );
    }

    // the converse: mu:2,4(x, x) = |x|, so a map preserving mu:2,4 must
    // commute with the modulus
    let converse = check_preservation_implies_modulus(
        &sparse,
        &mu,
        &[1.0, 1.0],
        1.0,
        50,
        42,
        DEFAULT_CHECK_TOL,
    )?;
    println!(
        "converse on the sparse map: preserves = {}, |S a| = S|a| = {:?}, implication held = {}",
        converse.preservation.passed, converse.modulus_commutes, converse.implication_held
    );
    Ok(())
}
