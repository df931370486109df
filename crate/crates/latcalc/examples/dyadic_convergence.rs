//! The dyadic approximation sequence: level `n` takes the extremum of
//! `grad h(s_theta) . a` over the nested angle grids with spacing
//! `pi / 2^(n+1)`. The sequence is monotone and converges relatively
//! uniformly to the pointwise value.
//!
//! Run with `cargo run --example dyadic_convergence`.

use latcalc::calculus::sigma_sequence;
use latcalc::homogeneous::resolve_spec;
use latcalc::lattice::{check_ru_convergence, Element, GridLattice, Regulator};

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::with_size(8)?;
    let a = [
        Element::new(grid.clone(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])?,
        Element::new(grid.clone(), vec![8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0])?,
    ];

    let h = resolve_spec("pow:2")?;
    let trace = sigma_sequence(&h, &a, 10)?;
    println!("pow:2 dyadic trace (monotone: {}):", trace.monotone);
    print!("{}", trace.to_csv());

    // the trace is a relatively uniformly convergent sequence: certify it
    // against the sum of the inputs as regulator
    let oracle = latcalc::calculus::pointwise_apply(&h, &a)?;
    let regulator = Regulator::new(a[0].add(&a[1])?)?;
    let report = check_ru_convergence(
        &trace.sequence,
        &oracle,
        &regulator,
        &[1e-1, 1e-3, 1e-5],
    )?;
    println!("\nconvergence with regulator a1 + a2: {}", report.converged);
    for (eps, n) in &report.per_epsilon {
        println!("  eps = {eps:<7} N = {n:?}");
    }

    // a concave example converges from above
    let geo = resolve_spec("geo:2")?;
    let trace = sigma_sequence(&geo, &a, 8)?;
    println!("\ngeo:2 errors per level: {:?}", trace.errors);
    Ok(())
}
