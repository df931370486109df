//! Certifying that a lattice of piecewise-linear functions is not closed
//! under a mean: apply the mean pointwise and look for a second difference
//! bounded away from zero strictly between the designated breakpoints.
//!
//! Run with `cargo run --example pl_certificate`.

use latcalc::completion::certify_not_h_complete;
use latcalc::homogeneous::resolve_spec;
use latcalc::lattice::{Element, GridLattice};

fn main() -> latcalc::Result<()> {
    let (grid, xs) = GridLattice::unit_interval(257)?;
    let f = Element::new(grid.clone(), xs.clone())?; // x
    let g = Element::new(grid.clone(), xs.iter().map(|x| 1.0 - x).collect())?; // 1 - x
    let knots = [0.0, 1.0];

    // sqrt(x^2 + (1-x)^2) is strictly convex: not piecewise linear
    let norm = resolve_spec("norm:2")?;
    let cert = certify_not_h_complete(&norm, &[f.clone(), g.clone()], &xs, &knots)?;
    println!("norm:2 on (x, 1-x): {:?}", cert.status);
    if let Some(w) = &cert.witness {
        println!(
            "  witness at x = {}: second difference {:.3e} > threshold {:.3e}",
            w.x, w.second_difference, cert.threshold
        );
    }

    // control: the square mean of equal inputs is |f|, still piecewise linear
    let mu = resolve_spec("mu:2,4")?;
    let cert = certify_not_h_complete(&mu, &[f.clone(), f.clone()], &xs, &knots)?;
    println!("mu:2,4 on (x, x):   {:?}", cert.status);

    // control: the scaled geometric mean of (x, x) is 2x, affine
    let geo = resolve_spec("geo:2")?;
    let cert = certify_not_h_complete(&geo, &[f.clone(), f], &xs, &knots)?;
    println!("geo:2 on (x, x):    {:?}", cert.status);
    Ok(())
}
