//! The square-mean supremum `f [+] g = sup { f cos t + g sin t }` and the
//! complex modulus `|f + ig|`, both pointwise `sqrt(f^2 + g^2)`, and the
//! identity `sqrt(2) * mu:2,4(f, g) = f [+] g`.
//!
//! Run with `cargo run --example modulus_and_square_mean`.

use latcalc::calculus::{boxplus, complex_modulus, pointwise_apply};
use latcalc::homogeneous::resolve_spec;
use latcalc::lattice::{Element, GridLattice};

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::with_size(4)?;
    let f = Element::new(grid.clone(), vec![-3.0, 1.0, 0.0, 2.5])?;
    let g = Element::new(grid.clone(), vec![4.0, -1.0, 0.0, -6.0])?;

    println!("f = {:?}", f.values());
    println!("g = {:?}", g.values());

    let modulus = complex_modulus(&f, &g, 1024)?;
    println!("|f + ig| (1024 angles) = {:?}", modulus.values());
    let closed: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .collect();
    println!("sqrt(f^2 + g^2)        = {closed:?}");

    // the sup over the full circle only sees |f| and |g|
    let signed = boxplus(&f, &g, 1024)?;
    let unsigned = boxplus(&f.abs(), &g.abs(), 1024)?;
    println!(
        "sign invariance gap    = {:.3e}",
        signed.sup_distance(&unsigned)?
    );

    // the square mean carries the same information, scaled by sqrt(2)
    let mu = resolve_spec("mu:2,4")?;
    let via_mean = pointwise_apply(&mu, &[f.clone(), g.clone()])?.scale(2.0f64.sqrt())?;
    let oracle = Element::new(grid.clone(), closed)?;
    println!(
        "sqrt(2) mu:2,4 vs closed form: sup gap = {:.3e}",
        via_mean.sup_distance(&oracle)?
    );

    // grid-sup error shrinks like 1 - cos(pi/K)
    for k in [8, 64, 512, 4096] {
        let approx = boxplus(&f, &g, k)?;
        println!(
            "K = {k:>5}: sup gap = {:.3e}  (bound {:.3e})",
            approx.sup_distance(&oracle)?,
            (1.0 - (std::f64::consts::PI / k as f64).cos()) * oracle.sup_norm()
        );
    }
    Ok(())
}
