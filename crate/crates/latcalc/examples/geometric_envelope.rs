//! The geometric-mean infimum `f [x] g = 1/2 inf { t f + g/t }` and its
//! many-variable form, the infimum of weighted sums over product-one
//! weights. Pointwise these are `sqrt(f g)` and `m (prod a_k)^(1/m)`.
//!
//! Run with `cargo run --example geometric_envelope`.

use latcalc::calculus::{boxtimes, pointwise_apply, product_one_inf};
use latcalc::homogeneous::resolve_spec;
use latcalc::lattice::{Element, GridLattice};

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::with_size(4)?;
    let f = Element::new(grid.clone(), vec![1.0, 4.0, 9.0, 0.0])?;
    let g = Element::new(grid.clone(), vec![4.0, 4.0, 1.0, 5.0])?;

    let result = boxtimes(&f, &g, 1024)?;
    println!("f [x] g (1024 weights) = {:?}", result.value.values());
    let closed: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a * b).sqrt())
        .collect();
    println!("sqrt(f g)              = {closed:?}");
    // where f or g vanishes the infimum is a limit, not attained on any
    // finite weight grid; the exact value 0 is substituted and flagged
    println!("unattained points      = {:?}", result.unattained);

    // three-way version over product-one weight tuples
    let a = [
        Element::new(grid.clone(), vec![1.0, 2.0, 1.0, 3.0])?,
        Element::new(grid.clone(), vec![1.0, 4.0, 8.0, 3.0])?,
        Element::new(grid.clone(), vec![1.0, 0.5, 27.0, 3.0])?,
    ];
    let inf3 = product_one_inf(&a, 256)?;
    let geo3 = pointwise_apply(&resolve_spec("geo:3")?, &a)?;
    println!("\nproduct-one inf (m=3)  = {:?}", inf3.value.values());
    println!("3 (a1 a2 a3)^(1/3)     = {:?}", geo3.values());
    println!(
        "sup gap                = {:.3e}",
        inf3.value.sup_distance(&geo3)?
    );
    Ok(())
}
