//! The supporting-hyperplane evaluation of `h(a_1, ..., a_m)`: for convex
//! `h`, the pointwise supremum of tangent planes `grad h(c) . a` over unit
//! directions `c` sampled from the positive orthant; for concave `h` the
//! infimum. The pointwise oracle is exact on a grid, so the gap between the
//! two routes shows the sampling error shrink with density.
//!
//! Run with `cargo run --example support_formula`.

use latcalc::calculus::{pointwise_apply, support_formula};
use latcalc::homogeneous::{resolve_spec, sample_delta_h};
use latcalc::lattice::{Element, GridLattice};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::with_size(32)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    for spec in ["norm:2", "geo:2", "pow:2,3"] {
        let h = resolve_spec(spec)?;
        let a: Vec<Element> = (0..h.arity())
            .map(|_| {
                let vals: Vec<f64> = (0..32).map(|_| rng.random_range(0.1..10.0)).collect();
                Element::new(grid.clone(), vals).unwrap()
            })
            .collect();
        let oracle = pointwise_apply(&h, &a)?;
        println!("{spec}: sup-norm gap to the pointwise oracle");
        for density in [1, 2, 4, 6, 8, 10] {
            let approx = support_formula(&h, &a, density)?;
            let sample_size = sample_delta_h(&h, density)?.len();
            println!(
                "  density {density:>2}  ({sample_size:>7} directions)  gap = {:.3e}",
                approx.sup_distance(&oracle)?
            );
        }
    }

    // a linear mean is its own tangent plane: the gap is exactly zero
    let p1 = resolve_spec("pow:1")?;
    let a = [
        Element::new(grid.clone(), (0..32).map(|i| i as f64 + 1.0).collect())?,
        Element::new(grid.clone(), (0..32).map(|i| 32.0 - i as f64).collect())?,
    ];
    let gap = support_formula(&p1, &a, 1)?.sup_distance(&pointwise_apply(&p1, &a)?)?;
    println!("pow:1 at density 1: gap = {gap}");
    Ok(())
}
