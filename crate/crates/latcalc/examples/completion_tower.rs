//! Closure towers: starting from generator elements, each stage adjoins all
//! applications of a function set to the previous stage plus lattice
//! combinations, giving a finite sample of the smallest lattice closed under
//! the set. Lattice homomorphisms of the seed extend uniquely through the
//! tower by pushing them through every node.
//!
//! Run with `cargo run --example completion_tower`.

use latcalc::completion::{eval_expr, extend_homomorphism, Expr, LinearMapRep, Tower};
use latcalc::homogeneous::resolve_spec;
use latcalc::lattice::{Element, GridLattice};

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::with_size(3)?;
    let f = Element::new(grid.clone(), vec![1.0, -2.0, 0.5])?;
    let g = Element::new(grid.clone(), vec![2.0, 1.0, -1.0])?;

    let tower = Tower::new(vec![f, g], vec![resolve_spec("mu:2,4")?])?;
    let tower = tower.closure_step(100)?.closure_step(400)?;
    for (i, level) in tower.levels().iter().enumerate() {
        println!("level {}: {} expressions", i + 1, level.len());
    }
    println!("\nfirst expressions of level 2:");
    for e in tower.levels()[1].iter().take(8) {
        let value = eval_expr(e, tower.generators())?;
        println!("  {e}  ->  {:?}", value.values());
    }

    // the diagonal application recovers the modulus of a generator
    let diag = Expr::apply("mu:2,4", vec![Expr::gen(0), Expr::gen(0)]);
    println!(
        "\nmu:2,4(f, f) = {:?}  (|f| = {:?})",
        eval_expr(&diag, tower.generators())?.values(),
        tower.generators()[0].abs().values()
    );

    // a point evaluation extends through the whole tower and agrees with
    // direct evaluation at that point
    let point = LinearMapRep::point_evaluation(grid.clone(), 1)?;
    let sample = Expr::sup(
        Expr::scale(2.0, Expr::gen(0)),
        Expr::apply("mu:2,4", vec![Expr::gen(0), Expr::gen(1)]),
    );
    let through = extend_homomorphism(&tower, &point, &sample)?;
    let direct = eval_expr(&sample, tower.generators())?;
    println!(
        "\nextension through point 1: {}  direct: {}",
        through.values()[0],
        direct.values()[1]
    );
    Ok(())
}
