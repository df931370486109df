//! Inf-sup normal form: every lattice expression rewrites into a meet of
//! joins of linear combinations of atoms (generators and applications).
//!
//! Run with `cargo run --example normal_form`.

use latcalc::completion::{eval_expr, normalize, Expr};
use latcalc::lattice::{Element, GridLattice};

fn main() -> latcalc::Result<()> {
    // negation flips joins to meets
    let e = Expr::scale(-1.0, Expr::sup(Expr::gen(0), Expr::gen(1)));
    let nf = normalize(&e)?;
    println!("expression: {e}");
    println!("atoms:      {:?}", nf.atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>());
    println!("form:       {:?}", nf.terms);
    println!("rebuilt:    {}\n", nf.to_expr());

    // addition distributes over joins
    let e = Expr::add(Expr::sup(Expr::gen(0), Expr::gen(1)), Expr::gen(2));
    let nf = normalize(&e)?;
    println!("expression: {e}");
    println!("form:       {:?}", nf.terms);

    // the form evaluates exactly like the source expression
    let grid = GridLattice::with_size(4)?;
    let assignment = [
        Element::new(grid.clone(), vec![1.0, -2.0, 0.5, 3.0])?,
        Element::new(grid.clone(), vec![0.0, 4.0, 0.25, -3.0])?,
        Element::new(grid.clone(), vec![2.0, 2.0, 2.0, 2.0])?,
    ];
    let direct = eval_expr(&e, &assignment)?;
    let via_form = nf.eval(&assignment)?;
    println!("direct:     {:?}", direct.values());
    println!("via form:   {:?}", via_form.values());

    // applications stay opaque atoms: they are not linear
    let e = Expr::scale(
        -2.0,
        Expr::inf(
            Expr::apply("mu:2,4", vec![Expr::gen(0), Expr::gen(1)]),
            Expr::add(Expr::gen(0), Expr::gen(2)),
        ),
    );
    let nf = normalize(&e)?;
    println!("\nexpression: {e}");
    println!("atom count: {}, combinations: {}", nf.atoms.len(), nf.num_combinations());
    Ok(())
}
