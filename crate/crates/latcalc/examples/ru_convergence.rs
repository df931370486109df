//! Relative-uniform convergence: `|f_n - f| < eps * p` eventually, for a
//! fixed strictly positive regulator `p`.
//!
//! Run with `cargo run --example ru_convergence`.

use latcalc::lattice::{check_ru_cauchy, check_ru_convergence, Element, GridLattice, Regulator};

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::with_size(4)?;
    let limit = Element::new(grid.clone(), vec![2.0, -1.0, 0.5, 3.0])?;
    let p = Regulator::new(Element::new(grid.clone(), vec![1.0, 2.0, 0.5, 1.0])?)?;

    // f_n = f + (1/n) p converges with regulator p
    let seq: Vec<Element> = (1..=40)
        .map(|n| {
            let bump = p.element().scale(1.0 / n as f64).unwrap();
            limit.add(&bump).unwrap()
        })
        .collect();
    let report = check_ru_convergence(&seq, &limit, &p, &[1.0, 0.1, 0.05])?;
    println!("f_n = f + (1/n)p, converged: {}", report.converged);
    for (eps, n) in &report.per_epsilon {
        println!("  eps = {eps:<5} first good index N = {n:?}");
    }

    // the same sequence is relatively uniformly Cauchy
    let cauchy = check_ru_cauchy(&seq, &p, &[1.0, 0.1, 0.05])?;
    println!("cauchy: {}", cauchy.converged);

    // an alternating sequence stays a full regulator away
    let alternating: Vec<Element> = (0..12)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            limit.add(&p.element().scale(sign).unwrap()).unwrap()
        })
        .collect();
    let bad = check_ru_convergence(&alternating, &limit, &p, &[0.5])?;
    println!("alternating +/- p, converged: {}", bad.converged);
    Ok(())
}
