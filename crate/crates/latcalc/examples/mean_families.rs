//! The built-in positively homogeneous functions: Stolarsky and Gini means,
//! the Euclidean norm, the scaled geometric mean, and the power means.
//!
//! Run with `cargo run --example mean_families`.

use latcalc::homogeneous::{resolve_spec, Curvature};

fn main() -> latcalc::Result<()> {
    println!("{:<10} {:>12} {:>12} {:>12}", "name", "(3,4)", "(7,7)", "(0,5)");
    for spec in ["mu:2,4", "mu:1,-1", "mu:2,3", "nu:1,2", "norm:2", "geo:2", "pow:3"] {
        let h = resolve_spec(spec)?;
        println!(
            "{:<10} {:>12.7} {:>12.7} {:>12.7}",
            h.name(),
            h.eval(&[3.0, 4.0]),
            h.eval(&[7.0, 7.0]),
            h.eval(&[0.0, 5.0]),
        );
    }

    // positive homogeneity and absolute invariance, spot-checked
    let mu = resolve_spec("mu:2,4")?;
    println!("\nmu:2,4(6,8)   = {}  (= 2 * mu(3,4))", mu.eval(&[6.0, 8.0]));
    println!("mu:2,4(-3,4)  = {}  (= mu(3,4))", mu.eval(&[-3.0, 4.0]));

    // curvature certification by midpoint sampling; the two-parameter
    // families carry no a-priori tag
    println!("\ncurvature certification (500 samples, seed 42):");
    for spec in ["mu:2,4", "mu:1,-1", "nu:1,2", "norm:3", "geo:3", "pow:2"] {
        let h = resolve_spec(spec)?;
        let tag = match h.curvature() {
            Curvature::Unverified => h.certify_curvature(500, 42),
            tag => tag,
        };
        println!("  {:<8} -> {:?}", h.name(), tag);
    }

    // gradients: analytic for norm/geo/pow, finite differences otherwise
    let geo = resolve_spec("geo:2")?;
    let c = [1.0 / 2.0f64.sqrt(), 1.0 / 2.0f64.sqrt()];
    println!("\ngrad geo:2 at (1,1)/sqrt(2) = {:?}", geo.gradient_at(&c)?);
    let boundary = geo.gradient_at(&[0.0, 1.0]);
    println!("grad geo:2 at (0,1)         = {:?}", boundary.err().map(|e| e.to_string()));
    Ok(())
}
