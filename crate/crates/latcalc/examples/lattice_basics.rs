//! Grids, elements, and the pointwise lattice operations.
//!
//! Run with `cargo run --example lattice_basics`.

use latcalc::lattice::{Element, GridLattice};

fn main() -> latcalc::Result<()> {
    let grid = GridLattice::new(vec!["a".into(), "b".into(), "c".into()])?;
    let f = Element::new(grid.clone(), vec![1.0, 5.0, -1.0])?;
    let g = Element::new(grid.clone(), vec![2.0, 4.0, -3.0])?;

    println!("f           = {:?}", f.values());
    println!("g           = {:?}", g.values());
    println!("f v g       = {:?}", f.sup(&g)?.values());
    println!("f ^ g       = {:?}", f.inf(&g)?.values());
    println!("|f|         = {:?}", f.abs().values());
    println!("f+          = {:?}", f.positive_part().values());
    println!("2f - g      = {:?}", f.scale(2.0)?.sub(&g)?.values());

    // the join and meet are the same two values redistributed, so the
    // decomposition f + g = (f v g) + (f ^ g) is exact
    let lhs = f.add(&g)?;
    let rhs = f.sup(&g)?.add(&f.inf(&g)?)?;
    println!("f+g == fvg + f^g pointwise: {}", lhs == rhs);

    // elements serialize to JSON and CSV with full precision
    let json = f.to_json()?;
    println!("json        = {json}");
    let back = Element::from_json(&json)?;
    println!("round-trip  = {}", back == f);

    // combining elements from different grids is rejected
    let other = GridLattice::with_size(3)?;
    let h = Element::new(other, vec![0.0, 0.0, 0.0])?;
    println!("mismatch    = {:?}", f.sup(&h).err().map(|e| e.to_string()));
    Ok(())
}
