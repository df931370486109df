//! Linear maps between grid lattices and their extensions through the
//! calculus.
//!
//! On finite grids the lattice homomorphisms into another grid lattice are
//! exactly the matrices with at most one nonzero, nonnegative entry per row;
//! that criterion is computed from the entries and gives an independent
//! ground truth for the preservation checks below.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

use crate::calculus::pointwise_apply;
use crate::completion::expr::Expr;
use crate::completion::tower::Tower;
use crate::error::{Error, Result};
use crate::homogeneous::{resolve_spec, HomogeneousFn};
use crate::lattice::{check_ru_cauchy, Element, GridLattice, Regulator};

/// Default tolerance for the preservation and modulus-commutation checks.
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;

/// Epsilon ladder used to certify that a sequence is relatively uniformly
/// Cauchy before extending a positive map along it.
const CAUCHY_EPSILONS: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];

/// A matrix over grid points (rows: target, columns: source) with positivity
/// metadata derived from the entries: `positive` iff all entries are
/// nonnegative, `homomorphism` iff additionally each row has at most one
/// nonzero entry.
#[derive(Debug, Clone)]
pub struct LinearMapRep {
    source: Arc<GridLattice>,
    target: Arc<GridLattice>,
    matrix: Vec<Vec<f64>>,
    positive: bool,
    homomorphism: bool,
}

impl LinearMapRep {
    pub fn new(
        source: Arc<GridLattice>,
        target: Arc<GridLattice>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if matrix.len() != target.size() {
            return Err(Error::InvalidParameter(format!(
                "matrix has {} rows for a target of size {}",
                matrix.len(),
                target.size()
            )));
        }
        for row in &matrix {
            if row.len() != source.size() {
                return Err(Error::InvalidParameter(format!(
                    "matrix row has {} columns for a source of size {}",
                    row.len(),
                    source.size()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(
                    "matrix entries must be finite".into(),
                ));
            }
        }
        let positive = matrix.iter().flatten().all(|v| *v >= 0.0);
        let homomorphism =
            positive && matrix.iter().all(|row| row.iter().filter(|v| **v != 0.0).count() <= 1);
        Ok(LinearMapRep {
            source,
            target,
            matrix,
            positive,
            homomorphism,
        })
    }

    pub fn identity(lattice: Arc<GridLattice>) -> Self {
        let n = lattice.size();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        LinearMapRep::new(lattice.clone(), lattice, matrix).expect("identity is well formed")
    }

    /// The evaluation `f -> f(p)` at one source grid point, landing on a
    /// one-point grid.
    pub fn point_evaluation(source: Arc<GridLattice>, index: usize) -> Result<Self> {
        if index >= source.size() {
            return Err(Error::InvalidParameter(format!(
                "point {index} out of range for a grid of size {}",
                source.size()
            )));
        }
        let target = GridLattice::new(vec![source.labels()[index].clone()])?;
        let mut row = vec![0.0; source.size()];
        row[index] = 1.0;
        LinearMapRep::new(source, target, vec![row])
    }

    pub fn source(&self) -> &Arc<GridLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GridLattice> {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn is_homomorphism(&self) -> bool {
        self.homomorphism
    }

    pub fn apply(&self, e: &Element) -> Result<Element> {
        if !e.same_lattice(&Element::zeros(self.source.clone())) {
            return Err(Error::LatticeMismatch(
                "element does not live on the map's source grid".into(),
            ));
        }
        let values: Vec<f64> = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(e.values()).map(|(m, v)| m * v).sum())
            .collect();
        Element::new(self.target.clone(), values)
    }
}

/// Pushes a lattice homomorphism of the seed grid through an expression:
/// generators map through the matrix, scalar multiples, sums, joins and
/// meets commute with a homomorphism, and applications commute with the
/// calculus. This is the unique homomorphism extension to the tower, and it
/// agrees with the matrix on the generators exactly.
pub fn extend_homomorphism(tower: &Tower, map: &LinearMapRep, e: &Expr) -> Result<Element> {
    if !map.is_homomorphism() {
        return Err(Error::NotHomomorphism(
            "extension through lattice operations needs a row-sparse nonnegative matrix".into(),
        ));
    }
    extend_rec(tower, map, e)
}

fn extend_rec(tower: &Tower, map: &LinearMapRep, e: &Expr) -> Result<Element> {
    match e {
        Expr::Generator(i) => {
            let g = tower.generators().get(*i).ok_or_else(|| {
                Error::InvalidParameter(format!("generator {i} outside the tower seed"))
            })?;
            map.apply(g)
        }
        Expr::Scale(k, inner) => extend_rec(tower, map, inner)?.scale(*k),
        Expr::Add(a, b) => extend_rec(tower, map, a)?.add(&extend_rec(tower, map, b)?),
        Expr::Sup(a, b) => extend_rec(tower, map, a)?.sup(&extend_rec(tower, map, b)?),
        Expr::Inf(a, b) => extend_rec(tower, map, a)?.inf(&extend_rec(tower, map, b)?),
        Expr::Apply(name, children) => {
            let h = resolve_spec(name)?;
            let args: Vec<Element> = children
                .iter()
                .map(|c| extend_rec(tower, map, c))
                .collect::<Result<_>>()?;
            pointwise_apply(&h, &args)
        }
    }
}

/// Extends a positive map along a relatively uniformly Cauchy sequence: maps
/// the sequence termwise and takes the entrywise limit (its final term, on a
/// finite grid). The sequence must certify Cauchy for the regulator; the
/// two evaluation orders (map the limit / take the limit of the image) are
/// cross-checked to 1e-9, which is the well-definedness of the extension.
pub fn extend_positive_map_by_limits(
    map: &LinearMapRep,
    seq: &[Element],
    p: &Regulator,
) -> Result<Element> {
    if !map.is_positive() {
        return Err(Error::NotPositive(
            "extension along limits needs a positive map".into(),
        ));
    }
    let report = check_ru_cauchy(seq, p, &CAUCHY_EPSILONS)?;
    if !report.converged {
        return Err(Error::NotCauchy);
    }
    let image: Vec<Element> = seq.iter().map(|f| map.apply(f)).collect::<Result<_>>()?;
    let limit_of_image = image.last().expect("sequence is nonempty").clone();
    let image_of_limit = map.apply(seq.last().expect("sequence is nonempty"))?;
    let dist = limit_of_image.sup_distance(&image_of_limit)?;
    if dist > 1e-9 {
        return Err(Error::CrossCheck(format!(
            "map/limit orders disagree by {dist}"
        )));
    }
    Ok(limit_of_image)
}

#[derive(Debug, Clone, Serialize)]
pub struct PreservationWitness {
    pub trial: usize,
    pub point: String,
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

/// Result of probing `T(h(a_1, ..., a_m)) = h(T a_1, ..., T a_m)` on random
/// tuples.
#[derive(Debug, Clone, Serialize)]
pub struct PreservationReport {
    pub function: String,
    pub trials: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub witness: Option<PreservationWitness>,
}

fn random_element(rng: &mut ChaCha8Rng, lattice: &Arc<GridLattice>) -> Element {
    let vals: Vec<f64> = (0..lattice.size())
        .map(|_| rng.random_range(-10.0..10.0))
        .collect();
    Element::new(lattice.clone(), vals).expect("bounded values are finite")
}

/// Checks whether a map commutes with the pointwise calculus of `h` on
/// `trials` seeded random tuples. A lattice homomorphism always passes; a
/// positive map with two or more nonzeros in some row fails with an explicit
/// witness for any strictly curved mean.
pub fn check_homomorphism_preserves(
    map: &LinearMapRep,
    h: &HomogeneousFn,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<PreservationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation = 0.0f64;
    let mut witness = None;
    for trial in 0..trials.max(1) {
        let tuple: Vec<Element> = (0..h.arity())
            .map(|_| random_element(&mut rng, map.source()))
            .collect();
        let lhs = map.apply(&pointwise_apply(h, &tuple)?)?;
        let mapped: Vec<Element> = tuple.iter().map(|a| map.apply(a)).collect::<Result<_>>()?;
        let rhs = pointwise_apply(h, &mapped)?;
        for (p, (l, r)) in lhs.values().iter().zip(rhs.values()).enumerate() {
            let dev = (l - r).abs();
            if dev > max_deviation {
                max_deviation = dev;
                if dev > tolerance {
                    witness = Some(PreservationWitness {
                        trial,
                        point: map.target().labels()[p].clone(),
                        lhs: *l,
                        rhs: *r,
                        deviation: dev,
                    });
                }
            }
        }
    }
    Ok(PreservationReport {
        function: h.name().to_string(),
        trials: trials.max(1),
        tolerance,
        max_deviation,
        passed: max_deviation <= tolerance,
        witness,
    })
}

/// Result of the converse probe: when `h(e_1 x, ..., e_m x) = lambda |x|`,
/// any linear map that preserves `h` must commute with the modulus.
#[derive(Debug, Clone, Serialize)]
pub struct ConverseReport {
    pub function: String,
    pub preservation: PreservationReport,
    /// Present only when preservation passed.
    pub modulus_max_deviation: Option<f64>,
    pub modulus_commutes: Option<bool>,
    pub modulus_witness: Option<PreservationWitness>,
    /// `preserves h` implies `commutes with modulus`, as observed.
    pub implication_held: bool,
}

/// Verifies the diagonal hypothesis `h(e_1 x, ..., e_m x) = lambda |x|`
/// numerically, then tests the implication "preserves `h` on random tuples,
/// hence commutes with the modulus on random elements".
pub fn check_preservation_implies_modulus(
    map: &LinearMapRep,
    h: &HomogeneousFn,
    eps: &[f64],
    lambda: f64,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<ConverseReport> {
    if lambda == 0.0 {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    if eps.len() != h.arity() {
        return Err(Error::ArityMismatch {
            name: h.name().to_string(),
            expected: h.arity(),
            got: eps.len(),
        });
    }
    for x in [1.0, -1.0, std::f64::consts::PI, -std::f64::consts::PI] {
        let args: Vec<f64> = eps.iter().map(|e| e * x).collect();
        let got = h.eval(&args);
        let want = lambda * x.abs();
        if (got - want).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "hypothesis unmet: {}({eps:?} * {x}) = {got}, expected {want}",
                h.name()
            )));
        }
    }

    let preservation = check_homomorphism_preserves(map, h, trials, seed, tolerance)?;
    let mut modulus_max = None;
    let mut commutes = None;
    let mut modulus_witness = None;
    if preservation.passed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut max_dev = 0.0f64;
        for trial in 0..trials.max(1) {
            let a = random_element(&mut rng, map.source());
            let lhs = map.apply(&a.abs())?;
            let rhs = map.apply(&a)?.abs();
            for (p, (l, r)) in lhs.values().iter().zip(rhs.values()).enumerate() {
                let dev = (l - r).abs();
                if dev > max_dev {
                    max_dev = dev;
                    if dev > tolerance {
                        modulus_witness = Some(PreservationWitness {
                            trial,
                            point: map.target().labels()[p].clone(),
                            lhs: *l,
                            rhs: *r,
                            deviation: dev,
                        });
                    }
                }
            }
        }
        modulus_max = Some(max_dev);
        commutes = Some(max_dev <= tolerance);
    }
    let implication_held = !preservation.passed || commutes == Some(true);
    Ok(ConverseReport {
        function: h.name().to_string(),
        preservation,
        modulus_max_deviation: modulus_max,
        modulus_commutes: commutes,
        modulus_witness,
        implication_held,
    })
}
