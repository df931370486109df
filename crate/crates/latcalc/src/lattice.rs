//! Finite evaluation grids and the vector lattice of real functions on them.
//!
//! A [`GridLattice`] is an ordered list of distinct point labels. An
//! [`Element`] is a finite real vector over such a grid; elements on the same
//! grid form an Archimedean vector lattice under the pointwise order, and the
//! point evaluations are exactly the real-valued lattice homomorphisms. All
//! values are kept finite: a NaN or infinity anywhere is a hard error, never
//! propagated.
//!
//! The module also implements relative-uniform convergence: `f_n -> f`
//! relatively uniformly with regulator `p > 0` when for every `eps > 0` there
//! is an `N` with `|f_n - f| < eps * p` for all `n >= N`. The inequality is
//! strict, pointwise, and ties count as failure.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite evaluation grid: an ordered list of distinct, opaque point labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLattice {
    labels: Vec<String>,
}

impl GridLattice {
    /// Builds a grid from explicit labels. Labels must be nonempty and distinct.
    pub fn new(labels: Vec<String>) -> Result<Arc<Self>> {
        if labels.is_empty() {
            return Err(Error::InvalidParameter(
                "a grid needs at least one point".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate grid label {l:?}"
                )));
            }
        }
        Ok(Arc::new(GridLattice { labels }))
    }

    /// Grid with `n` points labelled `p0`, `p1`, ...
    pub fn with_size(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a grid needs at least one point".into(),
            ));
        }
        Self::new((0..n).map(|i| format!("p{i}")).collect())
    }

    /// Uniform grid on `[0, 1]` with `n` points; labels carry the abscissae.
    /// Returns the grid together with the abscissa values.
    pub fn unit_interval(n: usize) -> Result<(Arc<Self>, Vec<f64>)> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "a unit-interval grid needs at least two points".into(),
            ));
        }
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let grid = Self::new(xs.iter().map(|x| format!("{x}")).collect())?;
        Ok((grid, xs))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn same_lattice(a: &Arc<GridLattice>, b: &Arc<GridLattice>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A real vector over a [`GridLattice`]. Immutable; all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    lattice: Arc<GridLattice>,
    values: Vec<f64>,
}

impl Element {
    pub fn new(lattice: Arc<GridLattice>, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.size() {
            return Err(Error::InvalidParameter(format!(
                "value count {} does not match grid size {}",
                values.len(),
                lattice.size()
            )));
        }
        for (v, l) in values.iter().zip(lattice.labels()) {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    label: l.clone(),
                    value: *v,
                });
            }
        }
        Ok(Element { lattice, values })
    }

    pub fn constant(lattice: Arc<GridLattice>, v: f64) -> Result<Self> {
        let n = lattice.size();
        Element::new(lattice, vec![v; n])
    }

    pub fn zeros(lattice: Arc<GridLattice>) -> Self {
        let n = lattice.size();
        Element {
            lattice,
            values: vec![0.0; n],
        }
    }

    pub fn lattice(&self) -> &Arc<GridLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_lattice(&self, other: &Element) -> bool {
        same_lattice(&self.lattice, &other.lattice)
    }

    fn check_same_lattice(&self, other: &Element) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch(format!(
                "elements live on different grids ({} vs {} points)",
                self.lattice.size(),
                other.lattice.size()
            )))
        }
    }

    fn zip_map(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Result<Element> {
        self.check_same_lattice(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Element::new(self.lattice.clone(), values)
    }

    /// Pointwise join (maximum).
    pub fn sup(&self, other: &Element) -> Result<Element> {
        self.zip_map(other, f64::max)
    }

    /// Pointwise meet (minimum).
    pub fn inf(&self, other: &Element) -> Result<Element> {
        self.zip_map(other, f64::min)
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Result<Element> {
        let values = self.values.iter().map(|v| k * v).collect();
        Element::new(self.lattice.clone(), values)
    }

    /// Pointwise absolute value.
    pub fn abs(&self) -> Element {
        let values = self.values.iter().map(|v| v.abs()).collect();
        Element {
            lattice: self.lattice.clone(),
            values,
        }
    }

    /// Pointwise `max(., 0)`.
    pub fn positive_part(&self) -> Element {
        let values = self.values.iter().map(|v| v.max(0.0)).collect();
        Element {
            lattice: self.lattice.clone(),
            values,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &Element) -> Result<f64> {
        self.check_same_lattice(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `true` iff `self <= other` pointwise.
    pub fn le_pointwise(&self, other: &Element) -> Result<bool> {
        self.check_same_lattice(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a <= b))
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = ElementWire {
            lattice: self.lattice.labels().to_vec(),
            values: self.values.clone(),
        };
        Ok(serde_json::to_string(&wire)?)
    }

    pub fn from_json(s: &str) -> Result<Element> {
        let wire: ElementWire = serde_json::from_str(s)?;
        let lattice = GridLattice::new(wire.lattice)?;
        Element::new(lattice, wire.values)
    }

    /// One `label,value` row per point. Labels must not contain commas or
    /// newlines; use JSON for arbitrary labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (l, v) in self.lattice.labels().iter().zip(&self.values) {
            let _ = writeln!(out, "{l},{v}");
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Element> {
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (label, value) = line.split_once(',').ok_or_else(|| Error::Parse {
                offset: i,
                message: format!("csv row {i} has no comma: {line:?}"),
            })?;
            let v: f64 = value.trim().parse().map_err(|_| Error::Parse {
                offset: i,
                message: format!("csv row {i} has a bad number: {value:?}"),
            })?;
            labels.push(label.trim().to_string());
            values.push(v);
        }
        let lattice = GridLattice::new(labels)?;
        Element::new(lattice, values)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementWire {
    lattice: Vec<String>,
    values: Vec<f64>,
}

/// A strictly positive element controlling relative-uniform convergence.
///
/// The abstract theory only needs a nonzero positive regulator, but on a
/// finite grid a regulator that vanishes at a point would force equality at
/// that point; we require strict positivity everywhere.
#[derive(Debug, Clone)]
pub struct Regulator {
    element: Element,
}

impl Regulator {
    pub fn new(element: Element) -> Result<Self> {
        if !element.values().iter().all(|v| *v > 0.0) {
            return Err(Error::InvalidParameter(
                "a regulator must be strictly positive at every point".into(),
            ));
        }
        Ok(Regulator { element })
    }

    pub fn ones(lattice: Arc<GridLattice>) -> Self {
        Regulator {
            element: Element::constant(lattice, 1.0).expect("constant 1 is finite"),
        }
    }

    pub fn element(&self) -> &Element {
        &self.element
    }
}

/// Outcome of a relative-uniform convergence or Cauchy check.
///
/// `per_epsilon` pairs each requested `eps` with the smallest index `N`
/// (1-based) that works, or `None` when no index within the sequence does.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub per_epsilon: Vec<(f64, Option<usize>)>,
    pub regulator_used: Regulator,
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::InvalidEpsilons("epsilon list is empty".into()));
    }
    for pair in epsilons.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidEpsilons(
                "epsilons must be strictly decreasing".into(),
            ));
        }
    }
    if epsilons.iter().any(|e| *e <= 0.0) {
        return Err(Error::InvalidEpsilons("epsilons must be positive".into()));
    }
    Ok(())
}

fn check_sequence(seq: &[Element]) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    for e in &seq[1..] {
        e.check_same_lattice(&seq[0])?;
    }
    Ok(())
}

/// `|a| < eps * p` pointwise, with strict comparison (ties fail).
fn within(diff: &Element, eps: f64, p: &Element) -> bool {
    diff.values()
        .iter()
        .zip(p.values())
        .all(|(d, pv)| d.abs() < eps * pv)
}

/// For each `eps`, the smallest `N` with `|f_n - f| < eps * p` for all
/// `n >= N` (1-based); `converged` iff every `eps` admits such an `N`.
pub fn check_ru_convergence(
    seq: &[Element],
    limit: &Element,
    p: &Regulator,
    epsilons: &[f64],
) -> Result<ConvergenceReport> {
    check_sequence(seq)?;
    check_epsilons(epsilons)?;
    limit.check_same_lattice(&seq[0])?;
    p.element().check_same_lattice(&seq[0])?;

    let diffs: Vec<Element> = seq
        .iter()
        .map(|f| f.sub(limit).map(|d| d.abs()))
        .collect::<Result<_>>()?;

    let mut per_epsilon = Vec::with_capacity(epsilons.len());
    let mut converged = true;
    for &eps in epsilons {
        // N works iff no failure at any n >= N, so N = last failure + 1.
        let last_fail = diffs
            .iter()
            .rposition(|d| !within(d, eps, p.element()));
        let n = match last_fail {
            None => Some(1),
            Some(i) if i + 1 < diffs.len() => Some(i + 2),
            Some(_) => None,
        };
        converged &= n.is_some();
        per_epsilon.push((eps, n));
    }
    Ok(ConvergenceReport {
        converged,
        per_epsilon,
        regulator_used: p.clone(),
    })
}

/// Cauchy variant: the smallest `N` with `|f_m - f_n| < eps * p` for all
/// `m, n >= N`. A suffix must contain at least two terms to certify, so `N`
/// ranges over `1..=len-1` and a one-element sequence never certifies.
pub fn check_ru_cauchy(
    seq: &[Element],
    p: &Regulator,
    epsilons: &[f64],
) -> Result<ConvergenceReport> {
    check_sequence(seq)?;
    check_epsilons(epsilons)?;
    p.element().check_same_lattice(&seq[0])?;

    let len = seq.len();
    let mut per_epsilon = Vec::with_capacity(epsilons.len());
    let mut converged = true;
    for &eps in epsilons {
        // valid(N) means every pair in the suffix starting at N is within
        // eps*p; scan suffixes from the end so each pair is checked once.
        let mut best: Option<usize> = None;
        let mut valid = true;
        for start in (0..len.saturating_sub(1)).rev() {
            if valid {
                for m in start + 1..len {
                    let d = seq[start].sub(&seq[m])?;
                    if !within(&d, eps, p.element()) {
                        valid = false;
                        break;
                    }
                }
            }
            if valid {
                best = Some(start + 1);
            } else {
                break;
            }
        }
        converged &= best.is_some();
        per_epsilon.push((eps, best));
    }
    Ok(ConvergenceReport {
        converged,
        per_epsilon,
        regulator_used: p.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Arc<GridLattice> {
        GridLattice::with_size(n).unwrap()
    }

    fn elem(g: &Arc<GridLattice>, vals: &[f64]) -> Element {
        Element::new(g.clone(), vals.to_vec()).unwrap()
    }

    #[test]
    fn sup_with_zero_is_positive_part() {
        let g = grid(2);
        let a = elem(&g, &[1.0, -2.0]);
        let zero = Element::zeros(g.clone());
        assert_eq!(a.sup(&zero).unwrap().values(), &[1.0, 0.0]);
        assert_eq!(a.positive_part().values(), &[1.0, 0.0]);
    }

    #[test]
    fn sup_is_idempotent() {
        let g = grid(2);
        let a = elem(&g, &[3.0, 3.0]);
        assert_eq!(a.sup(&a).unwrap().values(), &[3.0, 3.0]);
    }

    #[test]
    fn sup_is_pointwise_max() {
        let g = grid(3);
        let a = elem(&g, &[1.0, 5.0, -1.0]);
        let b = elem(&g, &[2.0, 4.0, -3.0]);
        assert_eq!(a.sup(&b).unwrap().values(), &[2.0, 5.0, -1.0]);
    }

    #[test]
    fn inf_abs_positive_part_examples() {
        let g = grid(2);
        assert_eq!(
            elem(&g, &[1.0, 5.0])
                .inf(&elem(&g, &[2.0, 4.0]))
                .unwrap()
                .values(),
            &[1.0, 4.0]
        );
        assert_eq!(elem(&g, &[-1.0, 2.0]).abs().values(), &[1.0, 2.0]);
        assert_eq!(
            elem(&g, &[-1.0, 2.0]).positive_part().values(),
            &[0.0, 2.0]
        );
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = elem(&grid(2), &[1.0, 2.0]);
        let b = elem(&grid(3), &[1.0, 2.0, 3.0]);
        assert!(matches!(a.sup(&b), Err(Error::LatticeMismatch(_))));
    }

    #[test]
    fn nan_is_a_hard_error() {
        let g = grid(2);
        assert!(matches!(
            Element::new(g.clone(), vec![1.0, f64::NAN]),
            Err(Error::NonFinite { .. })
        ));
        let a = elem(&g, &[1.0, 1e308]);
        assert!(a.scale(10.0).is_err());
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        assert!(GridLattice::new(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn regulator_must_be_strictly_positive() {
        let g = grid(2);
        assert!(Regulator::new(elem(&g, &[1.0, 0.0])).is_err());
        assert!(Regulator::new(elem(&g, &[1.0, 0.5])).is_ok());
    }

    #[test]
    fn constant_sequence_converges_immediately() {
        let g = grid(3);
        let f = elem(&g, &[1.0, -2.0, 0.5]);
        let p = Regulator::ones(g.clone());
        let seq = vec![f.clone(); 5];
        let rep = check_ru_convergence(&seq, &f, &p, &[1.0, 0.1]).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.per_epsilon, vec![(1.0, Some(1)), (0.1, Some(1))]);
    }

    #[test]
    fn one_over_n_sequence_needs_n_eleven_at_tenth() {
        let g = grid(2);
        let f = elem(&g, &[2.0, -1.0]);
        let p = Regulator::new(elem(&g, &[1.0, 2.0])).unwrap();
        let seq: Vec<Element> = (1..=20)
            .map(|n| f.add(&p.element().scale(1.0 / n as f64).unwrap()).unwrap())
            .collect();
        let rep = check_ru_convergence(&seq, &f, &p, &[0.1]).unwrap();
        assert!(rep.converged);
        // 1/n < 0.1 first at n = 11; the tie at n = 10 fails.
        assert_eq!(rep.per_epsilon, vec![(0.1, Some(11))]);
    }

    #[test]
    fn alternating_sequence_does_not_converge() {
        let g = grid(2);
        let f = elem(&g, &[0.0, 0.0]);
        let p = Regulator::ones(g.clone());
        let seq: Vec<Element> = (0..10)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                f.add(&p.element().scale(sign).unwrap()).unwrap()
            })
            .collect();
        let rep = check_ru_convergence(&seq, &f, &p, &[0.5]).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.per_epsilon, vec![(0.5, None)]);
    }

    #[test]
    fn constant_sequence_is_cauchy() {
        let g = grid(2);
        let f = elem(&g, &[1.0, 2.0]);
        let p = Regulator::ones(g.clone());
        let rep = check_ru_cauchy(&vec![f; 4], &p, &[1.0, 0.5]).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.per_epsilon, vec![(1.0, Some(1)), (0.5, Some(1))]);
    }

    #[test]
    fn geometric_partial_sums_are_cauchy_with_log_index() {
        let g = grid(2);
        let p = Regulator::ones(g.clone());
        let mut seq = Vec::new();
        let mut acc = Element::zeros(g.clone());
        for k in 1..=20 {
            acc = acc
                .add(&p.element().scale(0.5f64.powi(k)).unwrap())
                .unwrap();
            seq.push(acc.clone());
        }
        let rep = check_ru_cauchy(&seq, &p, &[0.5, 0.25, 0.125]).unwrap();
        assert!(rep.converged);
        // max suffix gap from index N is 2^-N - 2^-20, first < eps at
        // N = log2(1/eps).
        assert_eq!(
            rep.per_epsilon,
            vec![(0.5, Some(1)), (0.25, Some(2)), (0.125, Some(3))]
        );
    }

    #[test]
    fn alternating_sequence_is_not_cauchy() {
        let g = grid(1);
        let p = Regulator::ones(g.clone());
        let seq: Vec<Element> = (0..8)
            .map(|n| elem(&g, &[if n % 2 == 0 { 1.0 } else { -1.0 }]))
            .collect();
        let rep = check_ru_cauchy(&seq, &p, &[0.5]).unwrap();
        assert!(!rep.converged);
    }

    #[test]
    fn empty_sequence_and_bad_epsilons_are_rejected() {
        let g = grid(2);
        let f = elem(&g, &[0.0, 0.0]);
        let p = Regulator::ones(g.clone());
        assert!(matches!(
            check_ru_convergence(&[], &f, &p, &[0.1]),
            Err(Error::EmptySequence)
        ));
        assert!(check_ru_convergence(std::slice::from_ref(&f), &f, &p, &[0.1, 0.2]).is_err());
        assert!(check_ru_convergence(std::slice::from_ref(&f), &f, &p, &[0.1, -0.2]).is_err());
        assert!(check_ru_convergence(std::slice::from_ref(&f), &f, &p, &[]).is_err());
    }

    #[test]
    fn convergence_is_monotone_in_the_regulator() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = grid(5);
        for _ in 0..25 {
            let f = elem(
                &g,
                &(0..5)
                    .map(|_| rng.random_range(-3.0..3.0))
                    .collect::<Vec<_>>(),
            );
            let p = Regulator::new(elem(
                &g,
                &(0..5)
                    .map(|_| rng.random_range(0.2..2.0))
                    .collect::<Vec<_>>(),
            ))
            .unwrap();
            let q = Regulator::new(
                p.element()
                    .add(
                        &elem(
                            &g,
                            &(0..5)
                                .map(|_| rng.random_range(0.0..1.0))
                                .collect::<Vec<_>>(),
                        ),
                    )
                    .unwrap(),
            )
            .unwrap();
            let seq: Vec<Element> = (1..=40)
                .map(|n| {
                    f.add(&p.element().scale(0.8f64.powi(n)).unwrap())
                        .unwrap()
                })
                .collect();
            let eps = [1.0, 0.5, 0.1, 0.05];
            let rp = check_ru_convergence(&seq, &f, &p, &eps).unwrap();
            let rq = check_ru_convergence(&seq, &f, &q, &eps).unwrap();
            assert!(rp.converged);
            assert!(rq.converged);
            for ((_, np), (_, nq)) in rp.per_epsilon.iter().zip(&rq.per_epsilon) {
                assert!(nq.unwrap() <= np.unwrap());
            }
            // indices grow as epsilon shrinks
            for rep in [&rp, &rq] {
                for w in rep.per_epsilon.windows(2) {
                    assert!(w[0].1.unwrap() <= w[1].1.unwrap());
                }
            }
        }
    }

    #[test]
    fn ru_with_ones_regulator_matches_sup_norm_convergence() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = grid(6);
        for _ in 0..50 {
            let f = elem(
                &g,
                &(0..6)
                    .map(|_| rng.random_range(-2.0..2.0))
                    .collect::<Vec<_>>(),
            );
            let rate: f64 = rng.random_range(0.3..0.9);
            let seq: Vec<Element> = (1..=30)
                .map(|n| {
                    let noise: Vec<f64> = (0..6)
                        .map(|_| rng.random_range(-1.0..1.0) * rate.powi(n))
                        .collect();
                    f.add(&elem(&g, &noise)).unwrap()
                })
                .collect();
            let ones = Regulator::ones(g.clone());
            let eps = [0.5, 0.1, 0.01];
            let rep = check_ru_convergence(&seq, &f, &ones, &eps).unwrap();
            for (eps, n) in &rep.per_epsilon {
                // sup-norm check, independently of the regulator machinery
                let sup_n = (0..seq.len()).find(|&start| {
                    seq[start..]
                        .iter()
                        .all(|fi| fi.sub(&f).unwrap().sup_norm() < *eps)
                });
                assert_eq!(*n, sup_n.map(|i| i + 1));
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let g = GridLattice::new(vec!["0".into(), "x".into(), "end".into()]).unwrap();
        let a = elem(&g, &[0.1, -1e-300, 12345.678901234567]);
        let b = Element::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(a.lattice().labels(), b.lattice().labels());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let g = grid(3);
        let a = elem(&g, &[0.30000000000000004, -7.0, 2e-17]);
        let b = Element::from_csv(&a.to_csv()).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    proptest! {
        #[test]
        fn lattice_axioms_hold_exactly(
            vals in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0, -100.0f64..100.0), 1..8)
        ) {
            let g = grid(vals.len());
            let a = elem(&g, &vals.iter().map(|t| t.0).collect::<Vec<_>>());
            let b = elem(&g, &vals.iter().map(|t| t.1).collect::<Vec<_>>());
            let c = elem(&g, &vals.iter().map(|t| t.2).collect::<Vec<_>>());

            let ab = a.sup(&b).unwrap();
            let ba = b.sup(&a).unwrap();
            prop_assert_eq!(ab.values(), ba.values());
            let ab_inf = a.inf(&b).unwrap();
            let ba_inf = b.inf(&a).unwrap();
            prop_assert_eq!(ab_inf.values(), ba_inf.values());
            let assoc_l = a.sup(&b.sup(&c).unwrap()).unwrap();
            let assoc_r = a.sup(&b).unwrap().sup(&c).unwrap();
            prop_assert_eq!(assoc_l.values(), assoc_r.values());
            let assoc_l = a.inf(&b.inf(&c).unwrap()).unwrap();
            let assoc_r = a.inf(&b).unwrap().inf(&c).unwrap();
            prop_assert_eq!(assoc_l.values(), assoc_r.values());
            // absorption
            let absorb = a.sup(&a.inf(&b).unwrap()).unwrap();
            prop_assert_eq!(absorb.values(), a.values());
            let absorb = a.inf(&a.sup(&b).unwrap()).unwrap();
            prop_assert_eq!(absorb.values(), a.values());
            // a + b = a v b + a ^ b bit-exactly: the join and meet are the
            // same two values reordered, so both sums round identically
            let lhs = a.add(&b).unwrap();
            let rhs = a.sup(&b).unwrap().add(&a.inf(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs.values(), rhs.values());
            // |a| = a v (-a), exactly
            let abs_a = a.abs();
            let sup_form = a.sup(&a.scale(-1.0).unwrap()).unwrap();
            prop_assert_eq!(abs_a.values(), sup_form.values());
        }
    }
}
