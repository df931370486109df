//! Non-closure certificates for piecewise-linear seed lattices.
//!
//! Seed functions are piecewise linear on a uniform grid over an interval,
//! with breakpoints only at designated knots. Applying a homogeneous
//! function pointwise produces an element that either stays in that class
//! (second differences vanish between knots, up to rounding) or leaves it,
//! in which case some inter-knot second difference is bounded away from
//! zero and certifies that the seed lattice is not closed under the
//! function.

use serde::Serialize;

use crate::calculus::pointwise_apply;
use crate::error::{Error, Result};
use crate::homogeneous::HomogeneousFn;
use crate::lattice::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateStatus {
    /// The image has a second difference exceeding the threshold: the seed
    /// lattice is certified not closed under the function.
    NotHComplete,
    /// No second difference stands out; membership is undecided.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondDifferenceWitness {
    /// Grid index of the middle point of the witnessing triple.
    pub index: usize,
    /// Abscissa of the middle point.
    pub x: f64,
    pub second_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessCertificate {
    pub status: CertificateStatus,
    pub function: String,
    /// Sup norm of the image, the scale the threshold is relative to.
    pub scale: f64,
    pub threshold: f64,
    pub max_second_difference: f64,
    pub witness: Option<SecondDifferenceWitness>,
}

/// Applies `h` to the seed functions and tests membership of the image in
/// the piecewise-linear class via discrete second differences strictly
/// between knots. `xs` are the (uniformly spaced, strictly increasing)
/// abscissae of the seed grid; `knots` are the designated breakpoints.
///
/// Emits `NotHComplete` with a witness when the largest admissible second
/// difference exceeds `1e-6 * sup|image|`, `Inconclusive` otherwise.
pub fn certify_not_h_complete(
    h: &HomogeneousFn,
    seedfns: &[Element],
    xs: &[f64],
    knots: &[f64],
) -> Result<CompletenessCertificate> {
    if seedfns.is_empty() {
        return Err(Error::InvalidParameter("no seed functions given".into()));
    }
    let n = seedfns[0].values().len();
    if xs.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} abscissae for a grid of {n} points",
            xs.len()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(
            "need at least three grid points for second differences".into(),
        ));
    }
    let h0 = xs[1] - xs[0];
    if h0 <= 0.0 {
        return Err(Error::InvalidParameter(
            "abscissae must be strictly increasing".into(),
        ));
    }
    for w in xs.windows(2) {
        let step = w[1] - w[0];
        if step <= 0.0 || (step - h0).abs() > 1e-12 * h0.max(1.0) {
            return Err(Error::InvalidParameter(
                "abscissae must be uniformly spaced".into(),
            ));
        }
    }
    let mut sorted_knots = knots.to_vec();
    sorted_knots.sort_by(|a, b| a.partial_cmp(b).expect("knots are finite"));

    let image = pointwise_apply(h, seedfns)?;
    let scale = image.sup_norm();
    let threshold = 1e-6 * scale;

    let mut max_d2 = 0.0f64;
    let mut witness = None;
    let mut admissible = 0usize;
    let v = image.values();
    for i in 1..n - 1 {
        // exclude triples whose open window contains a knot: a legitimate
        // breakpoint there would show up as a nonzero second difference
        let (lo, hi) = (xs[i - 1], xs[i + 1]);
        if sorted_knots.iter().any(|k| *k > lo && *k < hi) {
            continue;
        }
        admissible += 1;
        let d2 = (v[i - 1] - 2.0 * v[i] + v[i + 1]).abs();
        if d2 > max_d2 {
            max_d2 = d2;
            if d2 > threshold {
                witness = Some(SecondDifferenceWitness {
                    index: i,
                    x: xs[i],
                    second_difference: d2,
                });
            }
        }
    }
    if admissible == 0 {
        return Err(Error::InvalidParameter(
            "grid is not finer than the knots: no inter-knot triple exists".into(),
        ));
    }
    let status = if max_d2 > threshold {
        CertificateStatus::NotHComplete
    } else {
        CertificateStatus::Inconclusive
    };
    Ok(CompletenessCertificate {
        status,
        function: h.name().to_string(),
        scale,
        threshold,
        max_second_difference: max_d2,
        witness: if status == CertificateStatus::NotHComplete {
            witness
        } else {
            None
        },
    })
}
