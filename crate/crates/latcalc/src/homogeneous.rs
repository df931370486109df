//! Continuous positively-homogeneous functions on `R^m` and their gradients.
//!
//! The built-in families are the two-parameter Stolarsky means `mu:r,s`
//! (`r != s`, `s != 0`), the Gini means `nu:r,s` (`r != s`), the Euclidean
//! norm `norm:m`, the scaled geometric mean `geo:m` (which is `m` times the
//! usual geometric mean, so that it is a sum of coordinates on the diagonal),
//! and the p-th power means `pow:p,m`. All of these are positive and
//! absolutely invariant: they depend only on the absolute values of the
//! coordinates.
//!
//! Gradients are analytic where a closed form is available (norm, geometric,
//! power means) and central finite differences otherwise. On the boundary of
//! the positive orthant the gradient is the one-sided (orthant-relative)
//! derivative when it exists; points where it does not (the geometric mean at
//! a vanishing coordinate) are rejected as nondifferentiable.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{dyadic_grid, s_theta_coeffs};
use crate::error::{Error, Result};

/// Curvature of a function on the positive orthant, as certified by sampling
/// or asserted by construction. Evaluators that need a convex or concave
/// hypothesis trust this tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Curvature {
    ConvexOnPositiveOrthant,
    ConcaveOnPositiveOrthant,
    Neither,
    Unverified,
}

#[derive(Clone)]
enum Kind {
    Stolarsky { r: f64, s: f64 },
    Gini { r: f64, s: f64 },
    EuclideanNorm,
    ScaledGeometricMean,
    PowerMean { p: f64 },
    Custom(CustomFn),
}

/// A user-supplied gradient: returns `None` at nondifferentiable points.
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync>;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
struct CustomFn {
    eval: EvalFn,
    gradient: Option<GradientFn>,
}

/// A member of the class of continuous positively-homogeneous functions,
/// with arity, evaluator, optional analytic gradient, and certification
/// flags. Values are immutable and cheap to clone.
#[derive(Clone)]
pub struct HomogeneousFn {
    name: String,
    arity: usize,
    kind: Kind,
    curvature: Curvature,
    absolutely_invariant: bool,
    positive: bool,
}

impl std::fmt::Debug for HomogeneousFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomogeneousFn")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("curvature", &self.curvature)
            .finish()
    }
}

/// Stolarsky mean `mu:r,s` of arity 2; requires `r != s` and `s != 0`.
pub fn stolarsky(r: f64, s: f64) -> Result<HomogeneousFn> {
    if !r.is_finite() || !s.is_finite() {
        return Err(Error::InvalidParameter("mean parameters must be finite".into()));
    }
    if r == s {
        return Err(Error::InvalidParameter(format!(
            "stolarsky mean needs r != s, got r = s = {r}"
        )));
    }
    if s == 0.0 {
        return Err(Error::InvalidParameter("stolarsky mean needs s != 0".into()));
    }
    Ok(HomogeneousFn {
        name: format!("mu:{r},{s}"),
        arity: 2,
        kind: Kind::Stolarsky { r, s },
        curvature: Curvature::Unverified,
        absolutely_invariant: true,
        positive: true,
    })
}

/// Gini mean `nu:r,s` of arity 2; requires `r != s`.
pub fn gini(r: f64, s: f64) -> Result<HomogeneousFn> {
    if !r.is_finite() || !s.is_finite() {
        return Err(Error::InvalidParameter("mean parameters must be finite".into()));
    }
    if r == s {
        return Err(Error::InvalidParameter(format!(
            "gini mean needs r != s, got r = s = {r}"
        )));
    }
    Ok(HomogeneousFn {
        name: format!("nu:{r},{s}"),
        arity: 2,
        kind: Kind::Gini { r, s },
        curvature: Curvature::Unverified,
        absolutely_invariant: true,
        positive: true,
    })
}

/// Euclidean norm `norm:m`, `m >= 2`. Convex on the positive orthant.
pub fn euclidean_norm(m: usize) -> Result<HomogeneousFn> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "euclidean norm needs arity >= 2, got {m}"
        )));
    }
    Ok(HomogeneousFn {
        name: format!("norm:{m}"),
        arity: m,
        kind: Kind::EuclideanNorm,
        curvature: Curvature::ConvexOnPositiveOrthant,
        absolutely_invariant: true,
        positive: true,
    })
}

/// Scaled geometric mean `geo:m`: `m * (prod |x_k|)^(1/m)`, `m >= 2`.
/// Concave on the positive orthant.
pub fn scaled_geometric_mean(m: usize) -> Result<HomogeneousFn> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "scaled geometric mean needs arity >= 2, got {m}"
        )));
    }
    Ok(HomogeneousFn {
        name: format!("geo:{m}"),
        arity: m,
        kind: Kind::ScaledGeometricMean,
        curvature: Curvature::ConcaveOnPositiveOrthant,
        absolutely_invariant: true,
        positive: true,
    })
}

/// p-th power mean `pow:p,m`: `((sum |x_k|^p) / m)^(1/p)`, `p >= 1`.
/// For `m = 2` this coincides with `mu:p,2p`. A scaled `l^p` norm, hence
/// convex.
pub fn pth_power_mean(p: u32, m: usize) -> Result<HomogeneousFn> {
    if p < 1 {
        return Err(Error::InvalidParameter("power mean needs p >= 1".into()));
    }
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "power mean needs arity >= 2, got {m}"
        )));
    }
    Ok(HomogeneousFn {
        name: format!("pow:{p},{m}"),
        arity: m,
        kind: Kind::PowerMean { p: p as f64 },
        curvature: Curvature::ConvexOnPositiveOrthant,
        absolutely_invariant: true,
        positive: true,
    })
}

/// Wraps a user-supplied evaluator (and optional gradient, returning `None`
/// at nondifferentiable points). Homogeneity is the caller's responsibility;
/// [`HomogeneousFn::certify_curvature`] can be used to tag curvature.
pub fn custom(
    name: &str,
    arity: usize,
    eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    gradient: Option<GradientFn>,
    curvature: Curvature,
    absolutely_invariant: bool,
    positive: bool,
) -> Result<HomogeneousFn> {
    if arity == 0 {
        return Err(Error::InvalidParameter("arity must be positive".into()));
    }
    Ok(HomogeneousFn {
        name: name.to_string(),
        arity,
        kind: Kind::Custom(CustomFn {
            eval: Arc::new(eval),
            gradient,
        }),
        curvature,
        absolutely_invariant,
        positive,
    })
}

/// `((X^p + Y^p)/2)^(1/p)` on absolute values; shared by the power means and
/// the `s = 2r` Stolarsky branch. The dominant coordinate is factored out so
/// the intermediate powers stay in `[0, 1]` for either sign of `p`.
fn two_point_power_mean(p: f64, xa: f64, ya: f64) -> f64 {
    let mx = xa.max(ya);
    let mn = xa.min(ya);
    if p > 0.0 {
        if mx == 0.0 {
            return 0.0;
        }
        let q = mn / mx;
        mx * ((q.powf(p) + 1.0) / 2.0).powf(1.0 / p)
    } else {
        // p < 0 is harmonic-type, vanishing with either coordinate
        if mn == 0.0 {
            return 0.0;
        }
        let q = mn / mx;
        mn * ((1.0 + q.powf(-p)) / 2.0).powf(1.0 / p)
    }
}

/// Stolarsky mean on absolute values. The raw quotient form cancels
/// catastrophically near the diagonal, so the interior case is computed as
/// `sqrt(X*Y) * (r*sinh(s*u) / (s*sinh(r*u)))^(1/(s-r))` with
/// `u = (ln X - ln Y)/2`, which is stable for all gaps; the raw form is kept
/// for exponents large enough to overflow `sinh`. The closed forms for
/// `s = 2r` (a power mean) and `s = -r` (the geometric mean) are taken
/// exactly.
fn stolarsky_eval(r: f64, s: f64, x: f64, y: f64) -> f64 {
    let xa = x.abs();
    let ya = y.abs();
    if s == 2.0 * r && r != 0.0 {
        return two_point_power_mean(r, xa, ya);
    }
    if s == -r {
        return (xa * ya).sqrt();
    }
    let big = xa.max(ya);
    if (xa - ya).abs() <= 1e-9 * big {
        // diagonal branch; for |X - Y| <= 1e-9 max the mean is within 1e-9
        // relative of X anyway
        return xa;
    }
    if xa == 0.0 || ya == 0.0 {
        // continuous extension at a vanishing coordinate
        return if r > 0.0 && s > 0.0 {
            big * (r / s).powf(1.0 / (s - r))
        } else {
            0.0
        };
    }
    let u = 0.5 * (xa.ln() - ya.ln());
    if (r * u).abs() <= 30.0 && (s * u).abs() <= 30.0 {
        let q = if r == 0.0 {
            // r -> 0 limit of r*sinh(s*u)/(s*sinh(r*u))
            (s * u).sinh() / (s * u)
        } else {
            (r * (s * u).sinh()) / (s * ((r * u).sinh()))
        };
        (xa * ya).sqrt() * q.powf(1.0 / (s - r))
    } else {
        ((r * (xa.powf(s) - ya.powf(s))) / (s * (xa.powf(r) - ya.powf(r))))
            .powf(1.0 / (s - r))
    }
}

/// `ln(q^t + 1)` for `q` in `[0, 1]`, without overflow for negative `t`.
fn ln_pow_plus_one(q: f64, t: f64) -> f64 {
    if q == 0.0 {
        return if t == 0.0 { std::f64::consts::LN_2 } else { 0.0 };
    }
    if t >= 0.0 {
        q.powf(t).ln_1p()
    } else {
        t * q.ln() + q.powf(-t).ln_1p()
    }
}

/// Gini mean on absolute values, computed in log space after factoring out
/// the larger coordinate; the sums never cancel, so this is stable for all
/// parameter signs.
fn gini_eval(r: f64, s: f64, x: f64, y: f64) -> f64 {
    let xa = x.abs();
    let ya = y.abs();
    if xa == 0.0 && ya == 0.0 {
        return 0.0;
    }
    let mx = xa.max(ya);
    let q = xa.min(ya) / mx;
    if q == 0.0 && (r < 0.0 || s < 0.0) {
        // continuous extension: with a negative exponent the mean vanishes
        // at the boundary
        return 0.0;
    }
    let log_ratio = (ln_pow_plus_one(q, s) - ln_pow_plus_one(q, r)) / (s - r);
    mx * log_ratio.exp()
}

impl HomogeneousFn {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn is_absolutely_invariant(&self) -> bool {
        self.absolutely_invariant
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Returns a copy with the curvature tag replaced (e.g. after
    /// certification).
    pub fn with_curvature(mut self, curvature: Curvature) -> Self {
        self.curvature = curvature;
        self
    }

    pub fn has_analytic_gradient(&self) -> bool {
        match &self.kind {
            Kind::EuclideanNorm | Kind::ScaledGeometricMean | Kind::PowerMean { .. } => true,
            Kind::Custom(c) => c.gradient.is_some(),
            Kind::Stolarsky { .. } | Kind::Gini { .. } => false,
        }
    }

    /// Evaluates the function. Total on all of `R^m`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.arity,
            "{} takes {} arguments",
            self.name,
            self.arity
        );
        match &self.kind {
            Kind::Stolarsky { r, s } => stolarsky_eval(*r, *s, x[0], x[1]),
            Kind::Gini { r, s } => gini_eval(*r, *s, x[0], x[1]),
            Kind::EuclideanNorm => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Kind::ScaledGeometricMean => {
                let prod: f64 = x.iter().map(|v| v.abs()).product();
                let m = self.arity as f64;
                let root = match self.arity {
                    2 => prod.sqrt(),
                    3 => prod.cbrt(),
                    _ => prod.powf(1.0 / m),
                };
                m * root
            }
            Kind::PowerMean { p } => {
                let m = self.arity as f64;
                let sum: f64 = x.iter().map(|v| v.abs().powf(*p)).sum();
                let mean = sum / m;
                match *p as u32 {
                    1 => mean,
                    2 => mean.sqrt(),
                    3 => mean.cbrt(),
                    _ => mean.powf(1.0 / p),
                }
            }
            Kind::Custom(c) => (c.eval)(x),
        }
    }

    /// Gradient at `c`, which must lie in the positive orthant. Analytic
    /// when available, otherwise central finite differences with step
    /// `1e-6 * max(1, |c|)`. On the orthant boundary the one-sided derivative
    /// is used when it exists; otherwise the point is rejected as
    /// nondifferentiable.
    pub fn gradient_at(&self, c: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.arity);
        self.gradient_into(c, &mut out)?;
        Ok(out)
    }

    /// Allocation-free gradient for the angle sweeps; `out` is cleared and
    /// refilled on success.
    pub(crate) fn gradient_into(&self, c: &[f64], out: &mut Vec<f64>) -> Result<()> {
        assert_eq!(c.len(), self.arity);
        out.clear();
        if c.iter().any(|v| *v < 0.0) {
            return Err(Error::NondifferentiablePoint(format!(
                "{}: gradients are defined on the positive orthant, got a negative coordinate",
                self.name
            )));
        }
        match &self.kind {
            Kind::EuclideanNorm => {
                let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n == 0.0 {
                    return Err(Error::NondifferentiablePoint(format!(
                        "{}: not differentiable at the origin",
                        self.name
                    )));
                }
                out.extend(c.iter().map(|v| v / n));
                Ok(())
            }
            Kind::ScaledGeometricMean => {
                if c.contains(&0.0) {
                    return Err(Error::NondifferentiablePoint(format!(
                        "{}: no one-sided derivative at a vanishing coordinate",
                        self.name
                    )));
                }
                let m = self.arity as f64;
                let g = self.eval(c) / m; // (prod c)^(1/m)
                out.extend(c.iter().map(|v| g / v));
                Ok(())
            }
            Kind::PowerMean { p } => {
                let m = self.arity as f64;
                let value = self.eval(c);
                if value == 0.0 {
                    return Err(Error::NondifferentiablePoint(format!(
                        "{}: not differentiable at the origin",
                        self.name
                    )));
                }
                if *p == 1.0 {
                    // one-sided derivative on the orthant: constant 1/m
                    out.extend(std::iter::repeat_n(1.0 / m, self.arity));
                    return Ok(());
                }
                if *p == 2.0 {
                    let scale = 1.0 / (m * value);
                    out.extend(c.iter().map(|v| v * scale));
                    return Ok(());
                }
                if *p == 3.0 {
                    let scale = 1.0 / (m * value * value);
                    out.extend(c.iter().map(|v| v * v * scale));
                    return Ok(());
                }
                let scale = value.powf(1.0 - p);
                out.extend(c.iter().map(|v| v.powf(p - 1.0) * scale / m));
                Ok(())
            }
            Kind::Custom(CustomFn {
                gradient: Some(g), ..
            }) => match g(c) {
                Some(v) => {
                    out.extend(v);
                    Ok(())
                }
                None => Err(Error::NondifferentiablePoint(format!(
                    "{}: gradient undefined here",
                    self.name
                ))),
            },
            Kind::Stolarsky { .. } | Kind::Gini { .. } | Kind::Custom(_) => {
                let g = self.finite_difference_gradient(c)?;
                out.extend(g);
                Ok(())
            }
        }
    }

    fn finite_difference_gradient(&self, c: &[f64]) -> Result<Vec<f64>> {
        if c.iter().any(|v| *v <= 0.0) {
            return Err(Error::NondifferentiablePoint(format!(
                "{}: finite differences need a strictly interior point",
                self.name
            )));
        }
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let eta = 1e-6 * norm.max(1.0);
        let mut point = c.to_vec();
        let mut grad = Vec::with_capacity(self.arity);
        for k in 0..self.arity {
            let orig = point[k];
            point[k] = orig + eta;
            let hi = self.eval(&point);
            point[k] = orig - eta;
            let lo = self.eval(&point);
            point[k] = orig;
            grad.push((hi - lo) / (2.0 * eta));
        }
        Ok(grad)
    }

    /// Midpoint sampling test for convexity/concavity on the positive
    /// orthant. Evidence, not proof: `trials` random positive pairs are
    /// checked against `h((x+y)/2) <= (h(x)+h(y))/2 + 1e-10` and the reverse.
    /// When both directions survive (linear functions), the tag is convex.
    pub fn certify_curvature(&self, trials: usize, seed: u64) -> Curvature {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut convex_ok = true;
        let mut concave_ok = true;
        for _ in 0..trials.max(1) {
            let x: Vec<f64> = (0..self.arity)
                .map(|_| rng.random_range(0.001..10.0))
                .collect();
            let y: Vec<f64> = (0..self.arity)
                .map(|_| rng.random_range(0.001..10.0))
                .collect();
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a + b) / 2.0).collect();
            let hm = self.eval(&mid);
            let avg = (self.eval(&x) + self.eval(&y)) / 2.0;
            convex_ok &= hm <= avg + 1e-10;
            concave_ok &= hm >= avg - 1e-10;
            if !convex_ok && !concave_ok {
                return Curvature::Neither;
            }
        }
        if convex_ok {
            Curvature::ConvexOnPositiveOrthant
        } else if concave_ok {
            Curvature::ConcaveOnPositiveOrthant
        } else {
            Curvature::Neither
        }
    }
}

/// A point of the positive orthant with unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPositivePoint {
    coords: Vec<f64>,
}

impl UnitPositivePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidParameter(
                "unit positive point has a negative coordinate".into(),
            ));
        }
        let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "point norm {norm} is not 1 within 1e-12"
            )));
        }
        Ok(UnitPositivePoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Samples the differentiability set of `h` on the unit positive sphere: the
/// image of the dyadic angle grid at the given density, filtered to points
/// where [`HomogeneousFn::gradient_at`] succeeds.
///
/// Memory is proportional to the sample count (`2^(density*(arity-1))`,
/// capped at `2^24`); the sweep evaluators stream the same enumeration
/// without materializing it.
pub fn sample_delta_h(h: &HomogeneousFn, density: u32) -> Result<Vec<UnitPositivePoint>> {
    if density < 1 {
        return Err(Error::InvalidParameter("density must be >= 1".into()));
    }
    let grid = dyadic_grid(h.arity(), density)?;
    if grid.len() > (1 << 24) {
        return Err(Error::GridTooLarge(format!(
            "{} sample points exceed the 2^24 budget",
            grid.len()
        )));
    }
    let mut out = Vec::new();
    for theta in grid.iter() {
        let coords = s_theta_coeffs(h.arity(), theta.thetas());
        if h.gradient_at(&coords).is_ok() {
            out.push(UnitPositivePoint::new(coords)?);
        }
    }
    Ok(out)
}

/// Resolves a registry name: `mu:R,S | nu:R,S | norm:M | geo:M | pow:P[,M]`
/// with decimal `R`, `S` and integer `M`, `P`.
pub fn resolve_spec(spec: &str) -> Result<HomogeneousFn> {
    let colon = spec.find(':').ok_or_else(|| Error::Parse {
        offset: spec.len(),
        message: format!("mean spec {spec:?} has no ':'"),
    })?;
    let (head, rest) = (&spec[..colon], &spec[colon + 1..]);
    let param_offset = colon + 1;
    let parse_f64 = |s: &str, off: usize| -> Result<f64> {
        s.trim().parse().map_err(|_| Error::Parse {
            offset: off,
            message: format!("expected a decimal number, got {s:?}"),
        })
    };
    let parse_usize = |s: &str, off: usize| -> Result<usize> {
        s.trim().parse().map_err(|_| Error::Parse {
            offset: off,
            message: format!("expected an integer, got {s:?}"),
        })
    };
    match head {
        "mu" | "nu" => {
            let comma = rest.find(',').ok_or_else(|| Error::Parse {
                offset: spec.len(),
                message: format!("{head}:R,S needs two parameters"),
            })?;
            let r = parse_f64(&rest[..comma], param_offset)?;
            let s = parse_f64(&rest[comma + 1..], param_offset + comma + 1)?;
            if head == "mu" {
                stolarsky(r, s)
            } else {
                gini(r, s)
            }
        }
        "norm" => euclidean_norm(parse_usize(rest, param_offset)?),
        "geo" => scaled_geometric_mean(parse_usize(rest, param_offset)?),
        "pow" => match rest.find(',') {
            Some(comma) => {
                let p = parse_usize(&rest[..comma], param_offset)?;
                let m = parse_usize(&rest[comma + 1..], param_offset + comma + 1)?;
                pth_power_mean(p as u32, m)
            }
            None => pth_power_mean(parse_usize(rest, param_offset)? as u32, 2),
        },
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}
