//! Evaluators for `h(a_1, ..., a_m)` on grid lattices.
//!
//! Three independent routes compute the same element:
//!
//! 1. [`pointwise_apply`]: the oracle. On a finite grid the point evaluations
//!    separate points and are lattice homomorphisms, so applying `h` value by
//!    value is exact.
//! 2. [`support_formula`]: for convex `h`, the pointwise supremum of the
//!    tangent planes `grad h(c) . a` over sampled unit directions `c` of the
//!    positive orthant (infimum for concave `h`). Approaches the oracle from
//!    below (above) as the sampling density grows.
//! 3. [`sigma_sequence`]: the dyadic approximation. Level `n` takes the
//!    extremum over the angle grid `P_n` (spacing `pi/2^(n+1)`); the grids
//!    are nested, so the sequence is monotone and converges relatively
//!    uniformly to the oracle.
//!
//! The module also provides the square-mean grid form [`boxplus`]
//! (`sup { f cos t + g sin t }`, pointwise `sqrt(f^2+g^2)`), the geometric
//! form [`boxtimes`] (`1/2 inf { t f + g/t }`, pointwise `sqrt(f g)`), the
//! [`complex_modulus`], and the product-one weighted infimum
//! [`product_one_inf`] (pointwise `m (prod a_k)^(1/m)`).
//!
//! Angle sweeps fold with `max`/`min` only, so parallel execution is exact
//! and independent of thread count.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homogeneous::{Curvature, HomogeneousFn};
use crate::lattice::Element;

/// Largest number of angle tuples a sweep will enumerate.
pub const MAX_SWEEP_TUPLES: u64 = 1 << 24;

/// An angle tuple `(t_1, ..., t_{m-1})` with each `t_j` in `[0, pi/2]`,
/// parametrizing the unit sphere of the positive orthant in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTuple {
    thetas: Vec<f64>,
}

impl AngleTuple {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidParameter(
                "an angle tuple needs at least one angle".into(),
            ));
        }
        for t in &thetas {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(t) {
                return Err(Error::InvalidParameter(format!(
                    "angle {t} outside [0, pi/2]"
                )));
            }
        }
        Ok(AngleTuple { thetas })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Arity of the space the tuple parametrizes.
    pub fn arity(&self) -> usize {
        self.thetas.len() + 1
    }
}

/// Spherical coordinate weights: `c_1 = cos t_1`,
/// `c_k = sin t_1 ... sin t_{k-1} cos t_k`, `c_m = sin t_1 ... sin t_{m-1}`.
/// The weights have unit Euclidean norm.
pub fn s_theta_coeffs(m: usize, thetas: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m];
    s_theta_coeffs_into(thetas, &mut out);
    out
}

/// `(sin t, cos t)`, exact at the quarter-turn boundary so that dyadic grid
/// points with `t = pi/2` produce coordinates that are exactly zero (the
/// differentiability filters depend on it).
fn exact_sincos(t: f64) -> (f64, f64) {
    if t == std::f64::consts::FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        (t.sin(), t.cos())
    }
}

fn s_theta_coeffs_into(thetas: &[f64], out: &mut [f64]) {
    debug_assert_eq!(out.len(), thetas.len() + 1);
    let mut prod = 1.0;
    for (k, t) in thetas.iter().enumerate() {
        let (s, c) = exact_sincos(*t);
        out[k] = prod * c;
        prod *= s;
    }
    out[thetas.len()] = prod;
}

/// The linear combination `sum_k c_k(theta) a_k` of lattice elements.
pub fn s_theta_combination(theta: &AngleTuple, a: &[Element]) -> Result<Element> {
    if a.len() != theta.arity() {
        return Err(Error::ArityMismatch {
            name: "s_theta".into(),
            expected: theta.arity(),
            got: a.len(),
        });
    }
    let coeffs = s_theta_coeffs(a.len(), theta.thetas());
    let mut acc = a[0].scale(coeffs[0])?;
    for (c, e) in coeffs.iter().zip(a).skip(1) {
        acc = acc.add(&e.scale(*c)?)?;
    }
    Ok(acc)
}

/// The dyadic angle grid at level `n` for arity `m`: all tuples
/// `(l_1 pi / 2^(n+1), ..., l_{m-1} pi / 2^(n+1))` with `l_j` in
/// `{1, ..., 2^n}`. Holds `(m, n)` and enumerates on demand; the count is
/// `2^(n(m-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGrid {
    m: usize,
    n: u32,
}

pub fn dyadic_grid(m: usize, n: u32) -> Result<DyadicGrid> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "dyadic grid needs arity >= 2, got {m}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("dyadic grid needs level >= 1".into()));
    }
    let bits = n as u64 * (m as u64 - 1);
    if bits >= 63 {
        return Err(Error::GridTooLarge(format!(
            "2^{bits} angle tuples is not enumerable"
        )));
    }
    Ok(DyadicGrid { m, n })
}

impl DyadicGrid {
    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    /// Number of tuples, `2^(n(m-1))`.
    pub fn len(&self) -> u64 {
        1u64 << (self.n as u64 * (self.m as u64 - 1))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Enumerates the tuples in lexicographic order of `(l_1, ..., l_{m-1})`.
    pub fn iter(&self) -> impl Iterator<Item = AngleTuple> + '_ {
        let dims = self.m - 1;
        let side = 1u64 << self.n;
        let step = PI / (1u64 << (self.n + 1)) as f64;
        (0..self.len()).map(move |idx| {
            let mut thetas = vec![0.0; dims];
            let mut rem = idx;
            for j in (0..dims).rev() {
                thetas[j] = ((rem % side) + 1) as f64 * step;
                rem /= side;
            }
            AngleTuple { thetas }
        })
    }
}

/// Which extremum a sweep folds with.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Fold {
    Sup,
    Inf,
}

impl Fold {
    fn init(self) -> f64 {
        match self {
            Fold::Sup => f64::NEG_INFINITY,
            Fold::Inf => f64::INFINITY,
        }
    }

    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Fold::Sup => a.max(b),
            Fold::Inf => a.min(b),
        }
    }
}

#[inline(always)]
fn extremum<const SUP: bool>(a: f64, b: f64) -> f64 {
    if SUP {
        a.max(b)
    } else {
        a.min(b)
    }
}

/// Tight inner loops of the angle sweeps, monomorphized over the fold
/// direction so they vectorize.
#[inline(always)]
fn fold_plane_2<const SUP: bool>(acc: &mut [f64], a0: &[f64], a1: &[f64], w0: f64, w1: f64) {
    for ((acc, x0), x1) in acc.iter_mut().zip(a0).zip(a1) {
        *acc = extremum::<SUP>(*acc, w0 * x0 + w1 * x1);
    }
}

#[inline(always)]
fn fold_plane_3<const SUP: bool>(
    acc: &mut [f64],
    a0: &[f64],
    a1: &[f64],
    a2: &[f64],
    w0: f64,
    w1: f64,
    w2: f64,
) {
    for (((acc, x0), x1), x2) in acc.iter_mut().zip(a0).zip(a1).zip(a2) {
        *acc = extremum::<SUP>(*acc, w0 * x0 + w1 * x1 + w2 * x2);
    }
}

fn fold_plane(acc: &mut [f64], values: &[&[f64]], grad: &[f64], fold: Fold) {
    match (values.len(), fold) {
        (2, Fold::Sup) => fold_plane_2::<true>(acc, values[0], values[1], grad[0], grad[1]),
        (2, Fold::Inf) => fold_plane_2::<false>(acc, values[0], values[1], grad[0], grad[1]),
        (3, Fold::Sup) => fold_plane_3::<true>(
            acc, values[0], values[1], values[2], grad[0], grad[1], grad[2],
        ),
        (3, Fold::Inf) => fold_plane_3::<false>(
            acc, values[0], values[1], values[2], grad[0], grad[1], grad[2],
        ),
        _ => {
            for (p, acc) in acc.iter_mut().enumerate() {
                let v: f64 = grad.iter().zip(values).map(|(w, a)| w * a[p]).sum();
                *acc = fold.apply(*acc, v);
            }
        }
    }
}

/// Weights are gathered into blocks and applied tile by tile so the value
/// and accumulator streams stay cache-resident across a whole block instead
/// of being re-read per angle.
const WEIGHT_BLOCK: usize = 64;
const POINT_TILE: usize = 512;

fn apply_weight_block(
    acc: &mut [f64],
    values: &[&[f64]],
    block: &[f64],
    block_len: usize,
    m: usize,
    fold: Fold,
) {
    let n = acc.len();
    let mut start = 0;
    let mut tile_views: Vec<&[f64]> = Vec::with_capacity(m);
    while start < n {
        let end = (start + POINT_TILE).min(n);
        tile_views.clear();
        tile_views.extend(values.iter().map(|v| &v[start..end]));
        for t in 0..block_len {
            fold_plane(
                &mut acc[start..end],
                &tile_views,
                &block[t * m..(t + 1) * m],
                fold,
            );
        }
        start = end;
    }
}

/// Streams the level-`n` angle grid, folding `grad h(s_theta) . a` into a
/// per-point extremum. The value slices may stack several query tuples
/// (`values[k]` holds coordinate `k` of every query, concatenated); each
/// weight is computed once and applied across the whole stack. `only_new`
/// restricts to tuples absent from level `n-1` (those with some odd `l_j`).
/// Returns the accumulator and the number of tuples skipped as
/// nondifferentiable. Exact under parallelism: the fold is a pointwise
/// max/min over a fixed chunking of the angle grid.
fn weight_sweep(
    h: &HomogeneousFn,
    values: &[&[f64]],
    level: u32,
    only_new: bool,
    fold: Fold,
    init: Vec<f64>,
) -> (Vec<f64>, u64) {
    let m = h.arity();
    let dims = m - 1;
    let side = 1u64 << level;
    let count = 1u64 << (level as u64 * dims as u64);
    let step = PI / (1u64 << (level + 1)) as f64;

    // trig tables for the 2^n admissible angles
    let mut sin_tab = Vec::with_capacity(side as usize);
    let mut cos_tab = Vec::with_capacity(side as usize);
    for l in 1..=side {
        let (s, c) = exact_sincos(l as f64 * step);
        sin_tab.push(s);
        cos_tab.push(c);
    }

    let npts = values[0].len();
    let sweep_range = |start: u64, end: u64| -> (Vec<f64>, u64) {
        let mut acc = vec![fold.init(); npts];
        let mut skipped = 0u64;
        // odometer over the digit tuple, last digit fastest
        let mut digits = vec![0u64; dims];
        let mut rem = start;
        for j in (0..dims).rev() {
            digits[j] = rem % side;
            rem /= side;
        }
        let mut coeffs = vec![0.0; m];
        let mut grad = Vec::with_capacity(m);
        let mut block = vec![0.0; WEIGHT_BLOCK * m];
        let mut block_len = 0usize;
        for _ in start..end {
            let process = !(only_new && digits.iter().all(|d| (d + 1) % 2 == 0));
            if process {
                let mut prod = 1.0;
                for (j, d) in digits.iter().enumerate() {
                    coeffs[j] = prod * cos_tab[*d as usize];
                    prod *= sin_tab[*d as usize];
                }
                coeffs[dims] = prod;
                if h.gradient_into(&coeffs, &mut grad).is_ok() {
                    block[block_len * m..(block_len + 1) * m].copy_from_slice(&grad);
                    block_len += 1;
                    if block_len == WEIGHT_BLOCK {
                        apply_weight_block(&mut acc, values, &block, block_len, m, fold);
                        block_len = 0;
                    }
                } else {
                    skipped += 1;
                }
            }
            for j in (0..dims).rev() {
                digits[j] += 1;
                if digits[j] < side {
                    break;
                }
                digits[j] = 0;
            }
        }
        if block_len > 0 {
            apply_weight_block(&mut acc, values, &block, block_len, m, fold);
        }
        (acc, skipped)
    };

    const CHUNK: u64 = 1 << 15;
    let (mut acc, skipped) = if count <= CHUNK {
        sweep_range(0, count)
    } else {
        let chunks: Vec<(u64, u64)> = (0..count)
            .step_by(CHUNK as usize)
            .map(|s| (s, (s + CHUNK).min(count)))
            .collect();
        let partials: Vec<(Vec<f64>, u64)> = chunks
            .into_par_iter()
            .map(|(s, e)| sweep_range(s, e))
            .collect();
        let mut acc = vec![fold.init(); npts];
        let mut skipped = 0u64;
        for (part, sk) in partials {
            for (a, v) in acc.iter_mut().zip(part) {
                *a = fold.apply(*a, v);
            }
            skipped += sk;
        }
        (acc, skipped)
    };
    for (a, v) in acc.iter_mut().zip(init) {
        *a = fold.apply(*a, v);
    }
    (acc, skipped)
}

fn check_tuple(h: &HomogeneousFn, a: &[Element]) -> Result<()> {
    if a.len() != h.arity() {
        return Err(Error::ArityMismatch {
            name: h.name().to_string(),
            expected: h.arity(),
            got: a.len(),
        });
    }
    for e in &a[1..] {
        if !e.same_lattice(&a[0]) {
            return Err(Error::LatticeMismatch(
                "all elements must live on one grid".into(),
            ));
        }
    }
    Ok(())
}

fn check_nonnegative(a: &[Element]) -> Result<()> {
    for (k, e) in a.iter().enumerate() {
        if !e.is_nonnegative() {
            return Err(Error::NegativeInput(format!(
                "argument {k} has a negative value; positive elements are required"
            )));
        }
    }
    Ok(())
}

fn fold_for(h: &HomogeneousFn) -> Result<Fold> {
    match h.curvature() {
        Curvature::ConvexOnPositiveOrthant => Ok(Fold::Sup),
        Curvature::ConcaveOnPositiveOrthant => Ok(Fold::Inf),
        other => Err(Error::CurvatureUnmet(format!(
            "{} is tagged {other:?}; a convex or concave certification is required",
            h.name()
        ))),
    }
}

/// The oracle: applies `h` value by value over the grid. Exact, because
/// point evaluations are lattice homomorphisms that separate points.
pub fn pointwise_apply(h: &HomogeneousFn, a: &[Element]) -> Result<Element> {
    check_tuple(h, a)?;
    let npts = a[0].values().len();
    let mut args = vec![0.0; a.len()];
    let mut out = Vec::with_capacity(npts);
    for p in 0..npts {
        for (slot, e) in args.iter_mut().zip(a) {
            *slot = e.values()[p];
        }
        out.push(h.eval(&args));
    }
    Element::new(a[0].lattice().clone(), out)
}

/// Supporting-hyperplane evaluation: the pointwise extremum of
/// `grad h(c) . a` over the sampled differentiability set at the given
/// density (the image of the level-`density` dyadic grid). Requires a convex
/// or concave curvature tag and nonnegative inputs. For convex `h` the
/// result is `<=` the oracle pointwise, converging to it as the density
/// grows; symmetrically for concave `h`.
pub fn support_formula(h: &HomogeneousFn, a: &[Element], density: u32) -> Result<Element> {
    let mut out = support_formula_batch(h, std::slice::from_ref(&a.to_vec()), density)?;
    Ok(out.pop().expect("one query in, one element out"))
}

/// [`support_formula`] over many argument tuples at once. Each sampled
/// weight is computed once and applied to every tuple, so a batch costs far
/// less than separate calls at high density; the results are identical bit
/// for bit.
pub fn support_formula_batch(
    h: &HomogeneousFn,
    tuples: &[Vec<Element>],
    density: u32,
) -> Result<Vec<Element>> {
    let fold = fold_for(h)?;
    if tuples.is_empty() {
        return Err(Error::InvalidParameter("no argument tuples given".into()));
    }
    for a in tuples {
        check_tuple(h, a)?;
        check_nonnegative(a)?;
    }
    if h.arity() < 2 {
        return Err(Error::InvalidParameter("arity must be >= 2".into()));
    }
    if density < 1 {
        return Err(Error::InvalidParameter("density must be >= 1".into()));
    }
    let grid = dyadic_grid(h.arity(), density)?;
    if grid.len() > MAX_SWEEP_TUPLES {
        return Err(Error::GridTooLarge(format!(
            "{} angle tuples exceed the 2^24 sweep budget",
            grid.len()
        )));
    }
    // stack the queries: coordinate k of every tuple, concatenated
    let m = h.arity();
    let mut stacked: Vec<Vec<f64>> = vec![Vec::new(); m];
    for a in tuples {
        for (k, e) in a.iter().enumerate() {
            stacked[k].extend_from_slice(e.values());
        }
    }
    let views: Vec<&[f64]> = stacked.iter().map(|v| v.as_slice()).collect();
    let total = views[0].len();
    let (acc, skipped) = weight_sweep(h, &views, density, false, fold, vec![fold.init(); total]);
    if skipped == grid.len() {
        return Err(Error::TooManySkips {
            skipped,
            total: grid.len(),
        });
    }
    let mut out = Vec::with_capacity(tuples.len());
    let mut offset = 0;
    for a in tuples {
        let npts = a[0].values().len();
        out.push(Element::new(
            a[0].lattice().clone(),
            acc[offset..offset + npts].to_vec(),
        )?);
        offset += npts;
    }
    Ok(out)
}

/// The dyadic approximation record: the elements `sigma_1, ..., sigma_N`,
/// their sup-norm distances to the oracle, and bookkeeping per level.
#[derive(Debug, Clone)]
pub struct SigmaTrace {
    pub sequence: Vec<Element>,
    /// Sup-norm distance to the pointwise oracle, per level.
    pub errors: Vec<f64>,
    /// Whether the sequence is pointwise monotone toward the oracle
    /// (nondecreasing for convex, nonincreasing for concave).
    pub monotone: bool,
    /// Angle tuples enumerated per level (`2^(n(m-1))`).
    pub grid_sizes: Vec<u64>,
    /// Cumulative nondifferentiable tuples skipped, per level.
    pub skipped: Vec<u64>,
    /// Wall-clock time per level, informative only.
    pub wall_ms: Vec<f64>,
}

impl SigmaTrace {
    /// `n,grid_size,sup_error,wall_ms` rows for convergence tables.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,grid_size,sup_error,wall_ms\n");
        for (i, e) in self.errors.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{:.3}\n",
                i + 1,
                self.grid_sizes[i],
                e,
                self.wall_ms[i]
            ));
        }
        out
    }
}

/// Runs the dyadic approximation through `levels` levels. The grids are
/// nested, so each level only sweeps the new tuples and folds them into the
/// previous accumulator; the resulting sequence is monotone by construction.
/// Nondifferentiable sample points are skipped and counted; a skip fraction
/// above one half aborts.
pub fn sigma_sequence(h: &HomogeneousFn, a: &[Element], levels: u32) -> Result<SigmaTrace> {
    let fold = fold_for(h)?;
    check_tuple(h, a)?;
    check_nonnegative(a)?;
    if h.arity() < 2 {
        return Err(Error::InvalidParameter("arity must be >= 2".into()));
    }
    if levels < 1 {
        return Err(Error::InvalidParameter("levels must be >= 1".into()));
    }
    let top = dyadic_grid(h.arity(), levels)?;
    if top.len() > MAX_SWEEP_TUPLES {
        return Err(Error::GridTooLarge(format!(
            "{} angle tuples at level {levels} exceed the 2^24 sweep budget",
            top.len()
        )));
    }

    let oracle = pointwise_apply(h, a)?;
    let values: Vec<&[f64]> = a.iter().map(|e| e.values()).collect();
    let npts = values[0].len();

    let mut acc = vec![fold.init(); npts];
    let mut skipped_total = 0u64;
    let mut trace = SigmaTrace {
        sequence: Vec::with_capacity(levels as usize),
        errors: Vec::with_capacity(levels as usize),
        monotone: true,
        grid_sizes: Vec::with_capacity(levels as usize),
        skipped: Vec::with_capacity(levels as usize),
        wall_ms: Vec::with_capacity(levels as usize),
    };
    for n in 1..=levels {
        let t0 = Instant::now();
        let (next, new_skips) = weight_sweep(h, &values, n, n > 1, fold, acc);
        acc = next;
        skipped_total += new_skips;
        let total = dyadic_grid(h.arity(), n)?.len();
        if skipped_total * 2 > total {
            return Err(Error::TooManySkips {
                skipped: skipped_total,
                total,
            });
        }
        let sigma = Element::new(a[0].lattice().clone(), acc.clone())?;
        let err = sigma.sup_distance(&oracle)?;
        if let Some(prev) = trace.sequence.last() {
            let ok = match fold {
                Fold::Sup => prev.le_pointwise(&sigma)?,
                Fold::Inf => sigma.le_pointwise(prev)?,
            };
            trace.monotone &= ok;
        }
        trace.sequence.push(sigma);
        trace.errors.push(err);
        trace.grid_sizes.push(total);
        trace.skipped.push(skipped_total);
        trace.wall_ms.push(t0.elapsed().as_secs_f64() * 1e3);
    }
    Ok(trace)
}

fn check_pair(f: &Element, g: &Element) -> Result<()> {
    if !f.same_lattice(g) {
        return Err(Error::LatticeMismatch(
            "both elements must live on one grid".into(),
        ));
    }
    Ok(())
}

/// `sup { f cos t + g sin t }` over `K` angles uniform on `[0, 2pi)`.
/// Converges to `sqrt(f^2 + g^2)` pointwise with relative error at most
/// `1 - cos(pi/K)`. Signed inputs are fine; the full circle makes the
/// result depend only on `|f|, |g|`.
pub fn boxplus(f: &Element, g: &Element, k: usize) -> Result<Element> {
    check_pair(f, g)?;
    if k < 4 {
        return Err(Error::InvalidParameter("need at least 4 angle samples".into()));
    }
    let table: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / k as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let values: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(fp, gp)| {
            table
                .iter()
                .fold(f64::NEG_INFINITY, |m, (c, s)| m.max(fp * c + gp * s))
        })
        .collect();
    Element::new(f.lattice().clone(), values)
}

/// The modulus of `f + ig`: identical to [`boxplus`].
pub fn complex_modulus(f: &Element, g: &Element, k: usize) -> Result<Element> {
    boxplus(f, g, k)
}

/// A grid infimum together with the points where the infimum is a limit not
/// attained on any finite grid (a vanishing coordinate forces the value 0 as
/// the weights run off to the boundary; the exact limit is substituted).
#[derive(Debug, Clone)]
pub struct GridInf {
    pub value: Element,
    pub unattained: Vec<usize>,
}

fn log_space(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    if k == 1 || llo == lhi {
        return vec![lo];
    }
    (0..k)
        .map(|i| (llo + (lhi - llo) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

const THETA_CLIP: (f64, f64) = (1e-6, 1e6);

/// `1/2 inf { t f + g / t : t > 0 }` over `K` log-spaced weights, pointwise
/// `sqrt(f g)`. Requires `f, g >= 0`. The weight range is derived from the
/// data: `[sqrt(min g/f)/10, sqrt(max g/f)*10]` over points with `f > 0`,
/// clipped to `[1e-6, 1e6]`. At points where `f` or `g` vanishes the true
/// infimum 0 is substituted directly and the point is reported as
/// unattained.
pub fn boxtimes(f: &Element, g: &Element, k: usize) -> Result<GridInf> {
    check_pair(f, g)?;
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Err(Error::NegativeInput(
            "boxtimes is defined for nonnegative elements".into(),
        ));
    }
    if k < 4 {
        return Err(Error::InvalidParameter("need at least 4 weight samples".into()));
    }
    let mut rmin = f64::INFINITY;
    let mut rmax = f64::NEG_INFINITY;
    for (fp, gp) in f.values().iter().zip(g.values()) {
        if *fp > 0.0 {
            let r = gp / fp;
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
    }
    let thetas = if rmin.is_finite() {
        let lo = (rmin.sqrt() / 10.0).clamp(THETA_CLIP.0, THETA_CLIP.1);
        let hi = (rmax.sqrt() * 10.0).clamp(THETA_CLIP.0, THETA_CLIP.1);
        log_space(lo, hi.max(lo), k)
    } else {
        Vec::new()
    };
    let mut unattained = Vec::new();
    let mut values = Vec::with_capacity(f.values().len());
    for (p, (fp, gp)) in f.values().iter().zip(g.values()).enumerate() {
        if *fp == 0.0 || *gp == 0.0 {
            unattained.push(p);
            values.push(0.0);
        } else {
            let v = thetas
                .iter()
                .fold(f64::INFINITY, |m, t| m.min(0.5 * (t * fp + gp / t)));
            values.push(v);
        }
    }
    Ok(GridInf {
        value: Element::new(f.lattice().clone(), values)?,
        unattained,
    })
}

/// `inf { t_1 a_1 + ... + t_m a_m : t_k > 0, t_1 ... t_m = 1 }` over a log
/// grid with `K` samples per free coordinate (`t_m` is the reciprocal of the
/// others' product). Converges to `m (prod a_k)^(1/m)` pointwise. Vanishing
/// coordinates are substituted with the exact limit 0 and reported as
/// unattained.
pub fn product_one_inf(a: &[Element], k: usize) -> Result<GridInf> {
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "the product-one infimum needs at least two elements".into(),
        ));
    }
    for e in &a[1..] {
        check_pair(&a[0], e)?;
    }
    check_nonnegative(a)?;
    if k < 4 {
        return Err(Error::InvalidParameter("need at least 4 weight samples".into()));
    }
    let m = a.len();
    let npts = a[0].values().len();

    // optimal weights per point are geo(p)/a_k(p); pad their observed range
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); m - 1];
    let mut any_valid = false;
    for p in 0..npts {
        let vals: Vec<f64> = a.iter().map(|e| e.values()[p]).collect();
        if vals.contains(&0.0) {
            continue;
        }
        any_valid = true;
        let geo = vals.iter().map(|v| v.ln()).sum::<f64>().exp().powf(1.0 / m as f64);
        for (kk, r) in ranges.iter_mut().enumerate() {
            let t = geo / vals[kk];
            r.0 = r.0.min(t);
            r.1 = r.1.max(t);
        }
    }
    let grids: Vec<Vec<f64>> = if any_valid {
        ranges
            .iter()
            .map(|(lo, hi)| {
                let lo = (lo / 10.0).clamp(THETA_CLIP.0, THETA_CLIP.1);
                let hi = (hi * 10.0).clamp(THETA_CLIP.0, THETA_CLIP.1);
                log_space(lo, hi.max(lo), k)
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut values = vec![f64::INFINITY; npts];
    let mut unattained = Vec::new();
    let mut zero_mask = vec![false; npts];
    for p in 0..npts {
        if a.iter().any(|e| e.values()[p] == 0.0) {
            values[p] = 0.0;
            zero_mask[p] = true;
            unattained.push(p);
        }
    }
    if any_valid {
        let tuple_count = grids.iter().map(|g| g.len()).product::<usize>();
        let mut weights = vec![0.0; m];
        for idx in 0..tuple_count {
            let mut rem = idx;
            let mut prod = 1.0;
            for j in (0..m - 1).rev() {
                let g = &grids[j];
                weights[j] = g[rem % g.len()];
                rem /= g.len();
                prod *= weights[j];
            }
            weights[m - 1] = 1.0 / prod;
            for p in 0..npts {
                if zero_mask[p] {
                    continue;
                }
                let v: f64 = weights
                    .iter()
                    .zip(a)
                    .map(|(w, e)| w * e.values()[p])
                    .sum();
                values[p] = values[p].min(v);
            }
        }
    }
    Ok(GridInf {
        value: Element::new(a[0].lattice().clone(), values)?,
        unattained,
    })
}
