//! Discrete (e,y)-conjugates `f*ₑ,ᵧ(s) = maxᵢ s xᵢ − f(xᵢ) − e(xᵢ, y)`,
//! biconjugates, infimal convolutions and affine minorants.
//!
//! The (e,y)-conjugate is the classical conjugate of `g = f + e(·, y)`, so the
//! fast route runs the classical linear-time transform on `g`. Because the
//! discrete max only ever sees the lower convex hull of the finite points of
//! `g`, the fast route is exact on nonconvex data as well.

mod hull;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errorfn::ErrorFunction;
use crate::extreal::ExtReal;
use crate::funcmodel::{Grid, GridSummary, SampledFunction};

pub(crate) use hull::{brute_sup, sweep_sup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Brute,
    Fast,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Algorithm::Brute),
            "fast" => Ok(Algorithm::Fast),
            _ => Err(Error::Parse(format!("unknown algorithm `{s}`"))),
        }
    }
}

/// Values of `f*ₑ,ᵧ` on a grid of slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateTable {
    pub dual_grid: Grid,
    pub values: Vec<ExtReal>,
    pub anchor_y: f64,
    pub algorithm: Algorithm,
    pub primal_grid: GridSummary,
}

impl ConjugateTable {
    /// False when no primal node had `f(x) + e(x, y)` finite; every value
    /// is then `−∞`.
    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// The table as a function of the slope (requires a proper table).
    pub fn as_sampled(&self) -> Result<SampledFunction> {
        if !self.is_proper() {
            return Err(Error::ImproperConjugate);
        }
        SampledFunction::new(self.dual_grid.clone(), self.values.clone())
    }

    /// Classical conjugate of the table at `x`: `maxⱼ sⱼ x − f*(sⱼ)`.
    pub fn conjugate_at(&self, x: f64) -> ExtReal {
        let zeros = vec![ExtReal::ZERO; self.values.len()];
        brute_sup(self.dual_grid.points(), &self.values, &zeros, x)
    }

    /// Max absolute difference to another table on the same dual grid.
    pub fn max_abs_diff(&self, other: &ConjugateTable) -> ExtReal {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                if a == b {
                    ExtReal::ZERO
                } else if a.is_finite() && b.is_finite() {
                    ExtReal::of((a.value() - b.value()).abs())
                } else {
                    ExtReal::POS_INF
                }
            })
            .max()
            .unwrap_or(ExtReal::ZERO)
    }
}

/// Node data `(x, f(x), e(x, y))` for a proper `f`.
fn node_terms(f: &SampledFunction, e: &ErrorFunction, y: f64) -> Result<Vec<ExtReal>> {
    if !f.is_proper() {
        return Err(Error::ImproperPrimal);
    }
    f.grid().points().iter().map(|&x| e.eval(x, y)).collect()
}

fn table(f: &SampledFunction, y: f64, dual: &Grid, values: Vec<ExtReal>, algorithm: Algorithm) -> ConjugateTable {
    ConjugateTable {
        dual_grid: dual.clone(),
        values,
        anchor_y: y,
        algorithm,
        primal_grid: f.grid().summary(),
    }
}

/// `f*ₑ,ᵧ` at every dual node by enumerating all primal nodes.
pub fn e_conjugate_brute(f: &SampledFunction, e: &ErrorFunction, y: f64, dual_grid: &Grid) -> Result<ConjugateTable> {
    let es = node_terms(f, e, y)?;
    let x = f.grid().points();
    let values = dual_grid
        .points()
        .par_iter()
        .map(|&s| brute_sup(x, f.values(), &es, s))
        .collect();
    Ok(table(f, y, dual_grid, values, Algorithm::Brute))
}

/// `f*ₑ,ᵧ` at every dual node in `O(n + m)` from the lower hull of
/// `(xᵢ, f(xᵢ) + e(xᵢ, y))`.
pub fn e_conjugate_fast(f: &SampledFunction, e: &ErrorFunction, y: f64, dual_grid: &Grid) -> Result<ConjugateTable> {
    let es = node_terms(f, e, y)?;
    let values = sweep_sup(f.grid().points(), f.values(), &es, dual_grid.points());
    Ok(table(f, y, dual_grid, values, Algorithm::Fast))
}

pub fn e_conjugate(
    f: &SampledFunction,
    e: &ErrorFunction,
    y: f64,
    dual_grid: &Grid,
    algorithm: Algorithm,
) -> Result<ConjugateTable> {
    match algorithm {
        Algorithm::Brute => e_conjugate_brute(f, e, y, dual_grid),
        Algorithm::Fast => e_conjugate_fast(f, e, y, dual_grid),
    }
}

/// `f*ₑ,ᵧ(s)` at a single slope, not snapped to any dual grid.
pub fn e_conjugate_at(f: &SampledFunction, e: &ErrorFunction, y: f64, s: f64) -> Result<ExtReal> {
    let es = node_terms(f, e, y)?;
    Ok(brute_sup(f.grid().points(), f.values(), &es, s))
}

/// Slope range of the consecutive finite differences of `f + e(·, y)`,
/// padded by 10% on each side, with `n + 1` nodes.
pub fn default_dual_grid(f: &SampledFunction, e: &ErrorFunction, y: f64) -> Result<Grid> {
    let es = node_terms(f, e, y)?;
    let x = f.grid().points();
    let pts: Vec<(f64, f64)> = (0..x.len())
        .filter(|&i| f.value(i).is_finite() && es[i].is_finite())
        .map(|i| (x[i], f.value(i).value() + es[i].value()))
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for w in pts.windows(2) {
        let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if !lo.is_finite() {
        // a single finite node: every slope is active
        lo = -1.0;
        hi = 1.0;
    }
    let pad = if hi > lo { 0.1 * (hi - lo) } else { 0.1 * lo.abs().max(1.0) };
    Grid::uniform(lo - pad, hi + pad, x.len() + 1)
}

/// `f**ₑ,ᵧ(x) = maxⱼ sⱼ x − f*ₑ,ᵧ(sⱼ)` at every node of `out_grid`; the
/// second transform is the classical one.
pub fn e_biconjugate(
    f: &SampledFunction,
    e: &ErrorFunction,
    y: f64,
    dual_grid: &Grid,
    out_grid: &Grid,
) -> Result<SampledFunction> {
    e_biconjugate_with(f, e, y, dual_grid, out_grid, Algorithm::Brute)
}

pub fn e_biconjugate_with(
    f: &SampledFunction,
    e: &ErrorFunction,
    y: f64,
    dual_grid: &Grid,
    out_grid: &Grid,
    algorithm: Algorithm,
) -> Result<SampledFunction> {
    let t = e_conjugate(f, e, y, dual_grid, algorithm)?;
    biconjugate_of(&t, out_grid, algorithm)
}

/// Classical conjugate of a conjugate table on `out_grid`.
pub fn biconjugate_of(t: &ConjugateTable, out_grid: &Grid, algorithm: Algorithm) -> Result<SampledFunction> {
    if !t.is_proper() {
        return Err(Error::ImproperConjugate);
    }
    let s = t.dual_grid.points();
    let zeros = vec![ExtReal::ZERO; s.len()];
    let values = match algorithm {
        Algorithm::Brute => out_grid
            .points()
            .par_iter()
            .map(|&x| brute_sup(s, &t.values, &zeros, x))
            .collect(),
        Algorithm::Fast => sweep_sup(s, &t.values, &zeros, out_grid.points()),
    };
    SampledFunction::new(out_grid.clone(), values)
}

/// Absolute tolerance for matching `x = x₁ + x₂` against grid nodes.
pub const SPLIT_TOL: f64 = 1e-9;

/// `(f □ g)(x) = min f(x₁) + g(x₂)` over node splits `x₁ + x₂ = x`;
/// `+∞` where no split has both values finite.
pub fn inf_convolution(f: &SampledFunction, g: &SampledFunction, out_grid: &Grid) -> Result<SampledFunction> {
    if !(f.is_proper() && g.is_proper()) {
        return Err(Error::ImproperInput);
    }
    let fx = f.grid().points();
    let values = out_grid
        .points()
        .par_iter()
        .map(|&x| {
            let mut best = ExtReal::POS_INF;
            for i in f.domain() {
                if let Some(j) = g.grid().node_index_tol(x - fx[i], SPLIT_TOL) {
                    if g.value(j).is_finite() {
                        best = best.min(f.value(i) + g.value(j));
                    }
                }
            }
            best
        })
        .collect();
    SampledFunction::new(out_grid.clone(), values)
}

/// An affine map `x ↦ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMinorant {
    pub slope: f64,
    pub intercept: f64,
}

/// The affine minorant `s₀ x − f*ₑ,ᵧ(s₀)` of `f + e(·, y)`, with `s₀` the
/// dual node minimizing the conjugate (first one on ties).
pub fn affine_minorant(f: &SampledFunction, e: &ErrorFunction, y: f64, dual_grid: &Grid) -> Result<AffineMinorant> {
    let t = e_conjugate_brute(f, e, y, dual_grid)?;
    let (j, v) = t
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .reduce(|best, cur| if cur.1 < best.1 { cur } else { best })
        .ok_or(Error::NoAffineMinorant)?;
    Ok(AffineMinorant {
        slope: dual_grid.points()[j],
        intercept: -v.value(),
    })
}
