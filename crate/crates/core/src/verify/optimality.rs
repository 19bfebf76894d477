//! Fermat-type certificates, subdifferential inclusions at minimizers, and
//! the sum-conjugate / infimal-convolution inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errorfn::ErrorFunction;
use crate::extreal::{add_ext, sub_ext, ExtReal};
use crate::funcmodel::{Grid, SampledFunction};
use crate::report::{ProbeMode, ViolationReport, INEQUALITY_TOL, STRUCTURAL_TOL};
use crate::subdiff::{e_subdiff_interval, SubdiffInterval};
use crate::transform::e_conjugate_at;

use super::econvex::{check_e_convex_def, TMode};

/// A grid local minimum is minimal among the nodes within this many steps.
pub const LOCAL_WINDOW: usize = 5;

fn node(f: &SampledFunction, x: f64) -> Result<usize> {
    let i = f.grid().node_index(x).ok_or(Error::OffGrid(x))?;
    if !f.value(i).is_finite() {
        return Err(Error::InvalidFunction(format!("f({x}) is not finite")));
    }
    Ok(i)
}

/// Whether node `i` is minimal among nodes `i ± window`.
pub fn is_local_min(f: &SampledFunction, i: usize, window: usize) -> bool {
    let lo = i.saturating_sub(window);
    let hi = (i + window).min(f.len() - 1);
    (lo..=hi).all(|j| f.value(j) >= f.value(i))
}

fn is_global_min(f: &SampledFunction, i: usize) -> bool {
    f.values().iter().all(|v| *v >= f.value(i))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalCertificate {
    /// `0 ∈ ∂ᵉf(x₀)`
    pub certified: bool,
    pub is_grid_argmin: bool,
    pub interval: SubdiffInterval,
}

/// The necessary condition `0 ∈ ∂ᵉf(x₀)` for a global minimum at `x₀`.
pub fn certify_global_min(f: &SampledFunction, e: &ErrorFunction, x0: f64) -> Result<GlobalCertificate> {
    let i = node(f, x0)?;
    let interval = e_subdiff_interval(f, e, f.point(i))?;
    Ok(GlobalCertificate {
        certified: interval.contains(0.0),
        is_grid_argmin: is_global_min(f, i),
        interval,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCertificate {
    /// `0 ∈ ∂²ᵉf(x₀)`
    pub certified: bool,
    pub is_local_min: bool,
    pub interval: SubdiffInterval,
}

/// The necessary condition `0 ∈ ∂²ᵉf(x₀)` for a local minimum at `x₀`.
/// Requires `e(x₀, x₀) = 0` and `e(·, x₀)` convex on the grid.
pub fn certify_local_min(f: &SampledFunction, e: &ErrorFunction, x0: f64) -> Result<LocalCertificate> {
    let i = node(f, x0)?;
    let x0 = f.point(i);
    check_kernel_at(f.grid(), e, x0)?;
    let interval = e_subdiff_interval(f, &e.doubled(), x0)?;
    Ok(LocalCertificate {
        certified: interval.contains(0.0),
        is_local_min: is_local_min(f, i, LOCAL_WINDOW),
        interval,
    })
}

fn check_kernel_at(grid: &Grid, e: &ErrorFunction, x0: f64) -> Result<()> {
    let d = e.eval(x0, x0)?;
    if !(d.is_finite() && d.value().abs() <= STRUCTURAL_TOL) {
        return Err(Error::AnchorPrecondition(x0, d.value()));
    }
    if let Some([a, _, c]) = e.slice(grid, x0)?.convexity_violation(STRUCTURAL_TOL) {
        return Err(Error::KernelPrecondition(format!(
            "e(·, {x0}) is not convex between {} and {}",
            grid.points()[a],
            grid.points()[c]
        )));
    }
    Ok(())
}

/// Minimality required of `f − g` at `x₀`, and the matching kernel factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inclusion {
    /// Global minimum; `∂ᵉg(x₀) ⊆ ∂ᵉf(x₀)`.
    Global,
    /// Local minimum; `∂ᵉg(x₀) ⊆ ∂²ᵉf(x₀)`.
    Local,
}

impl Inclusion {
    pub fn factor(self) -> f64 {
        match self {
            Inclusion::Global => 1.0,
            Inclusion::Local => 2.0,
        }
    }
}

fn require_e_convex(name: &str, f: &SampledFunction, e: &ErrorFunction) -> Result<()> {
    let r = check_e_convex_def(f, e, &TMode::AllNodeTriples)?;
    if r.passes(INEQUALITY_TOL) {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(format!(
            "{name} is not e-convex on the grid (violation {} at {:?})",
            r.max_violation, r.witness
        )))
    }
}

/// Endpoint gaps of `∂ᵉg(x₀) ⊆ ∂^{factor·e}f(x₀)`: witness
/// `[x₀, g-endpoint, f-endpoint]`. Requires `f − g` minimal at `x₀` and
/// both functions e-convex on the grid.
pub fn check_subdiff_inclusion(
    f: &SampledFunction,
    g: &SampledFunction,
    e: &ErrorFunction,
    x0: f64,
    kind: Inclusion,
) -> Result<ViolationReport> {
    let i = node(f, x0)?;
    let x0 = f.point(i);
    let diff = f.zip_with(g, |a, b| if b.is_finite() { a - b.value() } else { ExtReal::POS_INF })?;
    let minimal = match kind {
        Inclusion::Global => is_global_min(&diff, i),
        Inclusion::Local => is_local_min(&diff, i, LOCAL_WINDOW),
    };
    if !diff.value(i).is_finite() || !minimal {
        return Err(Error::HypothesisViolated(format!("f − g is not minimal at {x0}")));
    }
    require_e_convex("f", f, e)?;
    require_e_convex("g", g, e)?;

    let ig = e_subdiff_interval(g, e, x0)?;
    let kernel = e.clone().scaled(kind.factor())?;
    let if_ = e_subdiff_interval(f, &kernel, x0)?;
    let mut r = ViolationReport::new(ProbeMode::Exhaustive);
    if ig.empty {
        r.record(ExtReal::NEG_INF, &[x0]);
        return Ok(r);
    }
    r.record(sub_ext(if_.lower, ig.lower), &[x0, ig.lower.value(), if_.lower.value()]);
    r.record(sub_ext(ig.upper, if_.upper), &[x0, ig.upper.value(), if_.upper.value()]);
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfConvReport {
    /// `(f + g)*_{e+e′, y}(x*)`
    pub lhs: ExtReal,
    /// `min f*ₑ,ᵧ(x₁*) + g*ₑ′,ᵧ(x* − x₁*)` over dual nodes `x₁*`.
    pub rhs: ExtReal,
    /// Minimizing `x₁*`.
    pub split: Option<f64>,
    /// `y` is a grid local minimum of `f + g − x*·`.
    pub hypothesis_holds: bool,
    pub resolution: f64,
    pub equality_flag: bool,
}

/// The inequality `(f + g)*_{e+e′,y}(x*) ≤ (f*ₑ,ᵧ □ g*ₑ′,ᵧ)(x*)`, with the
/// second conjugate of each split evaluated directly at `x* − x₁*`.
#[allow(clippy::too_many_arguments)]
pub fn check_sum_conjugate_infconv(
    f: &SampledFunction,
    g: &SampledFunction,
    e: &ErrorFunction,
    e_prime: &ErrorFunction,
    y: f64,
    xstar: f64,
    dual_grid: &Grid,
) -> Result<InfConvReport> {
    require_e_convex("f", f, e)?;
    require_e_convex("g", g, e_prime)?;
    let sum = f.add(g)?;
    let kernel = e.clone().sum(e_prime.clone());
    let lhs = e_conjugate_at(&sum, &kernel, y, xstar)?;

    let mut rhs = ExtReal::POS_INF;
    let mut split = None;
    for &s1 in dual_grid.points() {
        let v = add_ext(e_conjugate_at(f, e, y, s1)?, e_conjugate_at(g, e_prime, y, xstar - s1)?);
        if split.is_none() || v < rhs {
            rhs = v;
            split = Some(s1);
        }
    }

    let hypothesis_holds = match sum.grid().node_index(y) {
        Some(i) => {
            let tilted = sum.map(|x, v| v - xstar * x)?;
            tilted.value(i).is_finite() && is_local_min(&tilted, i, LOCAL_WINDOW)
        }
        None => false,
    };
    let reach = f.grid().first().abs().max(f.grid().last().abs());
    let step = dual_grid.step().unwrap_or_else(|| dual_grid.min_gap());
    let resolution = step * reach;
    let close = match (lhs.finite(), rhs.finite()) {
        (Some(a), Some(b)) => (a - b).abs() <= resolution,
        _ => lhs == rhs,
    };
    Ok(InfConvReport {
        lhs,
        rhs,
        split,
        hypothesis_holds,
        resolution,
        equality_flag: close && hypothesis_holds,
    })
}
