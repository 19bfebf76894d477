//! e-subdifferentials on grids and point clouds, upper Dini derivatives, and
//! e-monotonicity of sampled operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errorfn::ErrorFunction;
use crate::extreal::{add_ext, ExtReal};
use crate::funcmodel::{RealFunction, SampledFunction};
use crate::report::{ProbeMode, ViolationReport};

/// `∂ᵉf(x)` in one dimension: the slopes `s` with
/// `s (y − x) ≤ f(y) − f(x) + e(x, y)` at every grid node `y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdiffInterval {
    pub lower: ExtReal,
    pub upper: ExtReal,
    pub empty: bool,
}

impl SubdiffInterval {
    pub const EMPTY: SubdiffInterval = SubdiffInterval {
        lower: ExtReal::POS_INF,
        upper: ExtReal::NEG_INF,
        empty: true,
    };

    fn from_bounds(lower: ExtReal, upper: ExtReal) -> Self {
        let empty = match (lower.finite(), upper.finite()) {
            (Some(a), Some(b)) => a - b > rounding_slack(&[a, b]),
            _ => lower > upper,
        };
        SubdiffInterval { lower, upper, empty }
    }

    /// Membership up to rounding of the endpoint quotients.
    pub fn contains(&self, s: f64) -> bool {
        let mut mags = vec![s];
        mags.extend(self.lower.finite());
        mags.extend(self.upper.finite());
        self.contains_tol(s, rounding_slack(&mags))
    }

    /// Membership with slack `tol` on both endpoints.
    pub fn contains_tol(&self, s: f64, tol: f64) -> bool {
        !self.empty && self.lower <= ExtReal::of(s + tol) && ExtReal::of(s - tol) <= self.upper
    }

    /// Midpoint when both endpoints are finite.
    pub fn midpoint(&self) -> Option<f64> {
        match (self.lower.finite(), self.upper.finite()) {
            (Some(a), Some(b)) if !self.empty => Some(0.5 * (a + b)),
            _ => None,
        }
    }
}

/// Relative tolerance separating a degenerate interval `[s, s]` whose
/// endpoint quotients were rounded apart from a genuinely empty one.
pub const ENDPOINT_TOL: f64 = 1e-12;

fn rounding_slack(mags: &[f64]) -> f64 {
    ENDPOINT_TOL * mags.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Quotient `(f(y) − f(x) + e(x, y)) / (y − x)`. `+∞` numerators give a
/// vacuous bound on the matching side (`+∞` above, `−∞` below).
fn quotient(fx: f64, fy: ExtReal, exy: ExtReal, x: f64, y: f64) -> ExtReal {
    add_ext(fy - fx, exy).div(y - x)
}

/// `∂ᵉf(x)` at the grid node `x`. Empty when `f(x) = +∞`.
pub fn e_subdiff_interval(f: &SampledFunction, e: &ErrorFunction, x: f64) -> Result<SubdiffInterval> {
    let i = f.grid().node_index(x).ok_or(Error::OffGrid(x))?;
    let xi = f.point(i);
    let Some(fx) = f.value(i).finite() else {
        return Ok(SubdiffInterval::EMPTY);
    };
    let mut lower = ExtReal::NEG_INF;
    let mut upper = ExtReal::POS_INF;
    for (j, &y) in f.grid().points().iter().enumerate() {
        if j == i {
            continue;
        }
        let q = quotient(fx, f.value(j), e.eval(xi, y)?, xi, y);
        if j > i {
            upper = upper.min(q);
        } else {
            lower = lower.max(q);
        }
    }
    Ok(SubdiffInterval::from_bounds(lower, upper))
}

/// `∂²ᵉf(x)`, the subdifferential for the doubled kernel.
pub fn e2_subdiff_interval(f: &SampledFunction, e: &ErrorFunction, x: f64) -> Result<SubdiffInterval> {
    e_subdiff_interval(f, &e.doubled(), x)
}

/// Finite samples of a function on points of `ℝᵈ`, with the kernel given
/// as a matrix over sample indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<ExtReal>,
    pub kernel: Vec<Vec<ExtReal>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<ExtReal>, kernel: Vec<Vec<ExtReal>>) -> Result<Self> {
        let n = points.len();
        if values.len() != n || kernel.len() != n || kernel.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidFunction("point cloud sizes disagree".into()));
        }
        if values.iter().any(|v| v.is_neg_inf()) {
            return Err(Error::InvalidFunction("value −∞".into()));
        }
        Ok(PointCloud { points, values, kernel })
    }

    /// A cloud whose kernel is evaluated from a one-dimensional error function.
    pub fn from_sampled(f: &SampledFunction, e: &ErrorFunction) -> Result<Self> {
        let x = f.grid().points();
        let kernel = x
            .iter()
            .map(|&a| x.iter().map(|&b| e.eval(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        PointCloud::new(x.iter().map(|&v| vec![v]).collect(), f.values().to_vec(), kernel)
    }

    pub fn index_of(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == x)
    }
}

/// Whether `⟨y − x, x*⟩ ≤ f(y) − f(x) + e(x, y)` holds at every sample `y`,
/// up to the same relative rounding slack as [`SubdiffInterval::contains`].
pub fn e_subdiff_membership(cloud: &PointCloud, x: &[f64], xstar: &[f64]) -> Result<bool> {
    let i = cloud.index_of(x).ok_or(Error::UnknownBasePoint)?;
    let Some(fx) = cloud.values[i].finite() else {
        return Ok(false);
    };
    Ok(cloud.points.iter().enumerate().all(|(j, y)| {
        let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let lhs = dot(&d, xstar);
        let rhs = add_ext(cloud.values[j] - fx, cloud.kernel[i][j]);
        match rhs.finite() {
            Some(r) => lhs <= r + ENDPOINT_TOL * lhs.abs().max(r.abs()).max(1.0),
            None => ExtReal::of(lhs) <= rhs,
        }
    }))
}

/// Step schedule `tₖ = 10⁻² · 2⁻ᵏ`, `k = 0..=20`.
pub fn dini_steps() -> impl Iterator<Item = f64> {
    (0..=20).map(|k| 1e-2 * 0.5f64.powi(k))
}

pub const DINI_TAIL: usize = 5;

/// Estimate of `limsup_{t↓0} (f(x + t u) − f(x)) / t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiniEstimate {
    pub value: ExtReal,
    pub quotients: Vec<(f64, ExtReal)>,
    /// The last quotients agree to within the Dini tolerance.
    pub converged: bool,
}

/// Upper Dini derivative `D̄f(x, u)`; `−∞` when `f(x) = +∞`.
pub fn dini_upper(f: &dyn RealFunction, x: f64, u: f64) -> Result<DiniEstimate> {
    let fx = f.eval(x)?;
    if !fx.is_finite() {
        return Ok(DiniEstimate {
            value: ExtReal::NEG_INF,
            quotients: Vec::new(),
            converged: true,
        });
    }
    let quotients = dini_steps()
        .map(|t| Ok((t, (f.eval(x + t * u)? - fx.value()).div(t))))
        .collect::<Result<Vec<_>>>()?;
    if quotients.iter().all(|(_, q)| q.is_pos_inf()) {
        return Err(Error::DirectionExitsDomain);
    }
    let tail = &quotients[quotients.len() - DINI_TAIL..];
    let value = tail.iter().map(|q| q.1).max().unwrap();
    let low = tail.iter().map(|q| q.1).min().unwrap();
    let converged = value.is_finite() && low.is_finite() && value.value() - low.value() <= crate::report::DINI_TOL;
    Ok(DiniEstimate { value, quotients, converged })
}

/// Samples `(x, x*)` of a one-dimensional operator.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct OperatorSample {
    pub entries: Vec<(f64, f64)>,
}

impl OperatorSample {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        for (i, a) in entries.iter().enumerate() {
            if !(a.0.is_finite() && a.1.is_finite()) {
                return Err(Error::InvalidFunction("non-finite operator entry".into()));
            }
            if entries[..i].iter().any(|b| b.0 == a.0) {
                return Err(Error::InvalidFunction(format!("repeated point {}", a.0)));
            }
        }
        Ok(OperatorSample { entries })
    }

    pub fn from_fn(points: &[f64], op: impl Fn(f64) -> f64) -> Result<Self> {
        OperatorSample::new(points.iter().map(|&x| (x, op(x))).collect())
    }
}

/// Worst `−factor · e(x, y) − ⟨x − y, x* − y*⟩` over unordered pairs of
/// entries; witness `[x, y]`.
pub fn check_e_monotone(t: &OperatorSample, e: &ErrorFunction, factor: f64) -> Result<ViolationReport> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidConstant(format!("factor {factor}")));
    }
    let mut report = ViolationReport::new(ProbeMode::Exhaustive);
    for (i, &(x, xs)) in t.entries.iter().enumerate() {
        for &(y, ys) in &t.entries[i + 1..] {
            let budget = e.eval(x, y)?.scale(factor);
            let v = -budget - (x - y) * (xs - ys);
            report.record(v, &[x, y]);
        }
    }
    Ok(report)
}
