//! Candidate functions `f: ℝ → ℝ ∪ {+∞}`: grids, sampled functions and the
//! closed-form fixture registry.
//!
//! Sampled functions are only ever evaluated at their nodes. Nothing in this
//! crate interpolates between nodes, since interpolation would convexify the
//! data and hide counterexamples.

mod fixtures;
mod grid;

pub use fixtures::{ClosedForm, REGISTRY};
pub use grid::{make_uniform_grid, Grid, GridSummary, NODE_TOL};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Something that can be evaluated pointwise.
pub trait RealFunction {
    fn eval(&self, x: f64) -> Result<ExtReal>;
}

/// Values of a function on a grid, each in `ℝ ∪ {+∞}`.
///
/// Construction does not require properness; use [`SampledFunction::is_proper`]
/// (the transforms reject improper inputs themselves).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<ExtReal>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<ExtReal>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| v.is_neg_inf()) {
            return Err(Error::InvalidFunction(format!(
                "value at index {i} is -inf"
            )));
        }
        Ok(SampledFunction { grid, values })
    }

    /// Samples a closure at every grid node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid
            .points()
            .iter()
            .map(|&x| ExtReal::new(f(x)))
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.grid.points()[i]
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    /// Node lookup; off-grid queries are errors.
    pub fn eval(&self, x: f64) -> Result<ExtReal> {
        self.grid
            .node_index(x)
            .map(|i| self.values[i])
            .ok_or(Error::OffGrid(x))
    }

    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// Indices of finite nodes.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, _)| i)
    }

    /// Whether the finite nodes form one contiguous index range.
    pub fn has_contiguous_domain(&self) -> bool {
        let mut dom = self.domain();
        let Some(first) = dom.next() else {
            return false;
        };
        let last = dom.last().unwrap_or(first);
        (first..=last).all(|i| self.values[i].is_finite())
    }

    /// Index of the smallest finite value (first one on ties).
    pub fn argmin(&self) -> Option<usize> {
        self.domain().reduce(|best, i| {
            if self.values[i] < self.values[best] {
                i
            } else {
                best
            }
        })
    }

    /// First consecutive node triple `(i−1, i, i+1)` at which the value lies
    /// above the chord of its neighbours by more than `tol·max(1, |chord|)`.
    /// On uniform grids this is the midpoint test. A `+∞` node between two
    /// finite neighbours (a gap in the domain) counts as a violation.
    pub fn convexity_violation(&self, tol: f64) -> Option<[usize; 3]> {
        let p = self.grid.points();
        (1..self.len().saturating_sub(1)).find(|&i| {
            let (l, m, r) = (self.values[i - 1], self.values[i], self.values[i + 1]);
            if !(l.is_finite() && r.is_finite()) {
                return false;
            }
            if !m.is_finite() {
                return true;
            }
            let t = (p[i + 1] - p[i]) / (p[i + 1] - p[i - 1]);
            let chord = t * l.value() + (1.0 - t) * r.value();
            m.value() - chord > tol * chord.abs().max(1.0)
        })
        .map(|i| [i - 1, i, i + 1])
        .or_else(|| {
            // finite nodes split by a run of +∞ nodes
            (!self.has_contiguous_domain() && self.is_proper()).then(|| {
                let first = self.domain().next().unwrap();
                let gap = (first..self.len()).find(|&i| !self.values[i].is_finite()).unwrap();
                let next = (gap..self.len()).find(|&i| self.values[i].is_finite()).unwrap();
                [gap - 1, gap, next]
            })
        })
    }

    /// Applies `op` to every value.
    pub fn map(&self, op: impl Fn(f64, ExtReal) -> ExtReal) -> Result<Self> {
        let values = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| op(x, v))
            .collect();
        SampledFunction::new(self.grid.clone(), values)
    }

    /// Combines two functions on the same grid node by node.
    pub fn zip_with(
        &self,
        other: &SampledFunction,
        op: impl Fn(ExtReal, ExtReal) -> ExtReal,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidFunction(
                "pointwise combination needs identical grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        SampledFunction::new(self.grid.clone(), values)
    }

    /// `f + g` on a shared grid.
    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `f + λ`.
    pub fn shift(&self, lambda: f64) -> Result<Self> {
        self.map(|_, v| v + lambda)
    }

    /// `λ f` for `λ ≥ 0`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidConstant(format!("scale factor {lambda}")));
        }
        self.map(|_, v| v.scale(lambda))
    }

    /// `f · g` for nonnegative values, with `0 · ∞ = 0`.
    pub fn product(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| {
            if a == 0.0 || b == 0.0 {
                ExtReal::ZERO
            } else {
                ExtReal::of(a.value() * b.value())
            }
        })
    }

    /// `h(z) = f(λ z)`, carried on the grid `G / λ`.
    pub fn rescale_argument(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidConstant(format!("argument scale {lambda}")));
        }
        let grid = self.grid.scaled(1.0 / lambda)?;
        SampledFunction::new(grid, self.values.clone())
    }
}

impl RealFunction for SampledFunction {
    fn eval(&self, x: f64) -> Result<ExtReal> {
        SampledFunction::eval(self, x)
    }
}

impl RealFunction for ClosedForm {
    fn eval(&self, x: f64) -> Result<ExtReal> {
        Ok(ClosedForm::eval(self, x))
    }
}

/// Samples a fixture on a grid. Indicator fixtures put their support on the
/// node nearest `x0` when `x0` lies inside the grid span, and are identically
/// `+∞` otherwise.
pub fn sample(cf: &ClosedForm, grid: &Grid) -> SampledFunction {
    let values = match *cf {
        ClosedForm::IndicatorPoint { x0 } => {
            let mut v = vec![ExtReal::POS_INF; grid.len()];
            let tol = NODE_TOL * grid.min_gap().max(1.0);
            if x0 >= grid.first() - tol && x0 <= grid.last() + tol {
                v[grid.nearest_index(x0)] = ExtReal::ZERO;
            }
            v
        }
        _ => grid.points().iter().map(|&x| cf.eval(x)).collect(),
    };
    SampledFunction {
        grid: grid.clone(),
        values,
    }
}

pub fn validate_proper(f: &SampledFunction) -> bool {
    f.is_proper()
}

/// Either a sampled or a closed-form function.
#[derive(Clone, Debug, PartialEq)]
pub enum Function {
    Sampled(SampledFunction),
    ClosedForm(ClosedForm),
}

impl Function {
    pub fn eval(&self, x: f64) -> Result<ExtReal> {
        match self {
            Function::Sampled(s) => s.eval(x),
            Function::ClosedForm(c) => Ok(c.eval(x)),
        }
    }

    /// Values on `grid`. Sampled functions must contain every node of `grid`.
    pub fn sample_on(&self, grid: &Grid) -> Result<SampledFunction> {
        match self {
            Function::ClosedForm(c) => Ok(sample(c, grid)),
            Function::Sampled(s) if s.grid() == grid => Ok(s.clone()),
            Function::Sampled(s) => {
                let values = grid
                    .points()
                    .iter()
                    .map(|&x| s.eval(x))
                    .collect::<Result<Vec<_>>>()?;
                SampledFunction::new(grid.clone(), values)
            }
        }
    }

    /// The function's own grid, if sampled.
    pub fn grid(&self) -> Option<&Grid> {
        match self {
            Function::Sampled(s) => Some(s.grid()),
            Function::ClosedForm(_) => None,
        }
    }
}

impl RealFunction for Function {
    fn eval(&self, x: f64) -> Result<ExtReal> {
        Function::eval(self, x)
    }
}

impl From<ClosedForm> for Function {
    fn from(c: ClosedForm) -> Self {
        Function::ClosedForm(c)
    }
}

impl From<SampledFunction> for Function {
    fn from(s: SampledFunction) -> Self {
        Function::Sampled(s)
    }
}
