use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for uniform-step detection and node lookup.
pub const NODE_TOL: f64 = 1e-12;

/// A strictly increasing list of at least two finite reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    step: Option<f64>,
}

/// Short description of a grid, used as provenance in output files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub first: f64,
    pub last: f64,
    pub len: usize,
    pub uniform: bool,
}

impl Grid {
    /// Builds a grid from explicit points, detecting a uniform step.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateGrid(format!(
                "{} point(s), need at least 2",
                points.len()
            )));
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite point {bad}")));
        }
        if let Some(w) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "points not strictly increasing at index {}",
                w + 1
            )));
        }
        let step = (points[points.len() - 1] - points[0]) / (points.len() - 1) as f64;
        let tol = NODE_TOL * step.abs().max(1.0);
        let uniform = points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= tol);
        Ok(Grid {
            points,
            step: uniform.then_some(step),
        })
    }

    /// Points `a + i (b − a) / (n − 1)`, with the last point exactly `b`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b || n < 2 {
            return Err(Error::DegenerateGrid(format!("a = {a}, b = {b}, n = {n}")));
        }
        let step = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| a + i as f64 * step).collect();
        points[n - 1] = b;
        Ok(Grid {
            points,
            step: Some(step),
        })
    }

    /// Parses an `a,b,n` descriptor.
    pub fn parse_descriptor(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid descriptor `{s}` is not `a,b,n`")));
        }
        let bad = |what: &str| Error::Parse(format!("grid descriptor `{s}`: bad {what}"));
        let a: f64 = parts[0].parse().map_err(|_| bad("a"))?;
        let b: f64 = parts[1].parse().map_err(|_| bad("b"))?;
        let n: usize = parts[2].parse().map_err(|_| bad("n"))?;
        Grid::uniform(a, b, n)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.step.is_some()
    }

    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Smallest gap between consecutive points.
    pub fn min_gap(&self) -> f64 {
        self.step.unwrap_or_else(|| {
            self.points
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min)
        })
    }

    /// Index of the node nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        match self.points.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.points.len() => i - 1,
            Err(i) => {
                if x - self.points[i - 1] <= self.points[i] - x {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Index of the node that coincides with `x` within `1e-12·max(1, step)`.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        self.node_index_tol(x, NODE_TOL * self.min_gap().max(1.0))
    }

    pub fn node_index_tol(&self, x: f64, tol: f64) -> Option<usize> {
        if !x.is_finite() {
            return None;
        }
        let i = self.nearest_index(x);
        ((self.points[i] - x).abs() <= tol).then_some(i)
    }

    /// The same grid with every point multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidConstant(format!("grid scale factor {factor}")));
        }
        Grid::new(self.points.iter().map(|p| p * factor).collect())
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            first: self.first(),
            last: self.last(),
            len: self.len(),
            uniform: self.is_uniform(),
        }
    }
}

/// Uniform grid on `[a, b]` with `n` points.
pub fn make_uniform_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::uniform(a, b, n)
}
