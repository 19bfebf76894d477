//! Lower bounds on the modulus `σ(y)` of σ-convexity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcmodel::SampledFunction;

/// Nominal weights; each combination is snapped to the nearest node and the
/// weight recomputed from the node.
pub const SIGMA_TS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaBound {
    pub bound: f64,
    pub x: f64,
    /// Weight after snapping.
    pub t: f64,
    pub probes: usize,
}

/// `max [f(tx + (1−t)y) − t f(x) − (1−t) f(y)] / (t(1−t)|x − y|)` over grid
/// nodes `x ≠ y` and the weights [`SIGMA_TS`]. Any admissible `σ(y)` is at
/// least this large.
pub fn sigma_lower_bound(f: &SampledFunction, y: f64) -> Result<SigmaBound> {
    let g = f.grid();
    let iy = g.node_index(y).ok_or(Error::OffGrid(y))?;
    let y = g.points()[iy];
    let Some(fy) = f.value(iy).finite() else {
        return Err(Error::NoProbes);
    };
    let mut best: Option<SigmaBound> = None;
    let mut probes = 0;
    for (ix, &x) in g.points().iter().enumerate() {
        let Some(fx) = f.value(ix).finite() else { continue };
        if ix == iy {
            continue;
        }
        for &t0 in &SIGMA_TS {
            let iz = g.nearest_index(t0 * x + (1.0 - t0) * y);
            if iz == ix || iz == iy {
                continue;
            }
            let Some(fz) = f.value(iz).finite() else { continue };
            let t = (g.points()[iz] - y) / (x - y);
            let q = (fz - t * fx - (1.0 - t) * fy) / (t * (1.0 - t) * (x - y).abs());
            probes += 1;
            if best.is_none_or(|b| q > b.bound) {
                best = Some(SigmaBound { bound: q, x, t, probes: 0 });
            }
        }
    }
    best.map(|b| SigmaBound { probes, ..b }).ok_or(Error::NoProbes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{make_uniform_grid, sample, ClosedForm};

    #[test]
    fn neg_square_needs_growing_sigma() {
        let mut bounds = Vec::new();
        for a in [10.0, 100.0] {
            let g = make_uniform_grid(-a, a, 401).unwrap();
            let b = sigma_lower_bound(&sample(&ClosedForm::NegSquare, &g), 0.0).unwrap();
            assert!(b.bound >= a - g.step().unwrap());
            bounds.push(b.bound);
        }
        assert!(bounds[1] > bounds[0] + 80.0);
    }

    #[test]
    fn convex_functions_need_none() {
        let g = make_uniform_grid(-3.0, 3.0, 61).unwrap();
        let b = sigma_lower_bound(&sample(&ClosedForm::Quad { a: 1.0, b: 0.2, c: 0.0 }, &g), 1.0).unwrap();
        assert!(b.bound <= 1e-12);
    }

    #[test]
    fn no_probes() {
        let g = make_uniform_grid(0.0, 1.0, 2).unwrap();
        assert_eq!(sigma_lower_bound(&sample(&ClosedForm::Abs, &g), 0.0), Err(Error::NoProbes));
    }
}
