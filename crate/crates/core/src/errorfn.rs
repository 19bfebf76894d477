//! Error functions `e(x, y)`: nonnegative symmetric bifunctions with values in
//! `ℝ ∪ {+∞}`, grid validation, and the product and Lipschitz constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::funcmodel::{Function, Grid, SampledFunction};
use crate::report::{ProbeMode, STRUCTURAL_TOL};

/// Grids larger than this get a sampled triangle check.
pub const TRIANGLE_EXHAUSTIVE_CAP: usize = 200;
/// Number of random triples drawn above the cap.
pub const TRIANGLE_SAMPLES: usize = 1_000_000;
pub const TRIANGLE_SEED: u64 = 0x7121_a46e;

/// Refinement factor of the probe grid used to check closed-form inputs of
/// [`product_error`].
const PRODUCT_PROBE_REFINE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum ErrorFunction {
    /// `0`
    Zero,
    /// `c (x − y)²`, `c > 0`
    Quadratic { scale: f64 },
    /// `2L |x − y|`, `L > 0`
    ScaledDistance { lipschitz: f64 },
    /// `(exp(−x) − exp(−y)) (y − x)`
    ExpKernel,
    /// `f(x) g(y) + f(y) g(x)`
    Product { f: Box<Function>, g: Box<Function> },
    /// Table lookup on a grid.
    SampledMatrix { grid: Grid, values: Vec<Vec<ExtReal>> },
    /// `factor · inner`, `factor > 0`
    Scaled { factor: f64, inner: Box<ErrorFunction> },
    /// `a + b`
    Sum(Box<ErrorFunction>, Box<ErrorFunction>),
}

/// `a · b` for nonnegative extended reals with `0 · ∞ = 0`.
fn mul_nonneg(a: ExtReal, b: ExtReal) -> ExtReal {
    if a == 0.0 || b == 0.0 {
        ExtReal::ZERO
    } else {
        ExtReal::of(a.value() * b.value())
    }
}

impl ErrorFunction {
    pub fn zero() -> Self {
        ErrorFunction::Zero
    }

    pub fn quadratic(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidConstant(format!("quadratic scale {scale}")));
        }
        Ok(ErrorFunction::Quadratic { scale })
    }

    pub fn scaled_distance(lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::InvalidConstant(format!("Lipschitz constant {lipschitz}")));
        }
        Ok(ErrorFunction::ScaledDistance { lipschitz })
    }

    pub fn exp_kernel() -> Self {
        ErrorFunction::ExpKernel
    }

    pub fn sampled_matrix(grid: Grid, values: Vec<Vec<ExtReal>>) -> Result<Self> {
        if values.len() != grid.len() || values.iter().any(|row| row.len() != grid.len()) {
            return Err(Error::InvalidFunction(format!(
                "error matrix must be {n}×{n}",
                n = grid.len()
            )));
        }
        Ok(ErrorFunction::SampledMatrix { grid, values })
    }

    /// `factor · self`.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidConstant(format!("kernel factor {factor}")));
        }
        Ok(match self {
            ErrorFunction::Zero => ErrorFunction::Zero,
            ErrorFunction::Quadratic { scale } => ErrorFunction::Quadratic {
                scale: scale * factor,
            },
            ErrorFunction::ScaledDistance { lipschitz } => ErrorFunction::ScaledDistance {
                lipschitz: lipschitz * factor,
            },
            other => ErrorFunction::Scaled {
                factor,
                inner: Box::new(other),
            },
        })
    }

    /// The kernel `2e` used for `∂²ᵉ`.
    pub fn doubled(&self) -> Self {
        self.clone().scaled(2.0).expect("2 is a valid factor")
    }

    pub fn sum(self, other: ErrorFunction) -> Self {
        match (self, other) {
            (ErrorFunction::Zero, e) | (e, ErrorFunction::Zero) => e,
            (a, b) => ErrorFunction::Sum(Box::new(a), Box::new(b)),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<ExtReal> {
        Ok(match self {
            ErrorFunction::Zero => ExtReal::ZERO,
            ErrorFunction::Quadratic { scale } => ExtReal::of(scale * ((x - y) * (x - y))),
            ErrorFunction::ScaledDistance { lipschitz } => {
                ExtReal::of(2.0 * lipschitz * (x - y).abs())
            }
            ErrorFunction::ExpKernel => ExtReal::of(((-x).exp() - (-y).exp()) * (y - x)),
            ErrorFunction::Product { f, g } => {
                let (fx, fy, gx, gy) = (f.eval(x)?, f.eval(y)?, g.eval(x)?, g.eval(y)?);
                mul_nonneg(fx, gy) + mul_nonneg(fy, gx)
            }
            ErrorFunction::SampledMatrix { grid, values } => {
                let i = grid.node_index(x).ok_or(Error::OffGrid(x))?;
                let j = grid.node_index(y).ok_or(Error::OffGrid(y))?;
                values[i][j]
            }
            ErrorFunction::Scaled { factor, inner } => inner.eval(x, y)?.scale(*factor),
            ErrorFunction::Sum(a, b) => a.eval(x, y)? + b.eval(x, y)?,
        })
    }

    /// Degree `k` with `e(λx, λy) = λᵏ e(x, y)` for `λ > 0`, when known.
    /// The zero kernel is homogeneous of every degree; `1` is reported.
    pub fn homogeneity_degree(&self) -> Option<f64> {
        match self {
            ErrorFunction::Zero | ErrorFunction::ScaledDistance { .. } => Some(1.0),
            ErrorFunction::Quadratic { .. } => Some(2.0),
            ErrorFunction::Scaled { inner, .. } => inner.homogeneity_degree(),
            ErrorFunction::Sum(a, b) => match (a.homogeneity_degree(), b.homogeneity_degree()) {
                (Some(p), Some(q)) if p == q => Some(p),
                _ => None,
            },
            _ => None,
        }
    }

    /// `e(·, y)` sampled on `grid`.
    pub fn slice(&self, grid: &Grid, y: f64) -> Result<SampledFunction> {
        let values = grid
            .points()
            .iter()
            .map(|&x| self.eval(x, y))
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(grid.clone(), values)
    }

    /// Wire-form kind name.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ErrorFunction::Zero => "zero",
            ErrorFunction::Quadratic { .. } => "quadratic",
            ErrorFunction::ScaledDistance { .. } => "scaled_distance",
            ErrorFunction::ExpKernel => "exp_kernel",
            ErrorFunction::Product { .. } => "product",
            ErrorFunction::SampledMatrix { .. } => "sampled_matrix",
            ErrorFunction::Scaled { .. } => "scaled",
            ErrorFunction::Sum(..) => "sum",
        }
    }
}

pub fn eval_error(e: &ErrorFunction, x: f64, y: f64) -> Result<ExtReal> {
    e.eval(x, y)
}

/// Structural properties of a kernel on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorValidationReport {
    pub symmetric_ok: bool,
    pub worst_asymmetry: ExtReal,
    pub nonneg_ok: bool,
    /// Smallest value seen (only meaningful when negative).
    pub worst_negative: ExtReal,
    pub negative_witness: Option<(f64, f64)>,
    pub zero_diag_ok: bool,
    pub triangle_ok: bool,
    /// Worst `e(z,x) − e(z,y) − e(y,x)`.
    pub worst_triangle_violation: ExtReal,
    /// `(z, y, x)` achieving the worst triangle violation.
    pub triangle_witness: Option<(f64, f64, f64)>,
    pub triangle_mode: ProbeMode,
    /// `k_y = max_x e(x, y)` for each grid node `y`.
    pub k_values: Vec<ExtReal>,
    pub bounded_flag: bool,
}

fn exceeds(lhs: ExtReal, rhs: ExtReal, tol: f64) -> bool {
    let gap = lhs - rhs;
    gap.is_pos_inf() || gap.is_finite() && gap.value() > tol * lhs.value().abs().max(1.0)
}

/// Exhaustive pair checks and a triangle check that is exhaustive up to
/// [`TRIANGLE_EXHAUSTIVE_CAP`] nodes and sampled with a fixed seed above.
pub fn validate_error(e: &ErrorFunction, grid: &Grid) -> Result<ErrorValidationReport> {
    let p = grid.points();
    let n = p.len();
    let mut m = vec![vec![ExtReal::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = e.eval(p[i], p[j])?;
        }
    }

    let mut worst_asymmetry = ExtReal::ZERO;
    let mut symmetric_ok = true;
    let mut worst_negative = ExtReal::POS_INF;
    let mut negative_witness = None;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (m[i][j], m[j][i]);
            let asym = if a == b { ExtReal::ZERO } else { (a - b).abs().max((b - a).abs()) };
            let asym = if a.is_finite() != b.is_finite() { ExtReal::POS_INF } else { asym };
            if asym > worst_asymmetry {
                worst_asymmetry = asym;
            }
            if exceeds(a, b, STRUCTURAL_TOL) || exceeds(b, a, STRUCTURAL_TOL) {
                symmetric_ok = false;
            }
            if a < worst_negative {
                worst_negative = a;
                if a < ExtReal::ZERO {
                    negative_witness = Some((p[i], p[j]));
                }
            }
        }
    }
    let nonneg_ok = negative_witness.is_none();
    let zero_diag_ok = (0..n).all(|i| m[i][i] == 0.0);

    let mut worst_tri = ExtReal::NEG_INF;
    let mut tri_witness = None;
    let mut triangle_ok = true;
    let mut probe = |z: usize, y: usize, x: usize| {
        let lhs = m[z][x];
        let rhs = m[z][y] + m[y][x];
        let v = lhs - rhs;
        if tri_witness.is_none() || v > worst_tri {
            worst_tri = v;
            tri_witness = Some((p[z], p[y], p[x]));
        }
        if exceeds(lhs, rhs, STRUCTURAL_TOL) {
            triangle_ok = false;
        }
    };
    let triangle_mode = if n <= TRIANGLE_EXHAUSTIVE_CAP {
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    probe(z, y, x);
                }
            }
        }
        ProbeMode::Exhaustive
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(TRIANGLE_SEED);
        for _ in 0..TRIANGLE_SAMPLES {
            probe(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        }
        ProbeMode::Sampled { seed: TRIANGLE_SEED }
    };

    let k_values: Vec<ExtReal> = (0..n)
        .map(|j| (0..n).map(|i| m[i][j]).max().expect("grid has nodes"))
        .collect();
    let bounded_flag = k_values.iter().all(|k| k.is_finite());

    Ok(ErrorValidationReport {
        symmetric_ok,
        worst_asymmetry,
        nonneg_ok,
        worst_negative,
        negative_witness,
        zero_diag_ok,
        triangle_ok,
        worst_triangle_violation: worst_tri,
        triangle_witness: tri_witness,
        triangle_mode,
        k_values,
        bounded_flag,
    })
}

/// `k_y = max over grid x of e(x, y)`.
pub fn k_value(e: &ErrorFunction, grid: &Grid, y: f64) -> Result<ExtReal> {
    let mut k = ExtReal::NEG_INF;
    for &x in grid.points() {
        k = k.max(e.eval(x, y)?);
    }
    Ok(k)
}

/// Grid Lipschitz constant of `y ↦ e(x, y)`, uniform over `x` in `x_grid`,
/// from consecutive nodes of `y_grid`. For anchors on `y_grid` this bounds
/// `|e(x, y₁) − e(x, y₂)|` by `L |y₁ − y₂|` exactly.
pub fn lipschitz_in_anchor(e: &ErrorFunction, x_grid: &Grid, y_grid: &Grid) -> Result<ExtReal> {
    let ys = y_grid.points();
    let mut l = ExtReal::ZERO;
    for &x in x_grid.points() {
        for w in ys.windows(2) {
            let (a, b) = (e.eval(x, w[0])?, e.eval(x, w[1])?);
            if !(a.is_finite() && b.is_finite()) {
                if a != b {
                    return Ok(ExtReal::POS_INF);
                }
                continue;
            }
            l = l.max(ExtReal::of((b.value() - a.value()).abs() / (w[1] - w[0])));
        }
    }
    Ok(l)
}

/// Whether `e(x, y) ≤ e'(x, y)` at every node `x` of `grid`.
pub fn dominated_at(e: &ErrorFunction, e_prime: &ErrorFunction, grid: &Grid, y: f64) -> Result<bool> {
    for &x in grid.points() {
        if e.eval(x, y)? > e_prime.eval(x, y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_product_factor(name: &str, f: &Function, grid: &Grid) -> Result<SampledFunction> {
    let probe = match f {
        Function::Sampled(_) => f.sample_on(grid)?,
        Function::ClosedForm(_) => {
            let n = (grid.len() - 1) * PRODUCT_PROBE_REFINE + 1;
            let fine = Grid::uniform(grid.first(), grid.last(), n)?;
            f.sample_on(&fine)?
        }
    };
    if let Some([a, b, c]) = probe.convexity_violation(STRUCTURAL_TOL) {
        return Err(Error::ProductPrecondition {
            reason: format!("{name} is not convex"),
            witness: vec![probe.point(a), probe.point(b), probe.point(c)],
        });
    }
    if let Some(i) = probe.values().iter().position(|v| *v < ExtReal::ZERO) {
        return Err(Error::ProductPrecondition {
            reason: format!("{name} is negative"),
            witness: vec![probe.point(i)],
        });
    }
    f.sample_on(grid)
}

/// The kernel `e(x, y) = f(x) g(y) + f(y) g(x)` under which `f·g` is
/// e-convex, for `f`, `g` convex and nonnegative.
pub fn product_error(f: &Function, g: &Function, grid: &Grid) -> Result<ErrorFunction> {
    let fs = check_product_factor("f", f, grid)?;
    let gs = check_product_factor("g", g, grid)?;
    if !fs.values().iter().zip(gs.values()).any(|(a, b)| a.is_finite() && b.is_finite()) {
        return Err(Error::ProductPrecondition {
            reason: "dom f ∩ dom g is empty on the grid".into(),
            witness: vec![],
        });
    }
    Ok(ErrorFunction::Product {
        f: Box::new(f.clone()),
        g: Box::new(g.clone()),
    })
}

/// The kernel `e(x, y) = 2L |x − y|` under which every `L`-Lipschitz
/// function is e-convex.
pub fn lipschitz_error(l: f64) -> Result<ErrorFunction> {
    ErrorFunction::scaled_distance(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{make_uniform_grid, sample, ClosedForm};

    fn q(c: f64) -> ErrorFunction {
        ErrorFunction::quadratic(c).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_error(&q(1.0), 3.0, 1.0).unwrap(), 4.0);
        assert_eq!(eval_error(&ErrorFunction::ExpKernel, 0.7, 0.7).unwrap(), 0.0);
        let e = ErrorFunction::scaled_distance(2.0).unwrap();
        assert_eq!(eval_error(&e, 0.0, 1.5).unwrap(), 6.0);
    }

    #[test]
    fn invalid_constants() {
        assert!(ErrorFunction::quadratic(0.0).is_err());
        assert!(ErrorFunction::scaled_distance(-1.0).is_err());
        assert!(matches!(lipschitz_error(0.0), Err(Error::InvalidConstant(_))));
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(lipschitz_error(1.0).unwrap().eval(0.0, 3.0).unwrap(), 6.0);
        assert_eq!(lipschitz_error(0.5).unwrap().eval(-1.0, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn quadratic_breaks_triangle_inequality() {
        let g = Grid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let r = validate_error(&q(1.0), &g).unwrap();
        assert!(!r.triangle_ok);
        // Enumerating all 27 ordered triples by hand: the largest gap is
        // e(0,2) − e(0,1) − e(1,2) = 4 − 1 − 1 = 2, first reached at (0,1,2).
        assert_eq!(r.worst_triangle_violation, 2.0);
        assert_eq!(r.triangle_witness, Some((0.0, 1.0, 2.0)));
        assert!(r.symmetric_ok && r.nonneg_ok && r.zero_diag_ok);
        assert_eq!(r.triangle_mode, ProbeMode::Exhaustive);
    }

    #[test]
    fn distance_satisfies_triangle_inequality() {
        let g = make_uniform_grid(-3.0, 2.0, 41).unwrap();
        let r = validate_error(&ErrorFunction::scaled_distance(1.0).unwrap(), &g).unwrap();
        assert!(r.triangle_ok);
        assert!(r.bounded_flag);
    }

    #[test]
    fn exp_kernel_structure() {
        let g = Grid::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let r = validate_error(&ErrorFunction::ExpKernel, &g).unwrap();
        assert!(r.symmetric_ok && r.nonneg_ok && r.zero_diag_ok);
        assert_eq!(r.worst_asymmetry, 0.0);
    }

    #[test]
    fn sampled_triangle_mode_above_cap() {
        let g = make_uniform_grid(0.0, 1.0, 201).unwrap();
        let r = validate_error(&ErrorFunction::Zero, &g).unwrap();
        assert_eq!(r.triangle_mode, ProbeMode::Sampled { seed: TRIANGLE_SEED });
        assert!(r.triangle_ok);
    }

    #[test]
    fn negative_matrix_is_reported() {
        let g = Grid::new(vec![0.0, 1.0]).unwrap();
        let v = |a: f64, b: f64, c: f64, d: f64| {
            vec![vec![ExtReal::of(a), ExtReal::of(b)], vec![ExtReal::of(c), ExtReal::of(d)]]
        };
        let e = ErrorFunction::sampled_matrix(g.clone(), v(0.0, -1.0, -1.0, 0.0)).unwrap();
        let r = validate_error(&e, &g).unwrap();
        assert!(!r.nonneg_ok);
        assert_eq!(r.negative_witness, Some((0.0, 1.0)));
        let e = ErrorFunction::sampled_matrix(g.clone(), v(0.0, 1.0, 2.0, 0.0)).unwrap();
        assert!(!validate_error(&e, &g).unwrap().symmetric_ok);
        assert!(matches!(e.eval(0.5, 0.0), Err(Error::OffGrid(_))));
    }

    #[test]
    fn product_kernel_value() {
        let grid = make_uniform_grid(-2.0, 2.0, 41).unwrap();
        let f = ClosedForm::Quad { a: 2.0, b: 0.0, c: 0.0 };
        let g = ClosedForm::Quad { a: 2.0, b: -2.0, c: 1.0 };
        let e = product_error(&f.into(), &g.into(), &grid).unwrap();
        // f(0)g(1) + f(1)g(0) = 0·0 + 1·1
        assert_eq!(e.eval(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn product_of_zero_functions_is_zero() {
        let grid = make_uniform_grid(-1.0, 1.0, 5).unwrap();
        let z = ClosedForm::Quad { a: 0.0, b: 0.0, c: 0.0 };
        let e = product_error(&z.clone().into(), &z.into(), &grid).unwrap();
        for &x in grid.points() {
            for &y in grid.points() {
                assert_eq!(e.eval(x, y).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn product_rejects_nonconvex_input() {
        let grid = Grid::new(vec![-1.0, 0.0, 1.0]).unwrap();
        let f = Function::Sampled(sample(&ClosedForm::NegSquare, &grid));
        let g = Function::ClosedForm(ClosedForm::Abs);
        match product_error(&f, &g, &grid) {
            Err(Error::ProductPrecondition { witness, .. }) => {
                assert_eq!(witness, vec![-1.0, 0.0, 1.0]);
            }
            other => panic!("{other:?}"),
        }
        let below = sample(&ClosedForm::Abs, &grid).shift(-0.5).unwrap();
        match product_error(&below.into(), &g, &grid) {
            Err(Error::ProductPrecondition { witness, .. }) => assert_eq!(witness, vec![0.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn doubled_and_sum() {
        assert_eq!(q(1.0).doubled(), q(2.0));
        let e = ErrorFunction::ExpKernel.doubled();
        assert_eq!(
            e.eval(1.0, 0.0).unwrap().value(),
            2.0 * ErrorFunction::ExpKernel.eval(1.0, 0.0).unwrap().value()
        );
        let s = q(1.0).sum(ErrorFunction::scaled_distance(1.0).unwrap());
        assert_eq!(s.eval(0.0, 1.0).unwrap(), 3.0);
        assert_eq!(s.homogeneity_degree(), None);
        assert_eq!(q(3.0).homogeneity_degree(), Some(2.0));
    }

    #[test]
    fn anchor_lipschitz_constant() {
        let g = make_uniform_grid(-1.0, 1.0, 21).unwrap();
        let l = lipschitz_in_anchor(&ErrorFunction::scaled_distance(1.0).unwrap(), &g, &g).unwrap();
        assert!((l.value() - 2.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn kernel() -> impl Strategy<Value = ErrorFunction> {
            prop_oneof![
                Just(ErrorFunction::Zero),
                (0.1f64..4.0).prop_map(|c| ErrorFunction::quadratic(c).unwrap()),
                (0.1f64..4.0).prop_map(|l| ErrorFunction::scaled_distance(l).unwrap()),
                Just(ErrorFunction::ExpKernel),
            ]
        }

        proptest! {
            #[test]
            fn exactly_symmetric(e in kernel(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
                prop_assert_eq!(e.eval(x, y).unwrap(), e.eval(y, x).unwrap());
            }

            #[test]
            fn nonnegative(e in kernel(), x in -5.0f64..5.0, y in -5.0f64..5.0) {
                prop_assert!(e.eval(x, y).unwrap() >= ExtReal::ZERO);
            }

            #[test]
            fn homogeneous(c in 0.1f64..4.0, lam in 0.1f64..5.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
                for e in [ErrorFunction::quadratic(c).unwrap(), ErrorFunction::scaled_distance(c).unwrap()] {
                    let k = e.homogeneity_degree().unwrap();
                    let lhs = e.eval(lam * x, lam * y).unwrap().value();
                    let rhs = lam.powf(k) * e.eval(x, y).unwrap().value();
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
                }
            }
        }
    }
}
