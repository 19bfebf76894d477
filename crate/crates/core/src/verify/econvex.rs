//! Grid checks of e-convexity: the defining inequality, the two slope
//! characterizations, the Dini bound and the gradient inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::errorfn::ErrorFunction;
use crate::extreal::{add_ext, sub_ext, ExtReal};
use crate::funcmodel::{ClosedForm, Grid, RealFunction, SampledFunction};
use crate::report::{ProbeMode, ViolationReport, DINI_TOL};
use crate::subdiff::{dini_upper, OperatorSample};

/// Grids with more nodes than this are probed at random.
pub const EXHAUSTIVE_NODE_CAP: usize = 300;
/// Random probes drawn above the cap.
pub const SAMPLED_PROBES: usize = 200_000;
pub const PROBE_SEED: u64 = 0x5eed_ec0f;

/// Which convex combinations `t x + (1 − t) y` are probed.
#[derive(Clone, Debug, PartialEq)]
pub enum TMode {
    /// Every node strictly between two nodes, with `t` read off the grid.
    AllNodeTriples,
    /// The given `t` values, kept where the combination is a node.
    TSet(Vec<f64>),
}

/// Violation `f(z) − t f(x) − (1−t) f(y) − t(1−t) e(x,y)` at the node
/// `z = t x + (1 − t) y`.
pub fn e_convex_violation(f: &SampledFunction, e: &ErrorFunction, x: f64, y: f64, t: f64) -> Result<ExtReal> {
    let z = f.eval(t * x + (1.0 - t) * y)?;
    let budget = e.eval(x, y)?.scale(t * (1.0 - t));
    Ok(violation(z, f.eval(x)?, f.eval(y)?, budget, t))
}

fn violation(fz: ExtReal, fx: ExtReal, fy: ExtReal, budget: ExtReal, t: f64) -> ExtReal {
    let rhs = add_ext(add_ext(fx.scale(t), fy.scale(1.0 - t)), budget);
    sub_ext(fz, rhs)
}

type Triples = Box<dyn Iterator<Item = (usize, usize, usize)>>;

/// Node-index triples `i < k < j`, exhaustive up to the cap and drawn at
/// random above it.
fn triples(n: usize, seed: u64) -> (ProbeMode, Triples) {
    if n <= EXHAUSTIVE_NODE_CAP {
        let it = (0..n).flat_map(move |i| (i + 2..n).flat_map(move |j| (i + 1..j).map(move |k| (i, k, j))));
        (ProbeMode::Exhaustive, Box::new(it))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let it = (0..SAMPLED_PROBES).map(move |_| {
            let i = rng.gen_range(0..n - 2);
            let j = rng.gen_range(i + 2..n);
            let k = rng.gen_range(i + 1..j);
            (i, k, j)
        });
        (ProbeMode::Sampled { seed }, Box::new(it))
    }
}

/// Worst violation of the e-convexity inequality over the probe set;
/// witness `[x, y, t]`. Pairs with `e(x, y) = +∞` are vacuous and skipped.
pub fn check_e_convex_def(f: &SampledFunction, e: &ErrorFunction, mode: &TMode) -> Result<ViolationReport> {
    check_e_convex_def_seeded(f, e, mode, PROBE_SEED)
}

pub fn check_e_convex_def_seeded(f: &SampledFunction, e: &ErrorFunction, mode: &TMode, seed: u64) -> Result<ViolationReport> {
    let g = f.grid();
    let p = g.points();
    let v = f.values();
    let n = p.len();
    match mode {
        TMode::AllNodeTriples => {
            if !g.is_uniform() {
                return Err(Error::GridNotUniform);
            }
            let (probe_mode, it) = triples(n, seed);
            let mut report = ViolationReport::new(probe_mode);
            let exhaustive = probe_mode == ProbeMode::Exhaustive;
            let matrix = if exhaustive { Some(kernel_matrix(e, g)?) } else { None };
            for (i, k, j) in it {
                let eij = match &matrix {
                    Some(m) => m[i][j],
                    None => e.eval(p[i], p[j])?,
                };
                if eij.is_pos_inf() {
                    continue;
                }
                let t = (j - k) as f64 / (j - i) as f64;
                let viol = violation(v[k], v[i], v[j], eij.scale(t * (1.0 - t)), t);
                report.record(viol, &[p[i], p[j], t]);
            }
            Ok(report)
        }
        TMode::TSet(ts) => {
            let mut report = ViolationReport::new(ProbeMode::Exhaustive);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let eij = e.eval(p[i], p[j])?;
                    if eij.is_pos_inf() {
                        continue;
                    }
                    for &t in ts {
                        if !(t > 0.0 && t < 1.0) {
                            continue;
                        }
                        if let Some(k) = g.node_index(t * p[i] + (1.0 - t) * p[j]) {
                            let viol = violation(v[k], v[i], v[j], eij.scale(t * (1.0 - t)), t);
                            report.record(viol, &[p[i], p[j], t]);
                        }
                    }
                }
            }
            Ok(report)
        }
    }
}

fn kernel_matrix(e: &ErrorFunction, g: &Grid) -> Result<Vec<Vec<ExtReal>>> {
    let p = g.points();
    p.iter()
        .map(|&x| p.iter().map(|&y| e.eval(x, y)).collect())
        .collect()
}

/// `(f(b) − f(a)) / (b − a)` with `f(b)` finite.
fn slope(fa: ExtReal, fb: ExtReal, a: f64, b: f64) -> ExtReal {
    sub_ext(fb, fa).div(b - a)
}

/// First slope characterization at nodes `a < b < c`:
/// `(f(b)−f(a))/(b−a) − (f(c)−f(b))/(c−b) − e(c,a)/(c−a)`.
fn char1(fa: ExtReal, fb: ExtReal, fc: ExtReal, eca: ExtReal, a: f64, b: f64, c: f64) -> ExtReal {
    if !fb.is_finite() {
        return ExtReal::NEG_INF;
    }
    let rhs = add_ext(slope(fb, fc, b, c), eca.div(c - a));
    sub_ext(slope(fa, fb, a, b), rhs)
}

/// Second slope characterization at anchor `x` with steps `0 < s < t`
/// along direction `u`:
/// `(f(x+su)−f(x))/s − (f(x+tu)−f(x))/t − ((t−s)/t²) e(x+tu, x)`.
fn char2(fx: ExtReal, fs: ExtReal, ft: ExtReal, etx: ExtReal, s: f64, t: f64) -> ExtReal {
    if !fx.is_finite() {
        return ExtReal::NEG_INF;
    }
    let lhs = (fs - fx.value()).div(s);
    let rhs = add_ext((ft - fx.value()).div(t), etx.scale((t - s) / (t * t)));
    sub_ext(lhs, rhs)
}

/// Violation of one slope characterization; `kind` is 1 or 2 and the nodes
/// are as in the witness of [`check_char_slopes`].
pub fn char_slopes_violation(f: &SampledFunction, e: &ErrorFunction, kind: u8, a: f64, b: f64, c: f64) -> Result<ExtReal> {
    let (fa, fb, fc) = (f.eval(a)?, f.eval(b)?, f.eval(c)?);
    match kind {
        1 => Ok(char1(fa, fb, fc, e.eval(c, a)?, a, b, c)),
        _ => {
            // anchor a, points b = a + s u and c = a + t u
            let u = (c - a).signum();
            Ok(char2(fa, fb, fc, e.eval(c, a)?, (b - a) * u, (c - a) * u))
        }
    }
}

/// Worst violation of the two slope characterizations along the grid.
/// Witness `[1, a, b, c]` for nodes `a < b < c`, or `[2, x, x+su, x+tu]` for
/// anchor `x`, `u = ±1`. Violations of the two forms are in their own units.
pub fn check_char_slopes(f: &SampledFunction, e: &ErrorFunction) -> Result<ViolationReport> {
    check_char_slopes_seeded(f, e, PROBE_SEED)
}

pub fn check_char_slopes_seeded(f: &SampledFunction, e: &ErrorFunction, seed: u64) -> Result<ViolationReport> {
    let g = f.grid();
    if !g.is_uniform() {
        return Err(Error::GridNotUniform);
    }
    let p = g.points();
    let v = f.values();
    let (mode, it) = triples(p.len(), seed);
    let mut report = ViolationReport::new(mode);
    for (i, k, j) in it {
        let eji = e.eval(p[j], p[i])?;
        report.record(char1(v[i], v[k], v[j], eji, p[i], p[k], p[j]), &[1.0, p[i], p[k], p[j]]);
        // anchored at the left node, stepping right
        let vr = char2(v[i], v[k], v[j], eji, p[k] - p[i], p[j] - p[i]);
        report.record(vr, &[2.0, p[i], p[k], p[j]]);
        // anchored at the right node, stepping left
        let vl = char2(v[j], v[k], v[i], eji, p[j] - p[k], p[j] - p[i]);
        report.record(vl, &[2.0, p[j], p[k], p[i]]);
    }
    Ok(report)
}

/// Outcome of [`check_dini_bound`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiniBoundReport {
    pub report: ViolationReport,
    /// Fraction of probe pairs whose two estimates both converged.
    pub converged_fraction: f64,
}

/// Worst `D̄f(x, y−x) + D̄f(y, x−y) − 2 e(x, y)` over the pairs; witness
/// `[x, y]`. The second derivative is taken at `y` towards `x`.
pub fn check_dini_bound(f: &dyn RealFunction, e: &ErrorFunction, pairs: &[(f64, f64)]) -> Result<DiniBoundReport> {
    check_dini_bound_directed(f, e, pairs, false)
}

/// As [`check_dini_bound`], with the second derivative taken at `y` in
/// direction `y − x` instead when `literal` is set.
pub fn check_dini_bound_directed(
    f: &dyn RealFunction,
    e: &ErrorFunction,
    pairs: &[(f64, f64)],
    literal: bool,
) -> Result<DiniBoundReport> {
    let mut report = ViolationReport::new(ProbeMode::Exhaustive);
    let mut converged = 0usize;
    for &(x, y) in pairs {
        let dx = dini_upper(f, x, y - x)?;
        let dy = dini_upper(f, y, if literal { y - x } else { x - y })?;
        if dx.converged && dy.converged {
            converged += 1;
        }
        let v = sub_ext(add_ext(dx.value, dy.value), e.eval(x, y)?.scale(2.0));
        report.record(v, &[x, y]);
    }
    let converged_fraction = if pairs.is_empty() { 1.0 } else { converged as f64 / pairs.len() as f64 };
    Ok(DiniBoundReport { report, converged_fraction })
}

/// All ordered pairs of an `n`-point uniform partition of `[a, b]`.
pub fn pair_grid(a: f64, b: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    let g = Grid::uniform(a, b, n)?;
    let p = g.points();
    Ok(p.iter().flat_map(|&x| p.iter().map(move |&y| (x, y))).collect())
}

/// Worst `⟨f′(x), y − x⟩ − (f(y) − f(x) + e(x, y))` over node pairs;
/// witness `[x, y]`. Requires a differentiable fixture.
pub fn check_gradient_inequality(f: &ClosedForm, e: &ErrorFunction, grid: &Grid) -> Result<ViolationReport> {
    let mut report = ViolationReport::new(ProbeMode::Exhaustive);
    for &x in grid.points() {
        let d = f
            .derivative(x)
            .ok_or_else(|| Error::InvalidFunction(format!("{} has no derivative at {x}", f.name())))?;
        let fx = f.eval(x);
        for &y in grid.points() {
            let rhs = add_ext(sub_ext(f.eval(y), fx), e.eval(x, y)?);
            report.record(sub_ext(ExtReal::of(d * (y - x)), rhs), &[x, y]);
        }
    }
    Ok(report)
}

/// `(x, f′(x))` at the grid nodes.
pub fn sampled_gradient(f: &ClosedForm, grid: &Grid) -> Result<OperatorSample> {
    let entries = grid
        .points()
        .iter()
        .map(|&x| {
            f.derivative(x)
                .map(|d| (x, d))
                .ok_or_else(|| Error::InvalidFunction(format!("{} has no derivative at {x}", f.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorSample::new(entries)
}

/// Whether a Dini bound report meets the Dini tolerance.
pub fn dini_bound_holds(r: &DiniBoundReport) -> bool {
    r.report.passes(DINI_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{make_uniform_grid, sample};
    use crate::report::INEQUALITY_TOL;
    use crate::subdiff::check_e_monotone;

    fn q1() -> ErrorFunction {
        ErrorFunction::quadratic(1.0).unwrap()
    }

    #[test]
    fn neg_square_is_tight() {
        let g = make_uniform_grid(-2.0, 2.0, 81).unwrap();
        let f = sample(&ClosedForm::NegSquare, &g);
        let r = check_e_convex_def(&f, &q1(), &TMode::AllNodeTriples).unwrap();
        assert_eq!(r.mode, ProbeMode::Exhaustive);
        assert!(r.max_violation.value().abs() <= 1e-12);
        assert!(check_char_slopes(&f, &q1()).unwrap().passes(INEQUALITY_TOL));
    }

    #[test]
    fn x_exp_neg_needs_nonnegative_arguments() {
        let e = ErrorFunction::ExpKernel;
        let pos = sample(&ClosedForm::XExpNeg, &make_uniform_grid(0.0, 2.0, 101).unwrap());
        assert!(check_e_convex_def(&pos, &e, &TMode::AllNodeTriples).unwrap().max_violation <= 1e-12);

        // At x = -2, y = 2, t = 0.825 the inequality misses by about 3.19.
        let v = e_convex_violation(&sample(&ClosedForm::XExpNeg, &make_uniform_grid(-2.0, 2.0, 81).unwrap()), &e, -2.0, 2.0, 0.825);
        assert!((v.unwrap().value() - 3.1856).abs() < 1e-3);
    }

    #[test]
    fn neg_square_without_budget_fails() {
        let g = make_uniform_grid(-1.0, 1.0, 3).unwrap();
        let f = sample(&ClosedForm::NegSquare, &g);
        let v = e_convex_violation(&f, &ErrorFunction::Zero, 1.0, -1.0, 0.5).unwrap();
        assert_eq!(v, 1.0);
        let r = check_e_convex_def(&f, &ErrorFunction::Zero, &TMode::AllNodeTriples).unwrap();
        assert_eq!(r.max_violation, 1.0);
        let r = check_char_slopes(&f, &ErrorFunction::Zero).unwrap();
        assert!(!r.passes(INEQUALITY_TOL));
        let w = &r.witness;
        let again = char_slopes_violation(&f, &ErrorFunction::Zero, w[0] as u8, w[1], w[2], w[3]).unwrap();
        assert_eq!(again, r.max_violation);
    }

    #[test]
    fn t_set_mode_and_uniformity() {
        let g = make_uniform_grid(-2.0, 2.0, 41).unwrap();
        let f = sample(&ClosedForm::NegSquare, &g);
        let ts: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let r = check_e_convex_def(&f, &q1(), &TMode::TSet(ts)).unwrap();
        assert!(r.checked_count > 0 && r.max_violation.value().abs() <= 1e-12);

        let h = SampledFunction::new(Grid::new(vec![0.0, 1.0, 3.0]).unwrap(), vec![ExtReal::ZERO; 3]).unwrap();
        assert_eq!(check_e_convex_def(&h, &q1(), &TMode::AllNodeTriples), Err(Error::GridNotUniform));
        assert_eq!(check_char_slopes(&h, &q1()), Err(Error::GridNotUniform));
    }

    #[test]
    fn large_grids_are_sampled_reproducibly() {
        let g = make_uniform_grid(-2.0, 2.0, 401).unwrap();
        let f = sample(&ClosedForm::NegSquare, &g);
        let a = check_e_convex_def(&f, &q1(), &TMode::AllNodeTriples).unwrap();
        let b = check_e_convex_def(&f, &q1(), &TMode::AllNodeTriples).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mode, ProbeMode::Sampled { seed: PROBE_SEED });
        assert_eq!(a.checked_count, SAMPLED_PROBES);
    }

    #[test]
    fn infinite_budget_is_skipped() {
        let g = make_uniform_grid(0.0, 1.0, 3).unwrap();
        let inf = vec![vec![ExtReal::POS_INF; 3]; 3];
        let e = ErrorFunction::sampled_matrix(g.clone(), inf).unwrap();
        let f = sample(&ClosedForm::NegSquare, &g);
        assert_eq!(check_e_convex_def(&f, &e, &TMode::AllNodeTriples).unwrap().checked_count, 0);
    }

    #[test]
    fn convex_quadratic_passes_slopes() {
        let g = make_uniform_grid(-1.0, 1.0, 21).unwrap();
        let f = sample(&ClosedForm::Quad { a: 1.0, b: 0.3, c: 0.0 }, &g);
        assert!(check_char_slopes(&f, &ErrorFunction::Zero).unwrap().passes(INEQUALITY_TOL));
    }

    #[test]
    fn dini_bound_orientation() {
        let pairs = pair_grid(-1.0, 1.0, 11).unwrap();
        let r = check_dini_bound(&ClosedForm::NegSquare, &q1(), &pairs).unwrap();
        assert!(dini_bound_holds(&r), "{:?}", r.report);
        // with both directions equal to y − x the sum is 2(x² − y²)
        let lit = check_dini_bound_directed(&ClosedForm::NegSquare, &q1(), &pairs, true).unwrap();
        assert!(!dini_bound_holds(&lit));
    }

    #[test]
    fn gateaux_chain_for_neg_square() {
        let g = make_uniform_grid(-2.0, 2.0, 41).unwrap();
        assert!(check_gradient_inequality(&ClosedForm::NegSquare, &q1(), &g).unwrap().passes(INEQUALITY_TOL));
        let grad = sampled_gradient(&ClosedForm::NegSquare, &g).unwrap();
        assert!(check_e_monotone(&grad, &q1(), 2.0).unwrap().passes(INEQUALITY_TOL));
    }
}
