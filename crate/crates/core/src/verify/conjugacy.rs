//! Checks on (e,y)-conjugates: Fenchel–Young, the three-way equivalence,
//! the basic conjugacy properties and the stability bounds.

use crate::error::{Error, Result};
use crate::errorfn::{k_value, lipschitz_in_anchor, validate_error, ErrorFunction};
use crate::extreal::{add_ext, sub_ext, ExtReal};
use crate::funcmodel::{Grid, SampledFunction};
use crate::report::{ProbeMode, ViolationReport, INEQUALITY_TOL, STRUCTURAL_TOL};
use crate::subdiff::{e_subdiff_interval, SubdiffInterval};
use crate::transform::{biconjugate_of, e_conjugate_at, e_conjugate_brute, Algorithm, ConjugateTable};

fn check_anchor(e: &ErrorFunction, x: f64) -> Result<()> {
    let d = e.eval(x, x)?;
    if d.is_finite() && d.value().abs() <= STRUCTURAL_TOL {
        Ok(())
    } else {
        Err(Error::AnchorPrecondition(x, d.value()))
    }
}

/// `f*ₑ,ₓ(x*) + f(x) − x* x`, the conjugate anchored at `x` and evaluated at
/// `x*` directly. Nonnegative; zero exactly on `∂ᵉf(x)`.
pub fn fenchel_young_gap(f: &SampledFunction, e: &ErrorFunction, x: f64, xstar: f64) -> Result<ExtReal> {
    let i = f.grid().node_index(x).ok_or(Error::OffGrid(x))?;
    let x = f.point(i);
    check_anchor(e, x)?;
    let c = e_conjugate_at(f, e, x, xstar)?;
    Ok(add_ext(c, f.value(i)) - xstar * x)
}

/// Classical subdifferential interval of a function given at arbitrary
/// increasing abscissae, at index `i`.
fn classical_interval(x: &[f64], v: &[ExtReal], i: usize) -> SubdiffInterval {
    let pts = Grid::new(x.to_vec()).expect("increasing abscissae");
    let f = SampledFunction::new(pts, v.to_vec()).expect("no −∞ values");
    e_subdiff_interval(&f, &ErrorFunction::Zero, x[i]).expect("node")
}

/// The three assertions at one probed slope.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceProbe {
    pub xstar: f64,
    /// `x* ∈ ∂ᵉf(x)`
    pub in_e_subdiff: bool,
    /// `x ∈ ∂f*ₑ,ₓ(x*)`
    pub in_conjugate_subdiff: bool,
    /// `x* ∈ ∂f**ₑ,ₓ(x)`
    pub in_biconjugate_subdiff: bool,
}

impl EquivalenceProbe {
    pub fn agrees(&self) -> bool {
        self.in_e_subdiff == self.in_conjugate_subdiff && self.in_e_subdiff == self.in_biconjugate_subdiff
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeWayReport {
    pub x: f64,
    pub interval: SubdiffInterval,
    pub probes: Vec<EquivalenceProbe>,
    /// Whether the triangle check passed for `e` on the grid (recorded only).
    pub triangle_ok: bool,
}

impl ThreeWayReport {
    pub fn all_agree(&self) -> bool {
        self.probes.iter().all(EquivalenceProbe::agrees)
    }
}

/// Distance by which the exterior probes sit outside `∂ᵉf(x)`.
pub const EXTERIOR_OFFSET: f64 = 0.5;
/// Dual nodes closer than this to a probe are dropped from the slope set,
/// and probes closer than this to each other are merged.
const PROBE_MERGE: f64 = 1e-6;

/// Probes the endpoints and midpoint of `∂ᵉf(x)` and two slopes outside it.
/// The conjugate and biconjugate are computed on the dual grid augmented
/// with the probes, so that each probe is a node of the slope set.
pub fn check_three_way_equivalence(
    f: &SampledFunction,
    e: &ErrorFunction,
    x: f64,
    dual_grid: &Grid,
) -> Result<ThreeWayReport> {
    let i = f.grid().node_index(x).ok_or(Error::OffGrid(x))?;
    let x = f.point(i);
    check_anchor(e, x)?;
    let triangle_ok = validate_error(e, f.grid())?.triangle_ok;
    let interval = e_subdiff_interval(f, e, x)?;

    let mut probes: Vec<f64> = Vec::new();
    let (lo, hi) = (interval.lower.finite(), interval.upper.finite());
    if interval.empty {
        // only exterior slopes exist; use the crossed bounds themselves
        probes.extend(lo);
        probes.extend(hi);
        if probes.is_empty() {
            probes.push(0.0);
        }
    } else {
        probes.extend(lo);
        probes.extend(hi);
        probes.extend(interval.midpoint());
        probes.extend(lo.map(|a| a - EXTERIOR_OFFSET));
        probes.extend(hi.map(|b| b + EXTERIOR_OFFSET));
    }
    probes.sort_by(f64::total_cmp);
    // a degenerate interval collapses to one probe
    probes.dedup_by(|a, b| (*a - *b).abs() <= PROBE_MERGE);

    let mut slopes: Vec<f64> = dual_grid
        .points()
        .iter()
        .copied()
        .filter(|s| probes.iter().all(|p| (s - p).abs() > PROBE_MERGE))
        .chain(probes.iter().copied())
        .collect();
    slopes.sort_by(f64::total_cmp);
    let slope_grid = Grid::new(slopes)?;
    let table = e_conjugate_brute(f, e, x, &slope_grid)?;
    let bic = biconjugate_of(&table, f.grid(), Algorithm::Brute)?;
    let bic_interval = classical_interval(f.grid().points(), bic.values(), i);

    let probes = probes
        .iter()
        .map(|&s| {
            let j = slope_grid.points().iter().position(|&p| p == s).expect("probe is a slope node");
            let conj_interval = classical_interval(slope_grid.points(), &table.values, j);
            EquivalenceProbe {
                xstar: s,
                in_e_subdiff: interval.contains_tol(s, INEQUALITY_TOL),
                in_conjugate_subdiff: conj_interval.contains_tol(x, INEQUALITY_TOL),
                in_biconjugate_subdiff: bic_interval.contains_tol(s, INEQUALITY_TOL),
            }
        })
        .collect();
    Ok(ThreeWayReport { x, interval, probes, triangle_ok })
}

/// Inputs to [`check_conjugate_properties`]. `g` shares the grid of `f`.
#[derive(Clone, Debug)]
pub struct ConjugacyInstance {
    pub f: SampledFunction,
    /// Majorant of `f` for the order-reversal item; also the second
    /// function of the convexity item.
    pub g: SampledFunction,
    pub e: ErrorFunction,
    /// Kernel dominating `e`.
    pub e_prime: ErrorFunction,
    pub y: f64,
    /// Second anchor for the Lipschitz-in-anchor item.
    pub y2: f64,
    pub shift: f64,
    /// Positive factor for the two scaling items.
    pub scale: f64,
    /// Weight in `(0, 1)` for the convexity item.
    pub weight: f64,
    pub dual: Grid,
}

/// Result of one conjugacy item.
#[derive(Clone, Debug, PartialEq)]
pub enum ItemOutcome {
    Checked {
        id: &'static str,
        gap: ExtReal,
        witness: Vec<f64>,
        tolerance: f64,
    },
    Skipped {
        id: &'static str,
        reason: String,
    },
}

impl ItemOutcome {
    pub fn id(&self) -> &'static str {
        match self {
            ItemOutcome::Checked { id, .. } | ItemOutcome::Skipped { id, .. } => id,
        }
    }

    pub fn passed(&self) -> Option<bool> {
        match self {
            ItemOutcome::Checked { gap, tolerance, .. } => Some(*gap <= ExtReal::of(*tolerance)),
            ItemOutcome::Skipped { .. } => None,
        }
    }
}

/// `|a − b|` with equal infinities at distance zero.
fn abs_diff(a: ExtReal, b: ExtReal) -> ExtReal {
    if a == b {
        ExtReal::ZERO
    } else {
        sub_ext(a, b).abs().max(sub_ext(b, a).abs())
    }
}

/// Worst gap over the dual nodes, witness `[s]`.
fn worst_over(slopes: &[f64], gap: impl Fn(usize, f64) -> Result<ExtReal>) -> Result<(ExtReal, Vec<f64>)> {
    let mut r = ViolationReport::new(ProbeMode::Exhaustive);
    for (j, &s) in slopes.iter().enumerate() {
        r.record(gap(j, s)?, &[s]);
    }
    Ok((r.max_violation, r.witness))
}

fn checked(id: &'static str, (gap, witness): (ExtReal, Vec<f64>)) -> ItemOutcome {
    ItemOutcome::Checked { id, gap, witness, tolerance: INEQUALITY_TOL }
}

fn skipped(id: &'static str, reason: impl Into<String>) -> ItemOutcome {
    ItemOutcome::Skipped { id, reason: reason.into() }
}

pub const ITEM_IDS: [&str; 10] = [
    "conj-i", "conj-ii", "conj-iii", "conj-iv", "conj-v", "conj-vi", "conj-vii", "conj-viii", "conj-ix", "conj-x",
];

/// Items (i)–(x) of the basic conjugacy properties, each checked at every
/// dual node (or every primal node for the biconjugate items). Items whose
/// preconditions fail on the instance are returned as skipped.
pub fn check_conjugate_properties(inst: &ConjugacyInstance) -> Result<Vec<ItemOutcome>> {
    let ConjugacyInstance { f, g, e, e_prime, y, y2, shift, scale, weight, dual } = inst;
    let (y, y2, shift, scale, weight) = (*y, *y2, *shift, *scale, *weight);
    let s = dual.points();
    let grid = f.grid();
    let conj = |h: &SampledFunction, k: &ErrorFunction, anchor: f64| e_conjugate_brute(h, k, anchor, dual);
    let fe = conj(f, e, y)?;
    let mut out = Vec::with_capacity(10);

    // (i) below the classical conjugate
    let f0 = conj(f, &ErrorFunction::Zero, y)?;
    out.push(checked("conj-i", worst_over(s, |j, _| Ok(sub_ext(fe.values[j], f0.values[j])))?));

    // (ii) order reversal
    if f.grid() != g.grid() {
        out.push(skipped("conj-ii", "g is sampled on a different grid"));
    } else if f.values().iter().zip(g.values()).any(|(a, b)| a > b) {
        out.push(skipped("conj-ii", "f ≤ g fails on the grid"));
    } else {
        let ge = conj(g, e, y)?;
        out.push(checked("conj-ii", worst_over(s, |j, _| Ok(sub_ext(ge.values[j], fe.values[j])))?));
    }

    // (iii) kernel order reversal
    let mut dominated = true;
    'pairs: for &a in grid.points().iter().chain(std::iter::once(&y)) {
        for &b in grid.points() {
            if e.eval(b, a)? > e_prime.eval(b, a)? {
                dominated = false;
                break 'pairs;
            }
        }
    }
    if dominated {
        let fep = conj(f, e_prime, y)?;
        out.push(checked("conj-iii", worst_over(s, |j, _| Ok(sub_ext(fep.values[j], fe.values[j])))?));
    } else {
        out.push(skipped("conj-iii", "e ≤ e′ fails on grid pairs"));
    }

    // (iv) shift
    let h = f.shift(shift)?;
    let he = conj(&h, e, y)?;
    out.push(checked("conj-iv", worst_over(s, |j, _| Ok(abs_diff(he.values[j], fe.values[j] - shift)))?));

    // (v) positive scaling of the function
    if scale > 0.0 && scale.is_finite() {
        let h = f.scale(scale)?;
        let he = conj(&h, e, y)?;
        let e_over = e.clone().scaled(1.0 / scale)?;
        out.push(checked(
            "conj-v",
            worst_over(s, |j, sj| {
                let rhs = e_conjugate_at(f, &e_over, y, sj / scale)?.scale(scale);
                Ok(abs_diff(he.values[j], rhs))
            })?,
        ));
    } else {
        out.push(skipped("conj-v", "scale must be positive"));
    }

    // (vi) scaling of the argument
    match e.homogeneity_degree() {
        Some(k) if scale > 0.0 && scale.is_finite() => {
            let h = f.rescale_argument(scale)?;
            let he = conj(&h, e, y)?;
            let e_over = e.clone().scaled(scale.powf(-k))?;
            out.push(checked(
                "conj-vi",
                worst_over(s, |j, sj| {
                    let rhs = e_conjugate_at(f, &e_over, scale * y, sj / scale)?;
                    Ok(abs_diff(he.values[j], rhs))
                })?,
            ));
        }
        Some(_) => out.push(skipped("conj-vi", "scale must be positive")),
        None => out.push(skipped("conj-vi", "kernel is not positively homogeneous")),
    }

    // (vii) Lipschitz dependence on the anchor
    out.push(lipschitz_item(f, e, &fe, y, y2)?);

    // (viii) convexity of the conjugacy map
    if !(weight > 0.0 && weight < 1.0) {
        out.push(skipped("conj-viii", "weight must lie in (0, 1)"));
    } else if f.grid() != g.grid() {
        out.push(skipped("conj-viii", "g is sampled on a different grid"));
    } else {
        let mix = f.scale(weight)?.add(&g.scale(1.0 - weight)?)?;
        let me = conj(&mix, e, y)?;
        let ge = conj(g, e, y)?;
        out.push(checked(
            "conj-viii",
            worst_over(s, |j, _| {
                let rhs = add_ext(fe.values[j].scale(weight), ge.values[j].scale(1.0 - weight));
                Ok(sub_ext(me.values[j], rhs))
            })?,
        ));
    }

    // (ix) biconjugate below f + e(·, y)
    let bic = if fe.is_proper() { Some(biconjugate_of(&fe, grid, Algorithm::Brute)?) } else { None };
    match &bic {
        Some(b) => {
            let p = grid.points();
            out.push(checked(
                "conj-ix",
                worst_over(p, |i, x| Ok(sub_ext(b.value(i), add_ext(f.value(i), e.eval(x, y)?))))?,
            ));
        }
        None => out.push(skipped("conj-ix", "conjugate is improper on the dual grid")),
    }

    // (x) biconjugate above f − e(·, y) where ∂ᵉf(x) meets the dual grid
    out.push(match &bic {
        None => skipped("conj-x", "conjugate is improper on the dual grid"),
        Some(b) => lower_biconjugate_item(f, e, y, dual, b)?,
    });
    Ok(out)
}

fn lipschitz_item(f: &SampledFunction, e: &ErrorFunction, fe: &ConjugateTable, y: f64, y2: f64) -> Result<ItemOutcome> {
    let fe2 = e_conjugate_brute(f, e, y2, &fe.dual_grid)?;
    let l = if y == y2 {
        ExtReal::ZERO
    } else {
        let anchors = Grid::uniform(y.min(y2), y.max(y2), 17)?;
        lipschitz_in_anchor(e, f.grid(), &anchors)?
    };
    let Some(l) = l.finite() else {
        return Ok(skipped("conj-vii", "kernel has no finite grid Lipschitz constant in the anchor"));
    };
    let bound = l * (y - y2).abs();
    Ok(checked(
        "conj-vii",
        worst_over(fe.dual_grid.points(), |j, _| Ok(abs_diff(fe.values[j], fe2.values[j]) - bound))?,
    ))
}

fn lower_biconjugate_item(
    f: &SampledFunction,
    e: &ErrorFunction,
    y: f64,
    dual: &Grid,
    bic: &SampledFunction,
) -> Result<ItemOutcome> {
    let report = validate_error(e, f.grid())?;
    if !report.triangle_ok {
        return Ok(skipped("conj-x", "kernel fails the triangle inequality on the grid"));
    }
    let mut r = ViolationReport::new(ProbeMode::Exhaustive);
    for i in f.domain() {
        let x = f.point(i);
        let iv = e_subdiff_interval(f, e, x)?;
        if !dual.points().iter().any(|&s| iv.contains(s)) {
            continue;
        }
        let lhs = sub_ext(f.value(i), e.eval(x, y)?);
        r.record(sub_ext(lhs, bic.value(i)), &[x]);
    }
    if r.checked_count == 0 {
        return Ok(skipped("conj-x", "no node has a dual-grid slope in its e-subdifferential"));
    }
    Ok(checked("conj-x", (r.max_violation, r.witness)))
}

/// Worst slack of the two conjugate stability bounds, where available.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StabilityReport {
    /// `|f*ₑ,ᵧ₁ − f*ₑ,ᵧ₂| − e(y₁, y₂)`, when `e` passes the triangle check.
    pub triangle: Option<ViolationReport>,
    /// `|f*ₑ,ᵧ₁ − f*ₑ,ᵧ₂| − max(k_{y₁}, k_{y₂})`, when both are finite.
    pub bounded: Option<ViolationReport>,
}

/// Both stability bounds at every dual node; witness `[s]`.
pub fn check_conjugate_stability(
    f: &SampledFunction,
    e: &ErrorFunction,
    y1: f64,
    y2: f64,
    dual_grid: &Grid,
) -> Result<StabilityReport> {
    let grid = f.grid();
    let triangle_ok = validate_error(e, grid)?.triangle_ok;
    let k = k_value(e, grid, y1)?.max(k_value(e, grid, y2)?);
    if !triangle_ok && !k.is_finite() {
        return Err(Error::NoApplicableStabilityBound);
    }
    let a = e_conjugate_brute(f, e, y1, dual_grid)?;
    let b = e_conjugate_brute(f, e, y2, dual_grid)?;
    let against = |bound: ExtReal| {
        let mut r = ViolationReport::new(ProbeMode::Exhaustive);
        for (j, &s) in dual_grid.points().iter().enumerate() {
            r.record(sub_ext(abs_diff(a.values[j], b.values[j]), bound), &[s]);
        }
        r
    };
    Ok(StabilityReport {
        triangle: if triangle_ok { Some(against(e.eval(y1, y2)?)) } else { None },
        bounded: if k.is_finite() { Some(against(k)) } else { None },
    })
}
