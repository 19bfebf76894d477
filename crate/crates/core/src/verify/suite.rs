//! Randomized suite running every property check on e-convex instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::errorfn::ErrorFunction;
use crate::extreal::{sub_ext, ExtReal};
use crate::funcmodel::{Grid, RealFunction, SampledFunction};
use crate::report::{DINI_TOL, INEQUALITY_TOL, STRUCTURAL_TOL};
use crate::subdiff::{check_e_monotone, e_subdiff_interval, OperatorSample};
use crate::transform::{default_dual_grid, e_conjugate_brute, e_conjugate_fast};

use super::conjugacy::{
    check_conjugate_properties, check_conjugate_stability, check_three_way_equivalence, fenchel_young_gap,
    ConjugacyInstance, ItemOutcome, EXTERIOR_OFFSET, ITEM_IDS,
};
use super::econvex::{check_char_slopes, check_dini_bound, check_e_convex_def, e_convex_violation, pair_grid, TMode};
use super::optimality::check_sum_conjugate_infconv;
use super::{PropertyRecord, SuiteReport};

/// Every property the suite reports, in output order.
pub const PROPERTY_IDS: [&str; 24] = [
    "econvex-def",
    "char-slopes",
    "witness-reproduction",
    "oracle-fast-brute",
    "conj-convexity",
    "fenchel-young",
    "three-way",
    "conj-i",
    "conj-ii",
    "conj-iii",
    "conj-iv",
    "conj-v",
    "conj-vi",
    "conj-vii",
    "conj-viii",
    "conj-ix",
    "conj-x",
    "stability-triangle",
    "stability-bounded",
    "infconv",
    "dini-bound",
    "gradient-inequality",
    "gradient-2e-monotone",
    "subdiff-nonempty",
];

fn tolerance(id: &str) -> f64 {
    match id {
        "oracle-fast-brute" | "witness-reproduction" => STRUCTURAL_TOL,
        "fenchel-young" | "three-way" | "subdiff-nonempty" => 0.0,
        "dini-bound" => DINI_TOL,
        _ => INEQUALITY_TOL,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    /// Nodes of the primal grid on `[-2, 2]`.
    pub nodes: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 42, instances: 500, nodes: 41 }
    }
}

/// `a x² + b sin(ω x + φ) + d x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomFixture {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    pub phi: f64,
    pub d: f64,
}

impl RandomFixture {
    pub fn value(&self, x: f64) -> f64 {
        self.a * x * x + self.b * (self.omega * x + self.phi).sin() + self.d * x
    }

    pub fn derivative(&self, x: f64) -> f64 {
        2.0 * self.a * x + self.b * self.omega * (self.omega * x + self.phi).cos() + self.d
    }

    /// Smallest `c` with `f + c x²` convex.
    pub fn semiconvexity(&self) -> f64 {
        (self.b.abs() * self.omega * self.omega / 2.0 - self.a).max(0.0)
    }

    /// Lipschitz constant on `[-r, r]`.
    pub fn lipschitz(&self, r: f64) -> f64 {
        2.0 * self.a.abs() * r + self.b.abs() * self.omega + self.d.abs()
    }
}

impl RealFunction for RandomFixture {
    fn eval(&self, x: f64) -> Result<ExtReal> {
        Ok(ExtReal::of(self.value(x)))
    }
}

/// Instance `index` of the suite: a fixture, a kernel under which it is
/// e-convex, and an interior anchor node.
pub fn random_instance(seed: u64, index: usize, nodes: usize) -> Result<(RandomFixture, ErrorFunction, SampledFunction, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let grid = Grid::uniform(-2.0, 2.0, nodes)?;
    let convex = index.is_multiple_of(3);
    let fx = RandomFixture {
        a: if convex { rng.gen_range(0.1..1.0) } else { rng.gen_range(-1.0..1.0) },
        b: if convex { 0.0 } else { rng.gen_range(-1.0..1.0) },
        omega: rng.gen_range(0.5..3.0),
        phi: rng.gen_range(0.0..std::f64::consts::TAU),
        d: rng.gen_range(-1.0..1.0),
    };
    let e = match index % 3 {
        0 => ErrorFunction::Zero,
        1 => ErrorFunction::quadratic(fx.semiconvexity() + 0.1 + rng.gen_range(0.0..1.0))?,
        _ => ErrorFunction::scaled_distance(fx.lipschitz(2.0) + rng.gen_range(0.0..0.5))?,
    };
    let f = SampledFunction::from_fn(grid, |x| fx.value(x))?;
    let y = f.point(rng.gen_range(5..nodes - 5));
    Ok((fx, e, f, y))
}

type Outcome = std::result::Result<(ExtReal, Vec<f64>), String>;

fn worst_second_difference(v: &[ExtReal]) -> (ExtReal, Vec<f64>) {
    let mut worst = (ExtReal::NEG_INF, Vec::new());
    for j in 1..v.len().saturating_sub(1) {
        if let (Some(a), Some(b), Some(c)) = (v[j - 1].finite(), v[j].finite(), v[j + 1].finite()) {
            let dd = -(a - 2.0 * b + c);
            if ExtReal::of(dd) > worst.0 {
                worst = (ExtReal::of(dd), vec![j as f64]);
            }
        }
    }
    worst
}

fn evaluate(seed: u64, index: usize, nodes: usize) -> Result<Vec<(&'static str, Outcome)>> {
    let (fx, e, f, y) = random_instance(seed, index, nodes)?;
    let grid = f.grid().clone();
    let mut out: Vec<(&'static str, Outcome)> = Vec::new();
    let mut push = |id: &'static str, o: Outcome| out.push((id, o));

    let def = check_e_convex_def(&f, &e, &TMode::AllNodeTriples)?;
    push("econvex-def", Ok((def.max_violation, def.witness.clone())));
    let ch = check_char_slopes(&f, &e)?;
    push("char-slopes", Ok((ch.max_violation, ch.witness.clone())));
    let w = &def.witness;
    let again = e_convex_violation(&f, &e, w[0], w[1], w[2])?;
    push("witness-reproduction", Ok((sub_ext(again, def.max_violation).abs(), w.clone())));

    let dual = default_dual_grid(&f, &e, y)?;
    let brute = e_conjugate_brute(&f, &e, y, &dual)?;
    let fast = e_conjugate_fast(&f, &e, y, &dual)?;
    push("oracle-fast-brute", Ok((brute.max_abs_diff(&fast), vec![y])));
    push("conj-convexity", Ok(worst_second_difference(&brute.values)));

    // Fenchel–Young at the anchor node: members give zero gap, exterior
    // probes a positive one. Positive record values are mismatches.
    let iv = e_subdiff_interval(&f, &e, y)?;
    push("subdiff-nonempty", Ok((ExtReal::of(if iv.empty { 1.0 } else { 0.0 }), vec![y])));
    if !iv.empty {
        let (lo, hi) = (iv.lower.value(), iv.upper.value());
        let mut worst = (ExtReal::NEG_INF, Vec::new());
        for (s, member) in [(lo, true), (hi, true), (0.5 * (lo + hi), true), (lo - EXTERIOR_OFFSET, false), (hi + EXTERIOR_OFFSET, false)] {
            let gap = fenchel_young_gap(&f, &e, y, s)?;
            let mismatch = if member { gap - INEQUALITY_TOL } else { ExtReal::of(1e-6) - gap };
            let mismatch = mismatch.max(ExtReal::of(-STRUCTURAL_TOL) - gap);
            if mismatch > worst.0 {
                worst = (mismatch, vec![y, s]);
            }
        }
        push("fenchel-young", Ok(worst));
    } else {
        push("fenchel-young", Err("e-subdifferential at the anchor is empty".into()));
    }

    let tw = check_three_way_equivalence(&f, &e, y, &dual)?;
    let bad = tw.probes.iter().filter(|p| !p.agrees()).count();
    let first_bad = tw.probes.iter().find(|p| !p.agrees()).map(|p| vec![y, p.xstar]).unwrap_or_default();
    push("three-way", Ok((ExtReal::of(bad as f64), first_bad)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
    let g = f.zip_with(&SampledFunction::from_fn(grid.clone(), |x| 0.5 + 0.2 * x * x)?, |a, b| a + b)?;
    let inst = ConjugacyInstance {
        f: f.clone(),
        g: g.clone(),
        e: e.clone(),
        e_prime: e.clone().sum(ErrorFunction::quadratic(0.5)?),
        y,
        y2: f.point(rng.gen_range(5..nodes - 5)),
        shift: rng.gen_range(-3.0..3.0),
        scale: rng.gen_range(0.5..2.0),
        weight: rng.gen_range(0.1..0.9),
        dual: dual.clone(),
    };
    for item in check_conjugate_properties(&inst)? {
        match item {
            ItemOutcome::Checked { id, gap, witness, .. } => push(id, Ok((gap, witness))),
            ItemOutcome::Skipped { id, reason } => push(id, Err(reason)),
        }
    }

    match check_conjugate_stability(&f, &e, y, inst.y2, &dual) {
        Ok(r) => {
            for (id, v) in [("stability-triangle", r.triangle), ("stability-bounded", r.bounded)] {
                match v {
                    Some(v) => push(id, Ok((v.max_violation, v.witness))),
                    None => push(id, Err(format!("{} kernel has no such bound", e.kind_name()))),
                }
            }
        }
        Err(err) => {
            push("stability-triangle", Err(err.to_string()));
            push("stability-bounded", Err(err.to_string()));
        }
    }

    let xstar = fx.derivative(y) + rng.gen_range(-1.0..1.0);
    let ic = check_sum_conjugate_infconv(&f, &g, &e, &e, y, xstar, &dual)?;
    push("infconv", Ok((sub_ext(ic.lhs, ic.rhs), vec![y, xstar])));

    let pairs = pair_grid(-1.0, 1.0, 6)?;
    let db = check_dini_bound(&fx, &e, &pairs)?;
    push("dini-bound", Ok((db.report.max_violation, db.report.witness)));

    // gradient inequality and 2e-monotonicity of the sampled gradient
    let mut worst = (ExtReal::NEG_INF, Vec::new());
    for &a in grid.points() {
        for &b in grid.points() {
            let v = ExtReal::of(fx.derivative(a) * (b - a) - (fx.value(b) - fx.value(a))) - e.eval(a, b)?;
            if v > worst.0 {
                worst = (v, vec![a, b]);
            }
        }
    }
    push("gradient-inequality", Ok(worst));
    let grad = OperatorSample::from_fn(grid.points(), |x| fx.derivative(x))?;
    let m = check_e_monotone(&grad, &e, 2.0)?;
    push("gradient-2e-monotone", Ok((m.max_violation, m.witness)));

    debug_assert!(ITEM_IDS.iter().all(|id| out.iter().any(|(i, _)| i == id)));
    Ok(out)
}

/// Runs every property on `instances` random instances (in parallel, folded
/// in instance order).
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let results: Vec<_> = (0..config.instances)
        .into_par_iter()
        .map(|i| (i, evaluate(config.seed, i, config.nodes)))
        .collect();
    let mut records: Vec<PropertyRecord> = PROPERTY_IDS.iter().map(|id| PropertyRecord::new(id, tolerance(id))).collect();
    for (i, r) in results {
        match r {
            Ok(outcomes) => {
                for (id, o) in outcomes {
                    let rec = records.iter_mut().find(|r| r.id == id).expect("registered property");
                    match o {
                        Ok((gap, w)) => rec.observe(gap, &w, Some(i)),
                        Err(reason) => rec.skip(&reason),
                    }
                }
            }
            Err(err) => {
                // an unexpected error invalidates the whole instance
                for rec in &mut records {
                    rec.error(format!("instance {i}: {err}"), Some(i));
                }
            }
        }
    }
    for rec in &mut records {
        rec.finish();
    }
    SuiteReport { seed: config.seed, instances: config.instances, records }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let r = run_suite(&SuiteConfig { seed: 7, instances: 12, nodes: 31 });
        assert_eq!(r.records.len(), PROPERTY_IDS.len());
        for rec in &r.records {
            assert_ne!(rec.status, super::super::Status::Fail, "{rec:?}");
        }
        assert!(r.all_passed());
    }

    #[test]
    fn instances_are_e_convex() {
        for i in 0..30 {
            let (_, e, f, _) = random_instance(1, i, 31).unwrap();
            let r = check_e_convex_def(&f, &e, &TMode::AllNodeTriples).unwrap();
            assert!(r.passes(INEQUALITY_TOL), "instance {i}: {r:?}");
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let c = SuiteConfig { seed: 3, instances: 4, nodes: 21 };
        assert_eq!(run_suite(&c), run_suite(&c));
    }
}
