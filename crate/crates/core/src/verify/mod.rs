//! Machine checks of the e-convexity theory on concrete grid instances.

mod conjugacy;
mod econvex;
mod optimality;
mod sigma;
mod suite;

use serde::{Deserialize, Serialize};

use crate::extreal::ExtReal;

pub use conjugacy::{
    check_conjugate_properties, check_conjugate_stability, check_three_way_equivalence, fenchel_young_gap,
    ConjugacyInstance, EquivalenceProbe, ItemOutcome, StabilityReport, ThreeWayReport, EXTERIOR_OFFSET, ITEM_IDS,
};
pub use econvex::{
    char_slopes_violation, check_char_slopes, check_char_slopes_seeded, check_dini_bound, check_dini_bound_directed,
    check_e_convex_def, check_e_convex_def_seeded, check_gradient_inequality, dini_bound_holds, e_convex_violation,
    pair_grid, sampled_gradient, DiniBoundReport, TMode, EXHAUSTIVE_NODE_CAP, PROBE_SEED, SAMPLED_PROBES,
};
pub use optimality::{
    certify_global_min, certify_local_min, check_subdiff_inclusion, check_sum_conjugate_infconv, is_local_min,
    GlobalCertificate, Inclusion, InfConvReport, LocalCertificate, LOCAL_WINDOW,
};
pub use sigma::{sigma_lower_bound, SigmaBound, SIGMA_TS};
pub use suite::{random_instance, run_suite, RandomFixture, SuiteConfig, PROPERTY_IDS};

/// Outcome of one property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

/// One line of a [`SuiteReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub id: String,
    pub status: Status,
    pub worst_gap: ExtReal,
    pub witness: Vec<f64>,
    /// Index of the instance the witness comes from.
    pub witness_instance: Option<usize>,
    pub tolerance: f64,
    /// Instances on which the property was evaluated.
    pub checked: usize,
    /// Instances on which a precondition failed, with the distinct reasons.
    pub skipped: usize,
    pub skip_reasons: Vec<String>,
    pub failures: usize,
    /// Errors raised while evaluating the property; each counts as a failure.
    pub errors: Vec<String>,
}

impl PropertyRecord {
    pub fn new(id: &str, tolerance: f64) -> Self {
        PropertyRecord {
            id: id.to_string(),
            status: Status::Pass,
            worst_gap: ExtReal::NEG_INF,
            witness: Vec::new(),
            witness_instance: None,
            tolerance,
            checked: 0,
            skipped: 0,
            skip_reasons: Vec::new(),
            failures: 0,
            errors: Vec::new(),
        }
    }

    /// Folds in one evaluation with worst gap `gap`; fails above tolerance.
    pub fn observe(&mut self, gap: ExtReal, witness: &[f64], instance: Option<usize>) {
        self.checked += 1;
        if self.checked == 1 || gap > self.worst_gap {
            self.worst_gap = gap;
            self.witness = witness.to_vec();
            self.witness_instance = instance;
        }
        if gap > ExtReal::of(self.tolerance) {
            self.failures += 1;
        }
    }

    pub fn error(&mut self, message: String, instance: Option<usize>) {
        self.observe(ExtReal::POS_INF, &[], instance);
        self.errors.push(message);
    }

    pub fn skip(&mut self, reason: &str) {
        self.skipped += 1;
        if !self.skip_reasons.iter().any(|r| r == reason) {
            self.skip_reasons.push(reason.to_string());
        }
    }

    /// Sets the status from the counts.
    pub fn finish(&mut self) {
        self.status = if self.failures > 0 {
            Status::Fail
        } else if self.checked == 0 {
            Status::Skipped(self.skip_reasons.join("; "))
        } else {
            Status::Pass
        };
    }
}

/// Per-property results of a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub instances: usize,
    pub records: Vec<PropertyRecord>,
}

impl SuiteReport {
    /// True when no evaluated property failed.
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn record(&self, id: &str) -> Option<&PropertyRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Fixed-width text table, one property per line.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<24} {:<8} {:>12} {:>8} {:>8} {:>8}\n",
            "property", "status", "worst_gap", "checked", "skipped", "failed"
        );
        for r in &self.records {
            let status = match &r.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped(_) => "skipped",
            };
            out += &format!(
                "{:<24} {:<8} {:>12.3e} {:>8} {:>8} {:>8}\n",
                r.id,
                status,
                r.worst_gap.value(),
                r.checked,
                r.skipped,
                r.failures
            );
        }
        out
    }
}
