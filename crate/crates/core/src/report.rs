//! Worst-case violation reports shared by the checking routines.

use serde::{Deserialize, Serialize};

use crate::extreal::ExtReal;

/// Inequality checks pass when the worst violation is at most this.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Structural identities (symmetry, brute-vs-fast agreement).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Checks built on limsup estimates.
pub const DINI_TOL: f64 = 1e-6;

/// How the probe set of a check was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ProbeMode {
    Exhaustive,
    Sampled { seed: u64 },
}

/// Worst violation of an inequality `lhs ≤ rhs` over a probe set, measured
/// as `lhs − rhs`; nonpositive means the inequality held everywhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub max_violation: ExtReal,
    /// Coordinates of the probe achieving `max_violation`; their meaning is
    /// documented on each check.
    pub witness: Vec<f64>,
    pub checked_count: usize,
    pub mode: ProbeMode,
}

impl ViolationReport {
    pub fn new(mode: ProbeMode) -> Self {
        ViolationReport {
            max_violation: ExtReal::NEG_INF,
            witness: Vec::new(),
            checked_count: 0,
            mode,
        }
    }

    /// Records one probe. Strictly larger violations replace the witness, so
    /// the first probe in iteration order wins ties.
    pub fn record(&mut self, violation: ExtReal, witness: &[f64]) {
        self.checked_count += 1;
        if self.checked_count == 1 || violation > self.max_violation {
            self.max_violation = violation;
            self.witness = witness.to_vec();
        }
    }

    /// Folds another report into this one (the earlier report wins ties).
    pub fn merge(&mut self, other: ViolationReport) {
        let take = other.checked_count > 0
            && (self.checked_count == 0 || other.max_violation > self.max_violation);
        self.checked_count += other.checked_count;
        if take {
            self.max_violation = other.max_violation;
            self.witness = other.witness;
        }
        if let ProbeMode::Sampled { .. } = other.mode {
            self.mode = other.mode;
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= ExtReal::of(tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_worst_probe_is_kept() {
        let mut r = ViolationReport::new(ProbeMode::Exhaustive);
        r.record(ExtReal::of(-1.0), &[0.0]);
        r.record(ExtReal::of(2.0), &[1.0]);
        r.record(ExtReal::of(2.0), &[2.0]);
        assert_eq!(r.max_violation, 2.0);
        assert_eq!(r.witness, vec![1.0]);
        assert_eq!(r.checked_count, 3);
        assert!(!r.passes(1e-9));
    }

    #[test]
    fn empty_report_passes_vacuously() {
        let r = ViolationReport::new(ProbeMode::Exhaustive);
        assert!(r.passes(0.0));
        assert_eq!(r.checked_count, 0);
    }
}
