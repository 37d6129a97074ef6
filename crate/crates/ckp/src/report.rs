//! Named inequality check results.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The right-hand side was infinite or otherwise uninformative.
    Vacuous,
    /// A proved inequality came out negative beyond tolerance; this
    /// signals an implementation bug, never a disproof.
    BugSuspected,
}

/// One inequality check: LHS, RHS, margin = RHS - LHS, and the verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub status: Status,
    pub instance_digest: String,
    /// Full instance JSON, embedded on fail/bug reports for replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<serde_json::Value>,
}

impl CheckReport {
    pub fn evaluate(check_id: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        let status = if !rhs.is_finite() {
            Status::Vacuous
        } else if margin >= -tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            check_id: check_id.to_string(),
            lhs,
            rhs,
            margin,
            status,
            instance_digest: String::new(),
            instance: None,
        }
    }

    pub fn vacuous(check_id: &str, lhs: f64) -> Self {
        CheckReport {
            check_id: check_id.to_string(),
            lhs,
            rhs: f64::INFINITY,
            margin: f64::INFINITY,
            status: Status::Vacuous,
            instance_digest: String::new(),
            instance: None,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Vacuous)
    }
}
