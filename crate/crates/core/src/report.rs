//! Machine-readable verification reports.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one check: what was compared, the evidence, and every
/// discrepancy found. The status is `fail` exactly when `diff` is nonempty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub theorem: String,
    pub parameters: Value,
    pub status: Status,
    pub witnesses: Vec<Value>,
    pub diff: Vec<Value>,
}

impl Report {
    pub fn new(theorem: impl Into<String>, parameters: Value) -> Self {
        Report {
            theorem: theorem.into(),
            parameters,
            status: Status::Pass,
            witnesses: Vec::new(),
            diff: Vec::new(),
        }
    }

    pub fn witness(&mut self, v: Value) {
        self.witnesses.push(v);
    }

    pub fn mismatch(&mut self, v: Value) {
        self.diff.push(v);
        self.status = Status::Fail;
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
