//! Machine-readable verification reports.
//!
//! Every property suite produces a flat list of [`Check`] entries; a failing
//! check always carries a rendered witness. Reports are deterministic for a
//! fixed (config, seed) pair: entries are sorted before serialization.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: String,
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub ms: u128,
}

impl Check {
    pub fn pass(suite: &str, name: &str) -> Self {
        Check {
            suite: suite.to_string(),
            check: name.to_string(),
            status: Status::Pass,
            witness: None,
            ms: 0,
        }
    }

    pub fn fail(suite: &str, name: &str, witness: String) -> Self {
        Check {
            suite: suite.to_string(),
            check: name.to_string(),
            status: Status::Fail,
            witness: Some(witness),
            ms: 0,
        }
    }

    pub fn skipped(suite: &str, name: &str, reason: String) -> Self {
        Check {
            suite: suite.to_string(),
            check: name.to_string(),
            status: Status::Skipped,
            witness: Some(reason),
            ms: 0,
        }
    }

    /// Attach a witness to a passing or failing check.
    pub fn with_witness(mut self, w: String) -> Self {
        self.witness = Some(w);
        self
    }

    /// Pass/fail from a predicate, with the witness used only on failure.
    pub fn verdict(suite: &str, name: &str, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Check::pass(suite, name)
        } else {
            Check::fail(suite, name, witness())
        }
    }
}

/// Run metadata recorded with every report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    /// Spectral exponents are restricted to rationals in this build.
    pub alpha_policy: &'static str,
    pub conductor_cap: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub entries: Vec<Check>,
}

impl VerificationReport {
    pub fn new(seed: u64) -> Self {
        VerificationReport {
            meta: ReportMeta {
                alpha_policy: "rational-exponents-only",
                conductor_cap: crate::scalar::conductor_cap(),
                seed,
                margin_note: None,
            },
            entries: Vec::new(),
        }
    }

    pub fn extend(&mut self, checks: Vec<Check>) {
        self.entries.extend(checks);
    }

    /// Sort entries for byte-stable output.
    pub fn finalize(&mut self) {
        self.entries
            .sort_by(|a, b| (&a.suite, &a.check).cmp(&(&b.suite, &b.check)));
    }

    pub fn failed(&self) -> usize {
        self.entries
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
