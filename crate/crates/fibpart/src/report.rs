//! Result type shared by the bounded identity checkers.

use serde::Serialize;

/// Default cap on recorded counterexamples per identity.
pub const FAILURE_CAP: usize = 10;

/// A single failing input, with enough context to replay it by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureWitness {
    /// Input at which the identity broke.
    pub input: i128,
    /// Human-readable detail, usually the two sides that disagreed.
    pub detail: String,
}

/// Outcome of checking one named identity over a range.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityOutcome {
    pub name: String,
    /// Number of inputs that satisfied the identity.
    pub passed: u64,
    /// Recorded counterexamples, capped at [`FAILURE_CAP`].
    pub failures: Vec<FailureWitness>,
    /// Total number of failing inputs, including ones beyond the cap.
    pub failure_count: u64,
}

/// Aggregate result of a bounded verification run.
///
/// `is_pass()` holds exactly when no identity recorded a failure.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// Upper end of the checked input range (inclusive).
    pub checked_range: i128,
    pub identities: Vec<IdentityOutcome>,
}

impl IdentityOutcome {
    pub fn new(name: impl Into<String>) -> Self {
        IdentityOutcome {
            name: name.into(),
            passed: 0,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    pub fn record_pass(&mut self) {
        self.passed += 1;
    }

    pub fn record_failure(&mut self, input: i128, detail: impl Into<String>) {
        self.failure_count += 1;
        if self.failures.len() < FAILURE_CAP {
            self.failures.push(FailureWitness {
                input,
                detail: detail.into(),
            });
        }
    }

    pub fn is_pass(&self) -> bool {
        self.failure_count == 0
    }

    /// Merge a partial outcome for the same identity (used by chunked runs).
    pub fn absorb(&mut self, other: IdentityOutcome) {
        debug_assert_eq!(self.name, other.name);
        self.passed += other.passed;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < FAILURE_CAP {
                self.failures.push(f);
            }
        }
    }
}

impl IdentityReport {
    pub fn new(checked_range: i128) -> Self {
        IdentityReport {
            checked_range,
            identities: Vec::new(),
        }
    }

    pub fn push(&mut self, outcome: IdentityOutcome) {
        self.identities.push(outcome);
    }

    pub fn is_pass(&self) -> bool {
        self.identities.iter().all(IdentityOutcome::is_pass)
    }

    /// First recorded counterexample across all identities, if any.
    pub fn first_counterexample(&self) -> Option<(&str, &FailureWitness)> {
        self.identities
            .iter()
            .find(|o| !o.failures.is_empty())
            .map(|o| (o.name.as_str(), &o.failures[0]))
    }

    pub fn outcome(&self, name: &str) -> Option<&IdentityOutcome> {
        self.identities.iter().find(|o| o.name == name)
    }
}
