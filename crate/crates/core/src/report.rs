use std::fmt::Debug;
use std::time::Instant;

use serde::Serialize;

use crate::par::Exec;

/// Failures kept per law; the remainder is only counted.
pub const MAX_FAILURES_PER_LAW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    #[default]
    Exact,
    /// Checked by fuel-bounded bisimilarity rather than decidable equality.
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub law: String,
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
}

impl Failure {
    pub fn new(law: &str, instance: impl Into<String>, lhs: impl Debug, rhs: impl Debug) -> Self {
        Failure {
            law: law.to_string(),
            instance: instance.into(),
            lhs: format!("{lhs:?}"),
            rhs: format!("{rhs:?}"),
        }
    }
}

/// Outcome of a law suite. `failures` is empty iff the suite passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub suite: String,
    pub instances: u64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    /// Failures beyond [`MAX_FAILURES_PER_LAW`] that were counted but not kept.
    #[serde(skip_serializing_if = "is_zero")]
    pub truncated: u64,
    /// Regions of the instance space not checked because they exceed the budget.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    #[serde(skip_serializing_if = "is_exact")]
    pub exactness: Exactness,
    #[serde(skip)]
    started: Option<Instant>,
}

fn is_zero(n: &u64) -> bool {
    *n == 0
}

fn is_exact(e: &Exactness) -> bool {
    *e == Exactness::Exact
}

impl LawReport {
    pub fn new(suite: &str) -> Self {
        LawReport {
            suite: suite.to_string(),
            instances: 0,
            failures: Vec::new(),
            elapsed_ms: None,
            truncated: 0,
            skipped: Vec::new(),
            exactness: Exactness::Exact,
            started: Some(Instant::now()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.truncated == 0
    }

    /// Record `checked` instances of a law together with the failures found.
    pub fn record(&mut self, checked: u64, failures: Vec<Failure>) {
        self.instances += checked;
        for f in failures {
            let kept = self.failures.iter().filter(|g| g.law == f.law).count();
            if kept < MAX_FAILURES_PER_LAW {
                self.failures.push(f);
            } else {
                self.truncated += 1;
            }
        }
    }

    pub fn check(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        let failures = if ok { Vec::new() } else { vec![failure()] };
        self.record(1, failures);
    }

    pub fn skip(&mut self, region: impl Into<String>) {
        self.skipped.push(region.into());
    }

    pub fn mark_bounded(&mut self) {
        self.exactness = Exactness::Bounded;
    }

    pub fn merge(&mut self, other: LawReport) {
        self.record(other.instances, other.failures);
        self.truncated += other.truncated;
        self.skipped.extend(other.skipped);
        if other.exactness == Exactness::Bounded {
            self.exactness = Exactness::Bounded;
        }
    }

    /// Failures recorded for one law.
    pub fn failures_of<'a>(&'a self, law: &'a str) -> impl Iterator<Item = &'a Failure> + 'a {
        self.failures.iter().filter(move |f| f.law == law)
    }

    /// Stamp the wall-clock time since construction.
    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started {
            self.elapsed_ms = Some(t.elapsed().as_millis() as u64);
        }
        self
    }

    /// Drop timing so that repeated runs serialize identically.
    pub fn deterministic(mut self) -> Self {
        self.elapsed_ms = None;
        self
    }
}

/// Instance-space bounds shared by the exhaustive suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Largest size of any enumerated set, except where a law is specified
    /// one or two sizes further.
    pub max_size: usize,
    /// Seed for the randomized suites.
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_size: 2,
            seed: 0,
            exec: Exec::Parallel,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_capped_per_law() {
        let mut r = LawReport::new("t");
        let fs = (0..60).map(|i| Failure::new("A", i.to_string(), 0, 1)).collect();
        r.record(60, fs);
        r.record(1, vec![Failure::new("B", "x", 0, 1)]);
        assert_eq!(r.instances, 61);
        assert_eq!(r.failures.len(), MAX_FAILURES_PER_LAW + 1);
        assert_eq!(r.truncated, 10);
        assert!(!r.passed());
    }
}
