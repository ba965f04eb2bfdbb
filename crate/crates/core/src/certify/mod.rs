//! Empirical certification: Picard iteration, first-hit indices and sampled
//! checks of every inequality behind the rate.
//!
//! Each suite produces a [`CertReport`]. A report fails only on a genuine
//! violation; checks that could not be decided (a first-hit search that ran
//! out of budget below the rate, an empty filtered sample) are counted as
//! inconclusive.

mod picard;
mod runner;
mod suites;

use serde::Serialize;
use serde_json::Value;

pub use picard::{first_hit_index, run_picard, run_picard_keep, Hit, Trajectory};
pub use runner::{derive_seed, run_certification, standard_sources, CatalogueEntry, CertConfig, Suite};
pub use suites::{
    check_averaged_correspondence, check_rate, check_rate_with, check_rectangularity, check_sne_modulus,
    check_sne_rotation_family, check_uc_lemma, check_witness,
};

use crate::error::{Error, Result};
use crate::operators::Vector;

/// Absolute slack on every sampled inequality.
pub const DEFAULT_SLACK: f64 = 1e-9;

/// Violations kept verbatim in a report; the rest are only counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 100;

/// Whether suites compare against the real bound or a deliberately false one
/// (used to check that the harness can fail).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    #[default]
    Genuine,
    Falsified,
}

/// Value substituted for every bound in falsified mode; all checked
/// quantities are nonnegative, so it is always exceeded.
pub const FALSIFIED_BOUND: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub slack: f64,
    pub mode: BoundMode,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            slack: DEFAULT_SLACK,
            mode: BoundMode::Genuine,
        }
    }
}

impl SuiteOptions {
    pub fn falsified() -> Self {
        SuiteOptions {
            mode: BoundMode::Falsified,
            ..Self::default()
        }
    }

    fn bound(&self, genuine: f64) -> f64 {
        match self.mode {
            BoundMode::Genuine => genuine,
            BoundMode::Falsified => FALSIFIED_BOUND,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.slack.is_finite() && self.slack >= 0.0) {
            return Err(Error::invalid("slack must be finite and nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampler {
    pub count: usize,
    pub norm_cap: f64,
    pub seed: u64,
}

impl Sampler {
    pub fn new(count: usize, norm_cap: f64, seed: u64) -> Result<Self> {
        let s = Sampler { count, norm_cap, seed };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        if !(self.norm_cap.is_finite() && self.norm_cap > 0.0) {
            return Err(Error::invalid("norm cap must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// No violation, but nothing could be decided either.
    Inconclusive,
    /// The suite itself failed to run.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub inputs: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// A point with small displacement found by iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub p: Vector,
    /// `‖p − Rp‖` as computed.
    pub delta: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub suite: String,
    pub instance: String,
    pub seed: u64,
    pub samples: u64,
    pub conclusive: u64,
    pub inconclusive: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub status: Status,
    /// True iff there are no violations and the suite ran.
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl CertReport {
    /// Report for a suite that could not run.
    pub fn crashed(suite: &str, instance: &str, seed: u64, err: &Error) -> Self {
        CertReport {
            suite: suite.into(),
            instance: instance.into(),
            seed,
            samples: 0,
            conclusive: 0,
            inconclusive: 0,
            violation_count: 0,
            violations: Vec::new(),
            status: Status::Error,
            pass: false,
            error: Some(err.to_string()),
            details: Vec::new(),
            runtime_ms: None,
        }
    }
}

/// Accumulates sampled checks for one report.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    samples: u64,
    conclusive: u64,
    inconclusive: u64,
    violation_count: u64,
    violations: Vec<Violation>,
    details: Vec<Value>,
    slack: f64,
}

impl Tally {
    pub(crate) fn new(opts: &SuiteOptions) -> Self {
        Tally {
            slack: opts.slack,
            ..Self::default()
        }
    }

    pub(crate) fn sample(&mut self) {
        self.samples += 1;
    }

    pub(crate) fn inconclusive(&mut self) {
        self.inconclusive += 1;
    }

    /// A decided check of `lhs ≤ rhs + slack`.
    pub(crate) fn check_le(&mut self, lhs: f64, rhs: f64, inputs: impl FnOnce() -> Value) {
        self.conclusive += 1;
        if !(lhs <= rhs + self.slack) {
            self.violate(lhs, rhs, inputs());
        }
    }

    /// A decided check of `lhs < rhs + slack`.
    pub(crate) fn check_lt(&mut self, lhs: f64, rhs: f64, inputs: impl FnOnce() -> Value) {
        self.conclusive += 1;
        if !(lhs < rhs + self.slack) {
            self.violate(lhs, rhs, inputs());
        }
    }

    /// A decided check whose outcome was computed elsewhere.
    pub(crate) fn record(&mut self, ok: bool, lhs: f64, rhs: f64, inputs: impl FnOnce() -> Value) {
        self.conclusive += 1;
        if !ok {
            self.violate(lhs, rhs, inputs());
        }
    }

    fn violate(&mut self, lhs: f64, rhs: f64, inputs: Value) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(Violation {
                inputs,
                lhs,
                rhs,
                slack: self.slack,
            });
        }
    }

    pub(crate) fn detail(&mut self, v: Value) {
        self.details.push(v);
    }

    pub(crate) fn finish(self, suite: &str, instance: &str, seed: u64) -> CertReport {
        let status = if self.violation_count > 0 {
            Status::Fail
        } else if self.conclusive == 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        CertReport {
            suite: suite.into(),
            instance: instance.into(),
            seed,
            samples: self.samples,
            conclusive: self.conclusive,
            inconclusive: self.inconclusive,
            violation_count: self.violation_count,
            violations: self.violations,
            status,
            pass: self.violation_count == 0,
            error: None,
            details: self.details,
            runtime_ms: None,
        }
    }
}
