//! Structured pass/fail certificates.
//!
//! Every numerical claim the crate verifies is reported as a certificate
//! binding a named inequality to its computed left/right sides and the
//! tolerance it was checked at. Status is determined solely by
//! lhs <= rhs + tolerance; hypothesis failures are reported as
//! `not-applicable` rather than silently skipped.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    /// Stable dotted identifier, e.g. "descent.containment.k0".
    pub name: String,
    /// Human-readable statement of the checked inequality.
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub status: CertStatus,
    /// Extra context: witnesses, measured constants, counts.
    #[serde(skip_serializing_if = "serde_json::Value::is_null", default)]
    pub witness: serde_json::Value,
}

impl Certificate {
    /// Checks `lhs <= rhs + tolerance`.
    pub fn check_le(
        name: impl Into<String>,
        statement: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let status = if lhs <= rhs + tolerance {
            CertStatus::Pass
        } else {
            CertStatus::Fail
        };
        Certificate {
            name: name.into(),
            statement: statement.into(),
            lhs,
            rhs,
            tolerance,
            status,
            witness: serde_json::Value::Null,
        }
    }

    /// Checks `|lhs - rhs| <= tolerance * max(1, |rhs|)` as an equality claim,
    /// reported with the absolute difference on the left.
    pub fn check_eq(
        name: impl Into<String>,
        statement: impl Into<String>,
        lhs: f64,
        rhs: f64,
        rel_tolerance: f64,
    ) -> Self {
        let tol = rel_tolerance * rhs.abs().max(1.0);
        let mut c = Certificate::check_le(name, statement, (lhs - rhs).abs(), 0.0, tol);
        c.lhs = lhs;
        c.rhs = rhs;
        c.status = if (lhs - rhs).abs() <= tol {
            CertStatus::Pass
        } else {
            CertStatus::Fail
        };
        c
    }

    pub fn not_applicable(
        name: impl Into<String>,
        statement: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        Certificate {
            name: name.into(),
            statement: statement.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            tolerance: 0.0,
            status: CertStatus::NotApplicable,
            witness: serde_json::json!({ "reason": reason.into() }),
        }
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CertStatus::Fail
    }
}

/// A versioned bundle of certificates, serialized deterministically.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub input: String,
    pub seed: u64,
    pub certificates: Vec<Certificate>,
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
}

impl Report {
    pub fn new(input: impl Into<String>, seed: u64, certificates: Vec<Certificate>) -> Self {
        let passed = certificates
            .iter()
            .filter(|c| c.status == CertStatus::Pass)
            .count();
        let failed = certificates
            .iter()
            .filter(|c| c.status == CertStatus::Fail)
            .count();
        let not_applicable = certificates
            .iter()
            .filter(|c| c.status == CertStatus::NotApplicable)
            .count();
        Report {
            schema: 1,
            input: input.into(),
            seed,
            certificates,
            passed,
            failed,
            not_applicable,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}
