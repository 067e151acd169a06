use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Absolute tolerance for strict inequalities unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ExistenceCertified,
    NonexistenceCertified,
    Inconclusive,
}

/// Whether a verdict is valid at the given `λ` or only for `λ` sufficiently
/// negative (no computable threshold).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    AtGivenLambda,
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Side 1 carries the smaller energy; modes of `V₁` decaying at `−∞`.
    Forward,
    /// Side 2 carries the smaller energy; modes of `V₂` decaying at `+∞`.
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `c₁ ≤ c₂`: shift `w₁` into `x > 0`, integrate over `x < 0`.
    A,
    /// `c₂ ≤ c₁`: shift `w₂` into `x < 0`, integrate over `x > 0`.
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assumption {
    pub label: String,
    pub passed: bool,
}

/// One named sub-condition of a criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub holds: bool,
    pub scope: Scope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub verdict: Verdict,
    pub scope: Scope,
    pub intermediates: BTreeMap<String, f64>,
    pub assumptions_checked: Vec<Assumption>,
    pub conditions: Vec<Condition>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub fn new(name: &str) -> Self {
        CriterionReport {
            name: name.to_string(),
            verdict: Verdict::Inconclusive,
            scope: Scope::AtGivenLambda,
            intermediates: BTreeMap::new(),
            assumptions_checked: Vec::new(),
            conditions: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.intermediates.insert(key.into(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.intermediates.get(key).copied()
    }

    pub fn assume(&mut self, label: impl Into<String>, passed: bool) -> bool {
        self.assumptions_checked.push(Assumption { label: label.into(), passed });
        passed
    }

    pub fn condition(&mut self, label: impl Into<String>, holds: bool, scope: Scope) -> bool {
        self.conditions.push(Condition { label: label.into(), holds, scope });
        holds
    }

    pub fn condition_holds(&self, label: &str) -> Option<bool> {
        self.conditions.iter().find(|c| c.label == label).map(|c| c.holds)
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn all_assumptions_passed(&self) -> bool {
        self.assumptions_checked.iter().all(|a| a.passed)
    }

    /// Sets the verdict; a certificate is downgraded to `Inconclusive` if
    /// any recorded assumption failed.
    pub fn conclude(mut self, verdict: Verdict, scope: Scope) -> Self {
        self.scope = scope;
        self.verdict = if verdict != Verdict::Inconclusive && !self.all_assumptions_passed() {
            self.notes.push("certificate withheld: an assumption failed".into());
            Verdict::Inconclusive
        } else {
            verdict
        };
        self
    }

    pub fn is_certified(&self) -> bool {
        self.verdict != Verdict::Inconclusive
    }
}
