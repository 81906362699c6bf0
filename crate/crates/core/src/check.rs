//! Pass/fail records for identity checks.

use serde::Serialize;

/// Outcome of checking one identity over a finite family of tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    /// Basis labels of the first failing tuple.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

impl IdentityCheck {
    pub fn pass(name: &str) -> IdentityCheck {
        IdentityCheck { name: name.into(), holds: true, witness: None }
    }

    pub fn fail(name: &str, witness: Vec<String>) -> IdentityCheck {
        IdentityCheck { name: name.into(), holds: false, witness: Some(witness) }
    }

    pub fn from_witness(name: &str, witness: Option<Vec<String>>) -> IdentityCheck {
        match witness {
            None => IdentityCheck::pass(name),
            Some(w) => IdentityCheck::fail(name, w),
        }
    }
}

/// A list of identity checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<IdentityCheck>,
}

impl CheckReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.holds)
    }
}
