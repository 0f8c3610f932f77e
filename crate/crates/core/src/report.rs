//! Serializable bound reports.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which set of preparations a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Classical (deterministic) strategies.
    C,
    /// All preparations are stabilizer states.
    Stab,
    /// At most `k − 1` preparations are non-stabilizer.
    KStab(usize),
    /// Unrestricted quantum preparations.
    Q,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::C => write!(f, "C"),
            Scenario::Stab => write!(f, "STAB"),
            Scenario::KStab(k) => write!(f, "{k}-STAB"),
            Scenario::Q => write!(f, "Q"),
        }
    }
}

/// Optimal strategy attached to a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax {
    /// Deterministic encoding x ↦ m(x) and decoding (m, y) ↦ b.
    Deterministic { encoding: Vec<usize>, decoding: Vec<usize> },
    /// One or more optimal Bloch-vector configurations.
    Bloch(Vec<Vec<[f64; 3]>>),
    /// Closed-form value, no explicit strategy.
    ClosedForm,
}

/// Optimizer settings and effort behind a bound.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub restarts: usize,
    pub tolerance: f64,
    pub seed: Option<u64>,
    /// Configurations visited by an enumerative search.
    pub evaluated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub scenario: Scenario,
    pub value: f64,
    /// True only for enumerative or closed-form values.
    pub exact: bool,
    pub argmax: Argmax,
    pub meta: RunMeta,
}
