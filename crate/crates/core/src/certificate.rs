//! Serialized two-branch proofs that an observable is value indefinite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagram::ObsId;
use crate::engine::DeductionStep;
use crate::error::Result;

/// One gadget placement, with anchors resolved to ids of the companion diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// The value of `phi` whose refutation this gadget serves.
    pub branch: u8,
    pub gadget: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub anchors: BTreeMap<String, ObsId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchProof {
    /// `(phi, value)` assumed in this branch.
    pub assumption: (ObsId, u8),
    /// Starts with the seed steps for `psi = 1` and the assumption.
    pub trace: Vec<DeductionStep>,
    /// Observable, the step that set its value, the final step opposing it.
    pub contradiction: (ObsId, DeductionStep, DeductionStep),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub psi: ObsId,
    pub phi: ObsId,
    pub overlap: f64,
    pub construction_log: Vec<LogEntry>,
    pub branches: Vec<BranchProof>,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        Ok(serde_json::from_str(text)?)
    }
}
