//! Per-claim audit records.
//!
//! One trace is the complete account of a verification: every prompt digest,
//! raw completion, parsed outcome, guard decision, and cost. Traces export as
//! one JSON document per line under the `fire-trace/1` schema.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::guard::GuardAction;
use super::parse::StepOutcome;
use crate::money::Money;
use crate::types::{PromptVariant, Verdict};

pub const TRACE_SCHEMA: &str = "fire-trace/1";

/// Guard outcome attached to a step; `None` when the guard was not consulted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardActionRecord {
    Proceed,
    InjectDiversity,
    Terminate,
    None,
}

impl From<GuardAction> for GuardActionRecord {
    fn from(action: GuardAction) -> GuardActionRecord {
        match action {
            GuardAction::Proceed => GuardActionRecord::Proceed,
            GuardAction::InjectDiversity => GuardActionRecord::InjectDiversity,
            GuardAction::Terminate => GuardActionRecord::Terminate,
        }
    }
}

/// One LLM call and what followed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Loop counter n (searches completed) when the call was issued.
    pub iteration: usize,
    pub prompt_variant: PromptVariant,
    pub rendered_prompt_digest: String,
    pub raw_completion: String,
    pub parsed: StepOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    /// Digest of the retrieved snippet; present exactly when this step
    /// performed a search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snippet_digest: Option<String>,
    pub guard_action: GuardActionRecord,
    pub llm_cost: Money,
}

/// How a trace ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum TraceStatus {
    /// Verdict reached.
    Completed,
    /// No verdict; dropped from scoring (malformed after retries under the
    /// exclude policy).
    Excluded { reason: String },
    /// Provider failure ended the claim early.
    Aborted { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimTrace {
    pub schema: String,
    pub claim_id: String,
    pub status: TraceStatus,
    pub steps: Vec<StepRecord>,
    /// Number of web searches performed.
    pub search_count: usize,
    pub final_verdict: Option<Verdict>,
    /// True when the verdict came from the forced final-verification prompt.
    pub forced_final: bool,
    pub early_terminated: bool,
    /// True when the verdict is the malformed-fallback label rather than a
    /// parsed model answer.
    pub malformed_fallback: bool,
    pub wall_time_seconds: f64,
    pub total_llm_cost: Money,
    pub total_search_cost: Money,
}

impl ClaimTrace {
    pub fn new(claim_id: impl Into<String>) -> ClaimTrace {
        ClaimTrace {
            schema: TRACE_SCHEMA.to_string(),
            claim_id: claim_id.into(),
            status: TraceStatus::Completed,
            steps: Vec::new(),
            search_count: 0,
            final_verdict: None,
            forced_final: false,
            early_terminated: false,
            malformed_fallback: false,
            wall_time_seconds: 0.0,
            total_llm_cost: Money::ZERO,
            total_search_cost: Money::ZERO,
        }
    }

    pub fn llm_calls(&self) -> usize {
        self.steps.len()
    }

    pub fn is_scored(&self) -> bool {
        matches!(self.status, TraceStatus::Completed) && self.final_verdict.is_some()
    }
}

/// SHA-256 hex of a prompt or snippet, for compact audit records.
pub fn digest_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
