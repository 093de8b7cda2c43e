//! Domain types shared by every module. No I/O here.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use crate::money::Money;

/// Binary factuality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "Factual")]
    Factual,
    #[serde(rename = "Non-Factual")]
    NonFactual,
}

impl Verdict {
    /// The label token substituted into prompts for this verdict.
    pub fn label(self, labels: &LabelConfig) -> &str {
        match self {
            Verdict::Factual => &labels.factual,
            Verdict::NonFactual => &labels.non_factual,
        }
    }

    pub fn flipped(self) -> Verdict {
        match self {
            Verdict::Factual => Verdict::NonFactual,
            Verdict::NonFactual => Verdict::Factual,
        }
    }
}

/// The two label tokens rendered into prompts and accepted in model output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelConfig {
    pub factual: String,
    pub non_factual: String,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig { factual: "Factual".to_string(), non_factual: "Non-Factual".to_string() }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("unknown label token {0:?}")]
    UnknownLabel(String),
    #[error("claim text is empty after trimming")]
    EmptyClaimText,
    #[error("invalid agent configuration: {0}")]
    InvalidConfig(String),
}

/// Map a model-emitted token onto a verdict.
///
/// Surrounding whitespace, quotes and backticks are stripped and the match is
/// case-insensitive against the two configured label tokens.
pub fn verdict_from_token(token: &str, labels: &LabelConfig) -> Result<Verdict, CoreError> {
    let cleaned = token.trim().trim_matches(|c| c == '"' || c == '\'' || c == '`').trim();
    if cleaned.eq_ignore_ascii_case(&labels.factual) {
        Ok(Verdict::Factual)
    } else if cleaned.eq_ignore_ascii_case(&labels.non_factual) {
        Ok(Verdict::NonFactual)
    } else {
        Err(CoreError::UnknownLabel(token.to_string()))
    }
}

/// Which benchmark a claim came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceDataset {
    FactcheckBench,
    FactoolQa,
    FelmWk,
    BingCheck,
    Custom,
}

/// One atomic statement to verify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub text: String,
    pub gold_label: Option<Verdict>,
    pub source_dataset: SourceDataset,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl Claim {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Claim, CoreError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CoreError::EmptyClaimText);
        }
        Ok(Claim {
            id: id.into(),
            text,
            gold_label: None,
            source_dataset: SourceDataset::Custom,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_gold(mut self, verdict: Verdict) -> Claim {
        self.gold_label = Some(verdict);
        self
    }

    pub fn with_source(mut self, source: SourceDataset) -> Claim {
        self.source_dataset = source;
        self
    }
}

/// One retrieved snippet and the query that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub query: String,
    /// Concatenated result snippets; empty when the engine returned nothing.
    pub snippet: String,
    /// 0-based position of this retrieval in the loop.
    pub rank: usize,
}

/// Append-only accumulation of retrieved evidence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceSet {
    items: Vec<Evidence>,
}

impl EvidenceSet {
    pub fn new() -> EvidenceSet {
        EvidenceSet::default()
    }

    pub fn push(&mut self, evidence: Evidence) {
        self.items.push(evidence);
    }

    pub fn items(&self) -> &[Evidence] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Step-prompt and final-prompt template selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptVariant {
    Default,
    NoReason,
    AtLeastOne,
    AtLeastTwo,
    Inclusive,
    FinalVerification,
    DiversityAddendum,
}

impl PromptVariant {
    /// True for the five templates usable as the per-step prompt.
    pub fn is_step_variant(self) -> bool {
        !matches!(self, PromptVariant::FinalVerification | PromptVariant::DiversityAddendum)
    }

    /// Evidence floor implied by the variant when hard enforcement is on.
    pub fn min_evidence(self) -> usize {
        match self {
            PromptVariant::AtLeastOne => 1,
            PromptVariant::AtLeastTwo => 2,
            _ => 0,
        }
    }
}

/// What to do when the final verification stays malformed after retries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MalformedPolicy {
    CountAsNonFactual,
    Exclude,
}

/// Everything that parameterizes one verification loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    /// Upper bound N on retrieval steps.
    pub max_steps: usize,
    pub prompt_variant: PromptVariant,
    pub search_enabled: bool,
    /// Window size W for early termination; disabled when absent.
    pub early_termination_window: Option<usize>,
    pub diversity_prompt: bool,
    /// Cosine threshold for "similar", in (0, 1].
    pub similarity_threshold: f32,
    /// Re-asks of the same prompt after a malformed completion.
    pub parse_retries: usize,
    pub malformed_policy: MalformedPolicy,
    /// Convert a premature final answer into a malformed retry while the
    /// evidence floor of At Least One/Two is unmet. Off by default: those
    /// variants are instructions, not mechanics.
    pub enforce_min_evidence: bool,
    /// Count W similar consecutive pairs instead of W similar consecutive
    /// items when deciding early termination.
    pub count_similar_pairs: bool,
    pub labels: LabelConfig,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            max_steps: 5,
            prompt_variant: PromptVariant::Default,
            search_enabled: true,
            early_termination_window: None,
            diversity_prompt: false,
            similarity_threshold: 0.9,
            parse_retries: 1,
            malformed_policy: MalformedPolicy::CountAsNonFactual,
            enforce_min_evidence: false,
            count_similar_pairs: false,
            labels: LabelConfig::default(),
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.max_steps == 0 {
            return Err(CoreError::InvalidConfig("max_steps must be >= 1".into()));
        }
        if !self.prompt_variant.is_step_variant() {
            return Err(CoreError::InvalidConfig(format!(
                "{:?} is not a step prompt variant",
                self.prompt_variant
            )));
        }
        if self.early_termination_window == Some(0) {
            return Err(CoreError::InvalidConfig("early_termination_window must be >= 1".into()));
        }
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold <= 1.0) {
            return Err(CoreError::InvalidConfig("similarity_threshold must be in (0, 1]".into()));
        }
        if self.labels.factual.trim().is_empty()
            || self.labels.non_factual.trim().is_empty()
            || self.labels.factual.eq_ignore_ascii_case(&self.labels.non_factual)
        {
            return Err(CoreError::InvalidConfig("label tokens must be distinct and non-empty".into()));
        }
        Ok(())
    }
}
