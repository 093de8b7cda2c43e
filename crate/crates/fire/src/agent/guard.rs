//! Repetition guard over consecutive queries and retrieved snippets.
//!
//! A run length counts the current streak of consecutive mutually-similar
//! items, including the streak's first member. Reaching the configured
//! window W terminates retrieval; with the diversity prompt enabled, a
//! streak of two or more instead injects the diversity instruction.

use serde::{Deserialize, Serialize};

use crate::providers::{cosine, EmbeddingVector, ProviderError, TextEmbedder};
use crate::types::AgentConfig;

/// What the guard tells the loop to do after observing one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardAction {
    Proceed,
    InjectDiversity,
    Terminate,
}

/// Streak state across one claim's loop.
#[derive(Debug, Default)]
pub struct GuardState {
    last_query: Option<Observed>,
    last_snippet: Option<Observed>,
    query_run_length: usize,
    snippet_run_length: usize,
    diversity_pending: bool,
}

#[derive(Debug)]
struct Observed {
    text: String,
    embedding: Option<EmbeddingVector>,
}

impl GuardState {
    pub fn new() -> GuardState {
        GuardState::default()
    }

    pub fn query_run_length(&self) -> usize {
        self.query_run_length
    }

    pub fn snippet_run_length(&self) -> usize {
        self.snippet_run_length
    }

    /// True once, then resets: the addendum applies only to the immediately
    /// following step prompt.
    pub fn take_diversity_pending(&mut self) -> bool {
        std::mem::take(&mut self.diversity_pending)
    }

    pub fn observe_query(
        &mut self,
        query: &str,
        embedder: &dyn TextEmbedder,
        config: &AgentConfig,
    ) -> Result<GuardAction, ProviderError> {
        let (last, run) = (&mut self.last_query, &mut self.query_run_length);
        let action = observe(last, run, query, embedder, config)?;
        if action == GuardAction::InjectDiversity {
            self.diversity_pending = true;
        }
        Ok(action)
    }

    pub fn observe_snippet(
        &mut self,
        snippet: &str,
        embedder: &dyn TextEmbedder,
        config: &AgentConfig,
    ) -> Result<GuardAction, ProviderError> {
        let (last, run) = (&mut self.last_snippet, &mut self.snippet_run_length);
        let action = observe(last, run, snippet, embedder, config)?;
        if action == GuardAction::InjectDiversity {
            self.diversity_pending = true;
        }
        Ok(action)
    }
}

fn observe(
    last: &mut Option<Observed>,
    run_length: &mut usize,
    text: &str,
    embedder: &dyn TextEmbedder,
    config: &AgentConfig,
) -> Result<GuardAction, ProviderError> {
    let embedding = if text.is_empty() { None } else { Some(embedder.embed(text)?) };
    let similar =
        last.as_ref().map(|prev| is_similar(prev, text, embedding.as_ref(), config));
    *run_length = match similar {
        Some(true) => *run_length + 1,
        _ => 1,
    };
    *last = Some(Observed { text: text.to_string(), embedding });

    let effective_run = if config.count_similar_pairs { *run_length - 1 } else { *run_length };
    if let Some(window) = config.early_termination_window {
        if effective_run >= window {
            return Ok(GuardAction::Terminate);
        }
    }
    if config.diversity_prompt && *run_length >= 2 {
        return Ok(GuardAction::InjectDiversity);
    }
    Ok(GuardAction::Proceed)
}

fn is_similar(
    prev: &Observed,
    text: &str,
    embedding: Option<&EmbeddingVector>,
    config: &AgentConfig,
) -> bool {
    match (&prev.embedding, embedding) {
        // Two consecutive empty strings count as similar by convention.
        (None, None) => prev.text.is_empty() && text.is_empty(),
        (Some(a), Some(b)) => cosine(a, b) >= config.similarity_threshold,
        _ => false,
    }
}
