//! External capabilities behind traits: chat completion, web search, text
//! embedding. Ships scripted doubles for tests, HTTP clients for live runs,
//! a pricing table, and a content-addressed replay cache.

mod cache;
mod embed;
mod openai;
mod pricing;
mod scripted;
mod serp;

pub use cache::{CacheKey, CacheKind, CachedLlm, CachedSearch, ResponseCache};
pub use embed::{cosine, EmbeddingVector, TrigramEmbedder, EMBEDDING_DIM};
pub use openai::{
    OpenAiChatClient, API_KEY_ENV as LLM_API_KEY_ENV, BASE_URL_ENV as LLM_BASE_URL_ENV,
    MODEL_ENV as LLM_MODEL_ENV,
};
pub use pricing::{llm_cost, search_cost, ModelRate, PricingTable};
pub use scripted::{FailingLlm, FailingSearch, KeyedScriptedLlm, ScriptedLlm, ScriptedSearch};
pub use serp::{SerpApiClient, API_KEY_ENV as SERP_API_KEY_ENV};

use serde::{Deserialize, Serialize};

use crate::prompts::RenderedPrompt;

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("rate limited: {0}")]
    RateLimited(String),
    #[error("authentication failed: {0}")]
    AuthFailure(String),
    #[error("search query is empty")]
    EmptyQuery,
    #[error("text to embed is empty")]
    EmptyText,
    #[error("no pricing entry for model {0:?}")]
    UnknownModel(String),
    #[error("cache entry corrupt: {0}")]
    CacheCorrupt(String),
}

/// One chat completion with its token usage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub model_id: String,
}

/// Result of one web search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    /// All result snippets concatenated into one string; empty when the
    /// engine returned nothing.
    pub snippet: String,
    /// False only for cache hits served in zero-cost replay mode.
    pub billable: bool,
}

pub trait LlmClient: Send + Sync {
    fn complete(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        temperature: f64,
    ) -> Result<Completion, ProviderError>;
}

pub trait SearchClient: Send + Sync {
    fn search(&self, query: &str) -> Result<SearchHit, ProviderError>;
}

pub trait TextEmbedder: Send + Sync {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, ProviderError>;
}

impl<T: LlmClient + ?Sized> LlmClient for std::sync::Arc<T> {
    fn complete(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        temperature: f64,
    ) -> Result<Completion, ProviderError> {
        (**self).complete(prompt, model_id, temperature)
    }
}

impl<T: SearchClient + ?Sized> SearchClient for std::sync::Arc<T> {
    fn search(&self, query: &str) -> Result<SearchHit, ProviderError> {
        (**self).search(query)
    }
}

impl<T: TextEmbedder + ?Sized> TextEmbedder for std::sync::Arc<T> {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, ProviderError> {
        (**self).embed(text)
    }
}

/// Token-count synthesis used where a provider reports no usage: one token
/// per four characters, rounded up.
pub fn synthesize_token_count(text: &str) -> u64 {
    (text.len() as u64).div_ceil(4)
}
