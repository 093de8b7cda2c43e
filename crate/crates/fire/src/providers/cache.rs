//! Content-addressed replay cache under `.fire-cache/`.
//!
//! One JSON document per key, keyed by the SHA-256 of the exact request
//! payload. Wrapping a provider in [`CachedLlm`] / [`CachedSearch`] makes the
//! first call live (and stored) and every identical later call a local read.
//! In zero-cost replay mode, hits report zero usage so they contribute
//! nothing to cost ledgers; with it off, hits replay the recorded usage.

use std::path::PathBuf;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{Completion, LlmClient, ProviderError, SearchClient, SearchHit};
use crate::prompts::RenderedPrompt;

/// Which provider a cache entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheKind {
    Llm,
    Search,
    Embed,
}

impl CacheKind {
    fn dir_name(self) -> &'static str {
        match self {
            CacheKind::Llm => "llm",
            CacheKind::Search => "search",
            CacheKind::Embed => "embed",
        }
    }
}

/// Content address of one request payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub kind: CacheKind,
    pub digest: String,
}

impl CacheKey {
    pub fn llm(model_id: &str, temperature: f64, prompt_text: &str) -> CacheKey {
        let payload = serde_json::json!({
            "kind": "llm",
            "model": model_id,
            "temperature": temperature,
            "prompt": prompt_text,
        });
        CacheKey { kind: CacheKind::Llm, digest: digest_of(&payload.to_string()) }
    }

    pub fn search(query: &str) -> CacheKey {
        let payload = serde_json::json!({ "kind": "search", "query": query });
        CacheKey { kind: CacheKind::Search, digest: digest_of(&payload.to_string()) }
    }

    pub fn embed(text: &str) -> CacheKey {
        let payload = serde_json::json!({ "kind": "embed", "text": text });
        CacheKey { kind: CacheKind::Embed, digest: digest_of(&payload.to_string()) }
    }
}

fn digest_of(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

/// File-backed response store.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    root: PathBuf,
}

impl ResponseCache {
    pub const DEFAULT_DIR: &'static str = ".fire-cache";

    pub fn new(root: impl Into<PathBuf>) -> ResponseCache {
        ResponseCache { root: root.into() }
    }

    pub fn path_of(&self, key: &CacheKey) -> PathBuf {
        self.root.join(key.kind.dir_name()).join(format!("{}.json", key.digest))
    }

    /// `Ok(None)` on a miss, `Err(CacheCorrupt)` on an unreadable entry.
    pub fn load<T: DeserializeOwned>(&self, key: &CacheKey) -> Result<Option<T>, ProviderError> {
        let path = self.path_of(key);
        if !path.exists() {
            return Ok(None);
        }
        let raw = std::fs::read_to_string(&path)
            .map_err(|e| ProviderError::CacheCorrupt(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&raw)
            .map(Some)
            .map_err(|e| ProviderError::CacheCorrupt(format!("{}: {e}", path.display())))
    }

    /// Atomic write: temp file in the same directory, then rename.
    pub fn store<T: Serialize>(&self, key: &CacheKey, value: &T) -> std::io::Result<()> {
        let path = self.path_of(key);
        let dir = path.parent().expect("cache path has a parent");
        std::fs::create_dir_all(dir)?;
        let tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer(&tmp, value)?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }
}

/// Decorator adding replay caching to any [`LlmClient`].
pub struct CachedLlm<C> {
    inner: C,
    cache: Arc<ResponseCache>,
    zero_cost_on_hit: bool,
}

impl<C: LlmClient> CachedLlm<C> {
    pub fn new(inner: C, cache: Arc<ResponseCache>, zero_cost_on_hit: bool) -> CachedLlm<C> {
        CachedLlm { inner, cache, zero_cost_on_hit }
    }
}

impl<C: LlmClient> LlmClient for CachedLlm<C> {
    fn complete(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        temperature: f64,
    ) -> Result<Completion, ProviderError> {
        let key = CacheKey::llm(model_id, temperature, &prompt.text);
        match self.cache.load::<Completion>(&key) {
            Ok(Some(mut hit)) => {
                if self.zero_cost_on_hit {
                    hit.prompt_tokens = 0;
                    hit.completion_tokens = 0;
                }
                return Ok(hit);
            }
            Ok(None) => {}
            Err(e) => log::warn!("{e}; falling back to a live call"),
        }
        let fresh = self.inner.complete(prompt, model_id, temperature)?;
        if let Err(e) = self.cache.store(&key, &fresh) {
            log::warn!("failed to store llm cache entry: {e}");
        }
        Ok(fresh)
    }
}

/// Decorator adding replay caching to any [`SearchClient`].
pub struct CachedSearch<C> {
    inner: C,
    cache: Arc<ResponseCache>,
    zero_cost_on_hit: bool,
}

impl<C: SearchClient> CachedSearch<C> {
    pub fn new(inner: C, cache: Arc<ResponseCache>, zero_cost_on_hit: bool) -> CachedSearch<C> {
        CachedSearch { inner, cache, zero_cost_on_hit }
    }
}

impl<C: SearchClient> SearchClient for CachedSearch<C> {
    fn search(&self, query: &str) -> Result<SearchHit, ProviderError> {
        let key = CacheKey::search(query);
        match self.cache.load::<String>(&key) {
            Ok(Some(snippet)) => {
                return Ok(SearchHit { snippet, billable: !self.zero_cost_on_hit });
            }
            Ok(None) => {}
            Err(e) => log::warn!("{e}; falling back to a live call"),
        }
        let fresh = self.inner.search(query)?;
        if let Err(e) = self.cache.store(&key, &fresh.snippet) {
            log::warn!("failed to store search cache entry: {e}");
        }
        Ok(fresh)
    }
}
