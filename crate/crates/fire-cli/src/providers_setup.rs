//! Provider assembly: live clients, scripted doubles, replay cache, dry-run
//! contact traps.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use fire::agent::ProviderSet;
use fire::providers::{
    CachedLlm, CachedSearch, FailingLlm, FailingSearch, KeyedScriptedLlm, LlmClient,
    OpenAiChatClient, ResponseCache, ScriptedLlm, ScriptedSearch, SearchClient, SerpApiClient,
    TrigramEmbedder, LLM_API_KEY_ENV, SERP_API_KEY_ENV,
};

use crate::config::ResolvedConfig;

/// Scripted provider responses loaded from `--scripted <file>`.
#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct ScriptFile {
    /// Model id to report (and price) for scripted completions.
    pub model_id: Option<String>,
    /// One global FIFO of completions; fine for single-claim use.
    pub llm_responses: Vec<String>,
    /// Per-claim queues keyed by a substring of the prompt (usually the
    /// claim text); required for parallel runs.
    pub llm_by_key: BTreeMap<String, Vec<String>>,
    /// Query to snippet.
    pub search_results: BTreeMap<String, String>,
}

pub struct BuiltProviders {
    pub set: ProviderSet,
    /// True when no live call can happen: wall times are zeroed so artifacts
    /// are byte-stable.
    pub deterministic: bool,
}

pub fn build(config: &ResolvedConfig, dry_run: bool) -> Result<BuiltProviders> {
    let pricing = config.pricing()?;

    if dry_run {
        let set = ProviderSet {
            llm: Arc::new(FailingLlm),
            search: Arc::new(FailingSearch),
            embedder: Arc::new(TrigramEmbedder),
            pricing,
            model_id: config.llm_model.clone(),
            temperature: 0.0,
        };
        return Ok(BuiltProviders { set, deterministic: true });
    }

    let (llm, search, model_id): (Arc<dyn LlmClient>, Arc<dyn SearchClient>, String) =
        match &config.scripted {
            Some(path) => {
                let raw = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read script file {}", path.display()))?;
                let script: ScriptFile = serde_json::from_str(&raw)
                    .with_context(|| format!("invalid script file {}", path.display()))?;
                let llm: Arc<dyn LlmClient> = if script.llm_by_key.is_empty() {
                    Arc::new(ScriptedLlm::new(script.llm_responses))
                } else {
                    if !script.llm_responses.is_empty() {
                        log::warn!("script has both llm_responses and llm_by_key; using llm_by_key");
                    }
                    let keyed = KeyedScriptedLlm::new();
                    for (key, responses) in script.llm_by_key {
                        keyed.script(&key, responses);
                    }
                    Arc::new(keyed)
                };
                let search = Arc::new(ScriptedSearch::new(script.search_results));
                (llm, search, script.model_id.unwrap_or_else(|| "scripted".to_string()))
            }
            None => {
                let api_key = config.llm_api_key.clone().with_context(|| {
                    format!("no LLM API key; set {LLM_API_KEY_ENV} or [provider].llm_api_key")
                })?;
                let llm: Arc<dyn LlmClient> =
                    Arc::new(OpenAiChatClient::new(config.llm_base_url.clone(), api_key));
                let search: Arc<dyn SearchClient> = if config.agent.search_enabled {
                    let serp_key = config.serp_api_key.clone().with_context(|| {
                        format!("no search API key; set {SERP_API_KEY_ENV} or [provider].serp_api_key")
                    })?;
                    Arc::new(
                        SerpApiClient::new("https://serpapi.com/search", serp_key)
                            .with_max_snippets(config.max_snippets),
                    )
                } else {
                    Arc::new(FailingSearch)
                };
                (llm, search, config.llm_model.clone())
            }
        };

    let scripted = config.scripted.is_some();
    let (llm, search): (Arc<dyn LlmClient>, Arc<dyn SearchClient>) = if config.replay {
        let cache = Arc::new(ResponseCache::new(&config.cache_dir));
        (
            Arc::new(CachedLlm::new(llm, cache.clone(), true)),
            Arc::new(CachedSearch::new(search, cache, true)),
        )
    } else {
        (llm, search)
    };

    Ok(BuiltProviders {
        set: ProviderSet {
            llm,
            search,
            embedder: Arc::new(TrigramEmbedder),
            pricing,
            model_id,
            temperature: 0.0,
        },
        deterministic: scripted || config.replay,
    })
}

pub fn require_no_scripted_conflicts(config: &ResolvedConfig) -> Result<()> {
    if config.scripted.is_some() && config.llm_api_key.is_some() {
        log::info!("scripted mode: live credentials are ignored");
    }
    if let Some(path) = &config.scripted {
        if !path.exists() {
            bail!("script file {} does not exist", path.display());
        }
    }
    Ok(())
}
