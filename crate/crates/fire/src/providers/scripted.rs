//! Scripted test doubles. No network capability is injected anywhere here,
//! so these can never perform I/O.

use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use super::{
    synthesize_token_count, Completion, LlmClient, ProviderError, SearchClient, SearchHit,
};
use crate::prompts::RenderedPrompt;

/// A single FIFO queue of canned completions.
///
/// Suitable for one claim at a time; concurrent claims should use
/// [`KeyedScriptedLlm`] so responses cannot interleave.
#[derive(Debug, Default)]
pub struct ScriptedLlm {
    queue: Mutex<VecDeque<String>>,
    prompts_seen: Mutex<Vec<String>>,
}

impl ScriptedLlm {
    pub fn new<I, S>(responses: I) -> ScriptedLlm
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedLlm {
            queue: Mutex::new(responses.into_iter().map(Into::into).collect()),
            prompts_seen: Mutex::new(Vec::new()),
        }
    }

    /// Every prompt text this double has answered, in order.
    pub fn prompts_seen(&self) -> Vec<String> {
        self.prompts_seen.lock().unwrap().clone()
    }

    pub fn calls(&self) -> usize {
        self.prompts_seen.lock().unwrap().len()
    }
}

impl LlmClient for ScriptedLlm {
    fn complete(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        _temperature: f64,
    ) -> Result<Completion, ProviderError> {
        self.prompts_seen.lock().unwrap().push(prompt.text.clone());
        let text = self
            .queue
            .lock()
            .unwrap()
            .pop_front()
            .ok_or_else(|| ProviderError::ProviderUnavailable("scripted queue exhausted".into()))?;
        Ok(Completion {
            prompt_tokens: synthesize_token_count(&prompt.text),
            completion_tokens: synthesize_token_count(&text),
            text,
            model_id: model_id.to_string(),
        })
    }
}

/// Scripted completions routed by which registered key occurs in the prompt.
///
/// The claim text appears verbatim in the STATEMENT block, so keying on it
/// gives each concurrent claim its own response queue and keeps parallel runs
/// deterministic. The longest matching key wins.
#[derive(Debug, Default)]
pub struct KeyedScriptedLlm {
    queues: Mutex<BTreeMap<String, VecDeque<String>>>,
    calls: AtomicU64,
}

impl KeyedScriptedLlm {
    pub fn new() -> KeyedScriptedLlm {
        KeyedScriptedLlm::default()
    }

    pub fn script<I, S>(&self, key: &str, responses: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.queues
            .lock()
            .unwrap()
            .insert(key.to_string(), responses.into_iter().map(Into::into).collect());
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for KeyedScriptedLlm {
    fn complete(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        _temperature: f64,
    ) -> Result<Completion, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let mut queues = self.queues.lock().unwrap();
        let key = queues
            .keys()
            .filter(|k| prompt.text.contains(k.as_str()))
            .max_by_key(|k| k.len())
            .cloned()
            .ok_or_else(|| {
                ProviderError::ProviderUnavailable("no scripted key matches prompt".into())
            })?;
        let text = queues
            .get_mut(&key)
            .and_then(VecDeque::pop_front)
            .ok_or_else(|| {
                ProviderError::ProviderUnavailable(format!("scripted queue for {key:?} exhausted"))
            })?;
        Ok(Completion {
            prompt_tokens: synthesize_token_count(&prompt.text),
            completion_tokens: synthesize_token_count(&text),
            text,
            model_id: model_id.to_string(),
        })
    }
}

/// Query-to-snippet map; unmapped queries return an empty snippet.
#[derive(Debug, Default)]
pub struct ScriptedSearch {
    map: BTreeMap<String, String>,
    calls: AtomicU64,
}

impl ScriptedSearch {
    pub fn new<I, K, V>(pairs: I) -> ScriptedSearch
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        ScriptedSearch {
            map: pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl SearchClient for ScriptedSearch {
    fn search(&self, query: &str) -> Result<SearchHit, ProviderError> {
        if query.is_empty() {
            return Err(ProviderError::EmptyQuery);
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(SearchHit {
            snippet: self.map.get(query).cloned().unwrap_or_default(),
            billable: true,
        })
    }
}

/// Errors on any contact. Used to prove a code path performs no provider calls.
#[derive(Debug, Default)]
pub struct FailingLlm;

impl LlmClient for FailingLlm {
    fn complete(
        &self,
        _prompt: &RenderedPrompt,
        _model_id: &str,
        _temperature: f64,
    ) -> Result<Completion, ProviderError> {
        Err(ProviderError::ProviderUnavailable("llm contact forbidden in this mode".into()))
    }
}

/// Search twin of [`FailingLlm`].
#[derive(Debug, Default)]
pub struct FailingSearch;

impl SearchClient for FailingSearch {
    fn search(&self, _query: &str) -> Result<SearchHit, ProviderError> {
        Err(ProviderError::ProviderUnavailable("search contact forbidden in this mode".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PromptVariant;

    fn prompt(text: &str) -> RenderedPrompt {
        RenderedPrompt {
            text: text.to_string(),
            variant: PromptVariant::Default,
            knowledge_item_count: 0,
        }
    }

    #[test]
    fn scripted_llm_pops_in_order_and_synthesizes_usage() {
        let llm = ScriptedLlm::new([r#"{"final_answer": "Factual"}"#]);
        let got = llm.complete(&prompt("p"), "scripted", 0.0).unwrap();
        assert_eq!(got.text, r#"{"final_answer": "Factual"}"#);
        assert_eq!(got.prompt_tokens, 1);
        assert_eq!(got.completion_tokens, 7);
        assert!(matches!(
            llm.complete(&prompt("p"), "scripted", 0.0),
            Err(ProviderError::ProviderUnavailable(_))
        ));
    }

    #[test]
    fn scripted_llm_token_rule() {
        let llm = ScriptedLlm::new(["12345678"]);
        let got = llm.complete(&prompt("p"), "scripted", 0.0).unwrap();
        assert_eq!(got.completion_tokens, 2);
    }

    #[test]
    fn keyed_llm_routes_by_longest_key_in_prompt() {
        let llm = KeyedScriptedLlm::new();
        llm.script("the Nile", ["a"]);
        llm.script("the Nile is long", ["b"]);
        let got = llm.complete(&prompt("STATEMENT:\nthe Nile is long\n"), "scripted", 0.0).unwrap();
        assert_eq!(got.text, "b");
        assert!(matches!(
            llm.complete(&prompt("no such key"), "scripted", 0.0),
            Err(ProviderError::ProviderUnavailable(_))
        ));
    }

    #[test]
    fn scripted_search_maps_and_defaults_to_empty() {
        let search = ScriptedSearch::new([("capital of France", "Paris is the capital...")]);
        assert_eq!(search.search("capital of France").unwrap().snippet, "Paris is the capital...");
        assert_eq!(search.search("unmapped").unwrap().snippet, "");
        assert!(matches!(search.search(""), Err(ProviderError::EmptyQuery)));
        assert_eq!(search.calls(), 2);
    }

    #[test]
    fn failing_doubles_always_error() {
        assert!(FailingLlm.complete(&prompt("x"), "m", 0.0).is_err());
        assert!(FailingSearch.search("x").is_err());
    }
}
