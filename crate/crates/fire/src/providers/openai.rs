//! OpenAI-compatible chat-completions client.
//!
//! One user message per request, plain JSON response. No tool-calling API:
//! the prompts instruct the model to embed JSON in free text, which keeps
//! every chat-completions-compatible backend usable.

use std::time::Duration;

use serde::Deserialize;

use super::{synthesize_token_count, Completion, LlmClient, ProviderError};
use crate::prompts::RenderedPrompt;

pub const BASE_URL_ENV: &str = "FIRE_LLM_BASE_URL";
pub const API_KEY_ENV: &str = "FIRE_LLM_API_KEY";
pub const MODEL_ENV: &str = "FIRE_LLM_MODEL";

const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
const RATE_LIMIT_ATTEMPTS: u32 = 3;

pub struct OpenAiChatClient {
    agent: ureq::Agent,
    base_url: String,
    api_key: String,
    backoff: Duration,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

impl OpenAiChatClient {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> OpenAiChatClient {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(120)))
            .build();
        OpenAiChatClient {
            agent: ureq::Agent::new_with_config(config),
            base_url: base_url.into(),
            api_key: api_key.into(),
            backoff: Duration::from_millis(500),
        }
    }

    /// Base URL and key from `FIRE_LLM_BASE_URL` / `FIRE_LLM_API_KEY`.
    pub fn from_env() -> Result<OpenAiChatClient, ProviderError> {
        let base_url =
            std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        let api_key = std::env::var(API_KEY_ENV)
            .map_err(|_| ProviderError::AuthFailure(format!("{API_KEY_ENV} is not set")))?;
        Ok(OpenAiChatClient::new(base_url, api_key))
    }

    /// Shrink the rate-limit backoff; tests use this to stay fast.
    pub fn with_backoff(mut self, backoff: Duration) -> OpenAiChatClient {
        self.backoff = backoff;
        self
    }

    fn request_once(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        temperature: f64,
    ) -> Result<Completion, ProviderError> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": model_id,
            "messages": [{ "role": "user", "content": prompt.text }],
            "temperature": temperature,
        });
        let mut response = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| ProviderError::ProviderUnavailable(e.to_string()))?;
        match response.status().as_u16() {
            200..=299 => {}
            401 | 403 => {
                return Err(ProviderError::AuthFailure(format!("HTTP {}", response.status())));
            }
            429 => return Err(ProviderError::RateLimited("HTTP 429".into())),
            code => {
                return Err(ProviderError::ProviderUnavailable(format!("HTTP {code}")));
            }
        }
        let parsed: ChatResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::ProviderUnavailable(format!("bad response body: {e}")))?;
        let text = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        let (prompt_tokens, completion_tokens) = match parsed.usage {
            Some(u) => (u.prompt_tokens, u.completion_tokens),
            None => (synthesize_token_count(&prompt.text), synthesize_token_count(&text)),
        };
        Ok(Completion { text, prompt_tokens, completion_tokens, model_id: model_id.to_string() })
    }
}

impl LlmClient for OpenAiChatClient {
    fn complete(
        &self,
        prompt: &RenderedPrompt,
        model_id: &str,
        temperature: f64,
    ) -> Result<Completion, ProviderError> {
        // Exponential backoff on 429, then give up as unavailable.
        let mut delay = self.backoff;
        for attempt in 0..RATE_LIMIT_ATTEMPTS {
            match self.request_once(prompt, model_id, temperature) {
                Err(ProviderError::RateLimited(msg)) => {
                    if attempt + 1 == RATE_LIMIT_ATTEMPTS {
                        return Err(ProviderError::ProviderUnavailable(format!(
                            "still rate limited after {RATE_LIMIT_ATTEMPTS} attempts: {msg}"
                        )));
                    }
                    std::thread::sleep(delay);
                    delay *= 2;
                }
                other => return other,
            }
        }
        unreachable!("retry loop always returns")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::testserver::serve_script;
    use crate::types::PromptVariant;

    fn prompt() -> RenderedPrompt {
        RenderedPrompt {
            text: "check this".into(),
            variant: PromptVariant::Default,
            knowledge_item_count: 0,
        }
    }

    fn ok_body(content: &str) -> String {
        serde_json::json!({
            "choices": [{ "message": { "role": "assistant", "content": content } }],
            "usage": { "prompt_tokens": 12, "completion_tokens": 5, "total_tokens": 17 }
        })
        .to_string()
    }

    #[test]
    fn parses_content_and_usage() {
        let (addr, seen) = serve_script(vec![(200, ok_body("hello"))]);
        let client = OpenAiChatClient::new(format!("http://{addr}/v1"), "k");
        let got = client.complete(&prompt(), "gpt-4o-mini", 0.0).unwrap();
        assert_eq!(got.text, "hello");
        assert_eq!(got.prompt_tokens, 12);
        assert_eq!(got.completion_tokens, 5);
        assert_eq!(got.model_id, "gpt-4o-mini");

        let requests = seen.lock().unwrap();
        assert_eq!(requests.len(), 1);
        assert!(requests[0].contains("POST /v1/chat/completions"));
        assert!(requests[0].contains("Bearer k"));
        assert!(requests[0].contains("\"temperature\": 0.0"));
        assert!(requests[0].contains("\"content\": \"check this\""));
    }

    #[test]
    fn missing_usage_falls_back_to_synthesized_counts() {
        let body = serde_json::json!({
            "choices": [{ "message": { "role": "assistant", "content": "12345678" } }]
        })
        .to_string();
        let (addr, _) = serve_script(vec![(200, body)]);
        let client = OpenAiChatClient::new(format!("http://{addr}"), "k");
        let got = client.complete(&prompt(), "m", 0.0).unwrap();
        assert_eq!(got.completion_tokens, 2);
        assert_eq!(got.prompt_tokens, synthesize_token_count("check this"));
    }

    #[test]
    fn retries_through_rate_limits() {
        let (addr, seen) = serve_script(vec![
            (429, "{}".into()),
            (429, "{}".into()),
            (200, ok_body("after backoff")),
        ]);
        let client = OpenAiChatClient::new(format!("http://{addr}"), "k")
            .with_backoff(Duration::from_millis(1));
        let got = client.complete(&prompt(), "m", 0.0).unwrap();
        assert_eq!(got.text, "after backoff");
        assert_eq!(seen.lock().unwrap().len(), 3);
    }

    #[test]
    fn persistent_rate_limit_becomes_unavailable() {
        let (addr, _) =
            serve_script(vec![(429, "{}".into()), (429, "{}".into()), (429, "{}".into())]);
        let client = OpenAiChatClient::new(format!("http://{addr}"), "k")
            .with_backoff(Duration::from_millis(1));
        assert!(matches!(
            client.complete(&prompt(), "m", 0.0),
            Err(ProviderError::ProviderUnavailable(_))
        ));
    }

    #[test]
    fn auth_errors_are_fatal_not_retried() {
        let (addr, seen) = serve_script(vec![(401, "{}".into())]);
        let client = OpenAiChatClient::new(format!("http://{addr}"), "bad");
        assert!(matches!(client.complete(&prompt(), "m", 0.0), Err(ProviderError::AuthFailure(_))));
        assert_eq!(seen.lock().unwrap().len(), 1);
    }
}
