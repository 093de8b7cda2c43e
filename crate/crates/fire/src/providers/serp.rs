//! SerpAPI-compatible Google search client.
//!
//! A query returns the page-one `organic_results[*].snippet` fields joined
//! with "\n" as one evidence string.

use std::time::Duration;

use super::{ProviderError, SearchClient, SearchHit};

pub const API_KEY_ENV: &str = "FIRE_SERP_API_KEY";

const DEFAULT_BASE_URL: &str = "https://serpapi.com/search";

pub struct SerpApiClient {
    agent: ureq::Agent,
    base_url: String,
    api_key: String,
    /// Cap on snippets concatenated per query; `None` keeps everything the
    /// engine returned on page one.
    max_snippets: Option<usize>,
}

impl SerpApiClient {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> SerpApiClient {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .build();
        SerpApiClient {
            agent: ureq::Agent::new_with_config(config),
            base_url: base_url.into(),
            api_key: api_key.into(),
            max_snippets: None,
        }
    }

    /// Key from `FIRE_SERP_API_KEY`, default endpoint.
    pub fn from_env() -> Result<SerpApiClient, ProviderError> {
        let api_key = std::env::var(API_KEY_ENV)
            .map_err(|_| ProviderError::AuthFailure(format!("{API_KEY_ENV} is not set")))?;
        Ok(SerpApiClient::new(DEFAULT_BASE_URL, api_key))
    }

    pub fn with_max_snippets(mut self, max: Option<usize>) -> SerpApiClient {
        self.max_snippets = max;
        self
    }
}

impl SearchClient for SerpApiClient {
    fn search(&self, query: &str) -> Result<SearchHit, ProviderError> {
        if query.is_empty() {
            return Err(ProviderError::EmptyQuery);
        }
        let mut response = self
            .agent
            .get(&self.base_url)
            .query("engine", "google")
            .query("q", query)
            .query("api_key", &self.api_key)
            .call()
            .map_err(|e| ProviderError::ProviderUnavailable(e.to_string()))?;
        match response.status().as_u16() {
            200..=299 => {}
            401 | 403 => {
                return Err(ProviderError::AuthFailure(format!("HTTP {}", response.status())));
            }
            429 => return Err(ProviderError::RateLimited("HTTP 429".into())),
            code => return Err(ProviderError::ProviderUnavailable(format!("HTTP {code}"))),
        }
        let parsed: serde_json::Value = response
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::ProviderUnavailable(format!("bad response body: {e}")))?;
        let snippets: Vec<&str> = parsed["organic_results"]
            .as_array()
            .map(|results| {
                results.iter().filter_map(|r| r["snippet"].as_str()).collect::<Vec<_>>()
            })
            .unwrap_or_default();
        let kept = match self.max_snippets {
            Some(max) => &snippets[..snippets.len().min(max)],
            None => &snippets[..],
        };
        Ok(SearchHit { snippet: kept.join("\n"), billable: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::testserver::serve_script;

    fn results_body(snippets: &[&str]) -> String {
        let organic: Vec<serde_json::Value> = snippets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                serde_json::json!({ "position": i + 1, "title": format!("r{i}"), "snippet": s })
            })
            .collect();
        serde_json::json!({ "organic_results": organic }).to_string()
    }

    #[test]
    fn joins_snippets_with_newlines() {
        let (addr, seen) = serve_script(vec![(200, results_body(&["first", "second", "third"]))]);
        let client = SerpApiClient::new(format!("http://{addr}/search"), "k");
        let hit = client.search("eiffel tower height").unwrap();
        assert_eq!(hit.snippet, "first\nsecond\nthird");
        assert!(hit.billable);

        let requests = seen.lock().unwrap();
        assert!(requests[0].contains("engine=google"));
        assert!(requests[0].contains("q=eiffel%20tower%20height"));
        assert!(requests[0].contains("api_key=k"));
    }

    #[test]
    fn no_results_is_an_empty_snippet() {
        let (addr, _) = serve_script(vec![(200, "{}".into())]);
        let client = SerpApiClient::new(format!("http://{addr}/search"), "k");
        assert_eq!(client.search("anything").unwrap().snippet, "");
    }

    #[test]
    fn max_snippets_truncates() {
        let (addr, _) = serve_script(vec![(200, results_body(&["a", "b", "c"]))]);
        let client =
            SerpApiClient::new(format!("http://{addr}/search"), "k").with_max_snippets(Some(2));
        assert_eq!(client.search("q").unwrap().snippet, "a\nb");
    }

    #[test]
    fn empty_query_is_rejected_before_any_io() {
        let client = SerpApiClient::new("http://127.0.0.1:1/search", "k");
        assert!(matches!(client.search(""), Err(ProviderError::EmptyQuery)));
    }

    #[test]
    fn results_missing_snippet_fields_are_skipped() {
        let body = serde_json::json!({
            "organic_results": [
                { "title": "no snippet here" },
                { "snippet": "kept" }
            ]
        })
        .to_string();
        let (addr, _) = serve_script(vec![(200, body)]);
        let client = SerpApiClient::new(format!("http://{addr}/search"), "k");
        assert_eq!(client.search("q").unwrap().snippet, "kept");
    }
}
