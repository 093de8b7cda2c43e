//! Parsing model completions into loop decisions.
//!
//! Completions carry free-text reasoning with an embedded JSON object; the
//! object of interest is the LAST balanced top-level one holding either a
//! "final_answer" or a "search_query" key.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::providers::Completion;
use crate::types::{verdict_from_token, LabelConfig, Verdict};

/// The parsed result of one agent step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepOutcome {
    FinalAnswer { verdict: Verdict },
    NextQuery { query: String },
    Malformed { raw: String },
}

impl StepOutcome {
    pub fn is_malformed(&self) -> bool {
        matches!(self, StepOutcome::Malformed { .. })
    }
}

/// Pull the decision object out of a completion, if any.
///
/// Fenced code blocks are tolerated by stripping the fence markers first.
/// When several qualifying objects appear, the last one wins.
pub fn extract_json_object(text: &str) -> Option<Map<String, Value>> {
    let cleaned = strip_fence_markers(text);
    let bytes = cleaned.as_bytes();
    let mut found = None;
    let mut at = 0;
    while at < bytes.len() {
        let Some(start) = cleaned[at..].find('{').map(|i| at + i) else { break };
        match balanced_object_end(bytes, start) {
            Some(end) => {
                if let Ok(Value::Object(map)) = serde_json::from_str(&cleaned[start..=end]) {
                    if map.contains_key("final_answer") || map.contains_key("search_query") {
                        found = Some(map);
                    }
                    at = end + 1;
                } else {
                    at = start + 1;
                }
            }
            None => at = start + 1,
        }
    }
    found
}

/// Byte index of the '}' closing the object opened at `start`, respecting
/// strings and escapes. Braces and quotes are ASCII, so byte scanning is
/// UTF-8 safe.
fn balanced_object_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, &b) in bytes[start..].iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(start + offset);
                }
            }
            _ => {}
        }
    }
    None
}

fn strip_fence_markers(text: &str) -> String {
    text.replace("```json", "").replace("```JSON", "").replace("```", "")
}

/// Classify one completion as a final answer, a next query, or malformed.
///
/// Malformed covers: no decision object, both keys present, an unknown label
/// token, a non-string value, and an empty query.
pub fn parse_step_output(completion: &Completion, labels: &LabelConfig) -> StepOutcome {
    let malformed = || StepOutcome::Malformed { raw: completion.text.clone() };
    let Some(object) = extract_json_object(&completion.text) else {
        return malformed();
    };
    let final_answer = object.get("final_answer");
    let search_query = object.get("search_query");
    match (final_answer, search_query) {
        (Some(token), None) => match token.as_str().map(|t| verdict_from_token(t, labels)) {
            Some(Ok(verdict)) => StepOutcome::FinalAnswer { verdict },
            _ => malformed(),
        },
        (None, Some(query)) => match query.as_str().map(str::trim) {
            Some(q) if !q.is_empty() => StepOutcome::NextQuery { query: q.to_string() },
            _ => malformed(),
        },
        _ => malformed(),
    }
}
