//! FIRE: fact-checking with iterative retrieval and verification.
//!
//! An agent loop that, per atomic claim, asks a language model to either
//! commit to a True/False verdict or issue one more web-search query,
//! accumulating snippets as evidence until it is confident or a step cap
//! forces a final verification. Around the loop: repetition guards over
//! queries and snippets, benchmark dataset ingestion, a metrics and cost
//! harness, and a replay cache for deterministic reruns.

pub mod agent;
pub mod datasets;
pub mod evaluation;
pub mod money;
pub mod prompts;
pub mod providers;
pub mod types;

pub use agent::{verify_claim, ClaimTrace, ProviderSet};
pub use money::Money;
pub use types::{AgentConfig, Claim, Verdict};
