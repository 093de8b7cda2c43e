//! The iterative verification loop.
//!
//! Each step asks the model for either a final verdict or one more search
//! query. Queries are retrieved, appended to the evidence set, and the loop
//! re-asks with the grown knowledge. Retrieval stops at the step cap, on a
//! repetition-guard termination, or when search is disabled; every such path
//! funnels into the forced final-verification prompt.

mod guard;
mod parse;
mod trace;

pub use guard::{GuardAction, GuardState};
pub use parse::{extract_json_object, parse_step_output, StepOutcome};
pub use trace::{digest_text, ClaimTrace, GuardActionRecord, StepRecord, TraceStatus, TRACE_SCHEMA};

use std::sync::Arc;
use std::time::Instant;

use crate::prompts::{render_final_prompt, render_step_prompt, RenderedPrompt};
use crate::providers::{
    search_cost, Completion, LlmClient, PricingTable, ProviderError, SearchClient, TextEmbedder,
    TrigramEmbedder,
};
use crate::types::{AgentConfig, Claim, Evidence, EvidenceSet, MalformedPolicy, Verdict};

/// The external capabilities one verification needs, plus decoding settings.
#[derive(Clone)]
pub struct ProviderSet {
    pub llm: Arc<dyn LlmClient>,
    pub search: Arc<dyn SearchClient>,
    pub embedder: Arc<dyn TextEmbedder>,
    pub pricing: PricingTable,
    pub model_id: String,
    pub temperature: f64,
}

impl ProviderSet {
    /// Scripted doubles with the deterministic embedder; for tests and demos.
    pub fn scripted(
        llm: impl LlmClient + 'static,
        search: impl SearchClient + 'static,
    ) -> ProviderSet {
        ProviderSet {
            llm: Arc::new(llm),
            search: Arc::new(search),
            embedder: Arc::new(TrigramEmbedder),
            pricing: PricingTable::default(),
            model_id: "scripted".to_string(),
            temperature: 0.0,
        }
    }

    pub fn with_pricing(mut self, pricing: PricingTable) -> ProviderSet {
        self.pricing = pricing;
        self
    }

    pub fn with_model(mut self, model_id: impl Into<String>) -> ProviderSet {
        self.model_id = model_id.into();
        self
    }
}

/// Verify one claim, returning its full trace.
///
/// Provider failures abort the claim (status `Aborted`); every other anomaly
/// resolves to a verdict or an excluded trace via the malformed policy.
pub fn verify_claim(claim: &Claim, config: &AgentConfig, providers: &ProviderSet) -> ClaimTrace {
    let started = Instant::now();
    let mut trace = ClaimTrace::new(&claim.id);

    if let Err(e) = config.validate() {
        trace.status = TraceStatus::Aborted { error: e.to_string() };
        return trace;
    }

    let mut loop_state = LoopState {
        evidence: EvidenceSet::new(),
        guard: GuardState::new(),
        billable_searches: 0,
    };
    match run_loop(claim, config, providers, &mut trace, &mut loop_state) {
        Ok(LoopExit::Verdict(verdict)) => {
            trace.final_verdict = Some(verdict);
        }
        Ok(LoopExit::NeedsFinalVerification) => {
            trace.forced_final = true;
            match final_verification(claim, config, providers, &mut trace, &loop_state.evidence) {
                Ok(Some(verdict)) => trace.final_verdict = Some(verdict),
                Ok(None) => match config.malformed_policy {
                    MalformedPolicy::CountAsNonFactual => {
                        trace.final_verdict = Some(Verdict::NonFactual);
                        trace.malformed_fallback = true;
                    }
                    MalformedPolicy::Exclude => {
                        trace.status = TraceStatus::Excluded {
                            reason: "malformed final verification after retries".to_string(),
                        };
                    }
                },
                Err(e) => {
                    trace.status = TraceStatus::Aborted { error: e.to_string() };
                }
            }
        }
        Err(e) => {
            trace.status = TraceStatus::Aborted { error: e.to_string() };
        }
    }

    trace.total_search_cost = search_cost(loop_state.billable_searches, &providers.pricing);
    trace.wall_time_seconds = started.elapsed().as_secs_f64();
    trace
}

struct LoopState {
    evidence: EvidenceSet,
    guard: GuardState,
    billable_searches: u64,
}

enum LoopExit {
    /// The model answered at a step prompt.
    Verdict(Verdict),
    /// Step cap, guard termination, disabled search, or exhausted retries.
    NeedsFinalVerification,
}

fn run_loop(
    claim: &Claim,
    config: &AgentConfig,
    providers: &ProviderSet,
    trace: &mut ClaimTrace,
    state: &mut LoopState,
) -> Result<LoopExit, ProviderError> {
    // Guards only matter while retrieval is possible.
    let guard_enabled = config.search_enabled
        && (config.early_termination_window.is_some() || config.diversity_prompt);
    let min_evidence =
        if config.enforce_min_evidence { config.prompt_variant.min_evidence() } else { 0 };

    while trace.search_count < config.max_steps {
        let diversity = state.guard.take_diversity_pending();
        let prompt = render_step_prompt(
            config.prompt_variant,
            claim,
            &state.evidence,
            diversity,
            &config.labels,
        )
        .expect("validated step variant");
        let evidence_len = state.evidence.len();
        let outcome = ask_with_retries(trace, config, providers, &prompt, |completion| {
            let parsed = parse_step_output(completion, &config.labels);
            match parsed {
                // Hard enforcement: a verdict before the evidence floor is a
                // malformed attempt, re-asked like any other.
                StepOutcome::FinalAnswer { .. } if evidence_len < min_evidence => {
                    StepOutcome::Malformed { raw: completion.text.clone() }
                }
                other => other,
            }
        })?;

        let query = match outcome {
            StepOutcome::FinalAnswer { verdict } => return Ok(LoopExit::Verdict(verdict)),
            StepOutcome::Malformed { .. } => return Ok(LoopExit::NeedsFinalVerification),
            StepOutcome::NextQuery { query } => query,
        };
        record_query(trace, &query);

        if !config.search_enabled {
            // No-search ablation: low confidence with no way to gain evidence.
            return Ok(LoopExit::NeedsFinalVerification);
        }

        if guard_enabled {
            let action = state.guard.observe_query(&query, providers.embedder.as_ref(), config)?;
            record_guard_action(trace, action);
            if action == GuardAction::Terminate {
                trace.early_terminated = true;
                return Ok(LoopExit::NeedsFinalVerification);
            }
        }

        let hit = providers.search.search(&query)?;
        trace.search_count += 1;
        if hit.billable {
            state.billable_searches += 1;
        }
        record_snippet(trace, &hit.snippet);

        if guard_enabled {
            let action =
                state.guard.observe_snippet(&hit.snippet, providers.embedder.as_ref(), config)?;
            record_guard_action(trace, action);
            if action == GuardAction::Terminate {
                trace.early_terminated = true;
                return Ok(LoopExit::NeedsFinalVerification);
            }
        }

        let rank = state.evidence.len();
        state.evidence.push(Evidence { query, snippet: hit.snippet, rank });
    }

    Ok(LoopExit::NeedsFinalVerification)
}

/// Run the forced final verification; `None` means malformed after retries.
fn final_verification(
    claim: &Claim,
    config: &AgentConfig,
    providers: &ProviderSet,
    trace: &mut ClaimTrace,
    evidence: &EvidenceSet,
) -> Result<Option<Verdict>, ProviderError> {
    let prompt = render_final_prompt(claim, evidence, &config.labels);
    let outcome = ask_with_retries(trace, config, providers, &prompt, |completion| {
        match parse_step_output(completion, &config.labels) {
            answer @ StepOutcome::FinalAnswer { .. } => answer,
            // Only a verdict is acceptable here; a query is as malformed as
            // garbage.
            _ => StepOutcome::Malformed { raw: completion.text.clone() },
        }
    })?;
    match outcome {
        StepOutcome::FinalAnswer { verdict } => Ok(Some(verdict)),
        _ => Ok(None),
    }
}

/// Issue `prompt`, re-issuing it on malformed output up to the retry budget.
/// Every attempt is recorded as a step.
fn ask_with_retries(
    trace: &mut ClaimTrace,
    config: &AgentConfig,
    providers: &ProviderSet,
    prompt: &RenderedPrompt,
    classify: impl Fn(&Completion) -> StepOutcome,
) -> Result<StepOutcome, ProviderError> {
    let mut outcome = StepOutcome::Malformed { raw: String::new() };
    for _attempt in 0..=config.parse_retries {
        let completion =
            providers.llm.complete(prompt, &providers.model_id, providers.temperature)?;
        outcome = classify(&completion);
        let llm_cost = providers.pricing.llm_cost_or_zero(&completion);
        trace.total_llm_cost += llm_cost;
        trace.steps.push(StepRecord {
            iteration: trace.search_count,
            prompt_variant: prompt.variant,
            rendered_prompt_digest: digest_text(&prompt.text),
            raw_completion: completion.text,
            parsed: outcome.clone(),
            query: None,
            snippet_digest: None,
            guard_action: GuardActionRecord::None,
            llm_cost,
        });
        if !outcome.is_malformed() {
            break;
        }
    }
    Ok(outcome)
}

fn record_query(trace: &mut ClaimTrace, query: &str) {
    if let Some(step) = trace.steps.last_mut() {
        step.query = Some(query.to_string());
    }
}

fn record_snippet(trace: &mut ClaimTrace, snippet: &str) {
    if let Some(step) = trace.steps.last_mut() {
        step.snippet_digest = Some(digest_text(snippet));
    }
}

/// Keep the most severe guard outcome seen during a step.
fn record_guard_action(trace: &mut ClaimTrace, action: GuardAction) {
    fn severity(record: GuardActionRecord) -> u8 {
        match record {
            GuardActionRecord::None => 0,
            GuardActionRecord::Proceed => 1,
            GuardActionRecord::InjectDiversity => 2,
            GuardActionRecord::Terminate => 3,
        }
    }
    if let Some(step) = trace.steps.last_mut() {
        let incoming = GuardActionRecord::from(action);
        if severity(incoming) > severity(step.guard_action) {
            step.guard_action = incoming;
        }
    }
}
