//! Batch execution of a framework or baseline over a claim set.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{score, ClassMetrics, ScoreError};
use crate::agent::{verify_claim, ClaimTrace, TraceStatus};
use crate::money::Money;
use crate::providers::ProviderError;
use crate::types::{AgentConfig, Claim, PromptVariant, Verdict};

/// Which framework or baseline a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunnerKind {
    Fire,
    FireNoReason,
    FireNoSearch,
    Random { seed: u64 },
    AlwaysTrue,
    AlwaysFalse,
}

impl RunnerKind {
    pub fn is_fire(self) -> bool {
        matches!(self, RunnerKind::Fire | RunnerKind::FireNoReason | RunnerKind::FireNoSearch)
    }

    pub fn name(self) -> &'static str {
        match self {
            RunnerKind::Fire => "fire",
            RunnerKind::FireNoReason => "fire-no-reason",
            RunnerKind::FireNoSearch => "fire-no-search",
            RunnerKind::Random { .. } => "random",
            RunnerKind::AlwaysTrue => "always-true",
            RunnerKind::AlwaysFalse => "always-false",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunnerSpec {
    pub kind: RunnerKind,
    pub agent_config: AgentConfig,
}

impl RunnerSpec {
    pub fn new(kind: RunnerKind) -> RunnerSpec {
        RunnerSpec { kind, agent_config: AgentConfig::default() }
    }

    /// The agent configuration with the ablation overrides applied.
    pub fn effective_config(&self) -> AgentConfig {
        let mut config = self.agent_config.clone();
        match self.kind {
            RunnerKind::FireNoReason => config.prompt_variant = PromptVariant::NoReason,
            RunnerKind::FireNoSearch => config.search_enabled = false,
            _ => {}
        }
        config
    }
}

/// Aggregate record for one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub llm_cost: Money,
    pub search_cost: Money,
    pub wall_time_seconds: f64,
    pub per_claim_search_histogram: BTreeMap<usize, u64>,
    pub metrics_true: ClassMetrics,
    pub metrics_false: ClassMetrics,
    pub excluded_count: u64,
}

/// Knobs that do not change what is computed, only how.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Report wall times as zero. Used when no live provider is involved
    /// (baselines, scripted doubles, warmed replay) so artifacts are
    /// byte-stable across runs.
    pub zero_wall_time: bool,
    /// Cooperative cancellation: claims not yet started abort quickly.
    pub cancel: Option<Arc<AtomicBool>>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("parallelism must be >= 1")]
    ZeroParallelism,
    #[error("runner {0:?} needs a provider set")]
    ProvidersRequired(String),
    #[error("every claim aborted; first error: {0}")]
    AllClaimsAborted(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

#[derive(Debug)]
pub struct RunOutcome {
    pub traces: Vec<ClaimTrace>,
    pub ledger: RunLedger,
}

/// Execute `spec` over `claims` with at most `parallelism` claims in flight.
///
/// Traces come back in claim order regardless of scheduling. Per-claim aborts
/// are recorded and the run continues; only a run where every claim aborted
/// fails.
pub fn run(
    spec: &RunnerSpec,
    claims: &[Claim],
    providers: Option<&crate::agent::ProviderSet>,
    parallelism: usize,
    options: &RunOptions,
) -> Result<RunOutcome, RunError> {
    if parallelism == 0 {
        return Err(RunError::ZeroParallelism);
    }
    let started = Instant::now();

    let mut traces = if spec.kind.is_fire() {
        let providers = providers
            .ok_or_else(|| RunError::ProvidersRequired(spec.kind.name().to_string()))?;
        let config = spec.effective_config();
        let cancel = options.cancel.clone();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .expect("worker pool");
        pool.install(|| {
            use rayon::prelude::*;
            claims
                .par_iter()
                .map(|claim| {
                    if cancel.as_ref().is_some_and(|c| c.load(Ordering::SeqCst)) {
                        let mut trace = ClaimTrace::new(&claim.id);
                        trace.status =
                            TraceStatus::Aborted { error: "run cancelled".to_string() };
                        return trace;
                    }
                    verify_claim(claim, &config, providers)
                })
                .collect::<Vec<_>>()
        })
    } else {
        baseline_traces(spec.kind, claims)
    };

    if options.zero_wall_time {
        for trace in &mut traces {
            trace.wall_time_seconds = 0.0;
        }
    }

    if !claims.is_empty() && traces.iter().all(|t| matches!(t.status, TraceStatus::Aborted { .. }))
    {
        let first = traces
            .iter()
            .find_map(|t| match &t.status {
                TraceStatus::Aborted { error } => Some(error.clone()),
                _ => None,
            })
            .unwrap_or_default();
        return Err(RunError::AllClaimsAborted(first));
    }

    let wall_time_seconds =
        if options.zero_wall_time { 0.0 } else { started.elapsed().as_secs_f64() };
    let ledger = build_ledger(&traces, claims, wall_time_seconds)?;
    Ok(RunOutcome { traces, ledger })
}

/// Baselines consume zero provider budget and zero time.
fn baseline_traces(kind: RunnerKind, claims: &[Claim]) -> Vec<ClaimTrace> {
    let draws: Vec<Verdict> = match kind {
        RunnerKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            claims
                .iter()
                .map(|_| if rng.random_bool(0.5) { Verdict::Factual } else { Verdict::NonFactual })
                .collect()
        }
        RunnerKind::AlwaysTrue => vec![Verdict::Factual; claims.len()],
        RunnerKind::AlwaysFalse => vec![Verdict::NonFactual; claims.len()],
        _ => unreachable!("fire kinds handled by the worker pool"),
    };
    claims
        .iter()
        .zip(draws)
        .map(|(claim, verdict)| {
            let mut trace = ClaimTrace::new(&claim.id);
            trace.final_verdict = Some(verdict);
            trace
        })
        .collect()
}

fn build_ledger(
    traces: &[ClaimTrace],
    claims: &[Claim],
    wall_time_seconds: f64,
) -> Result<RunLedger, ScoreError> {
    let gold_known: std::collections::BTreeSet<&str> = claims
        .iter()
        .filter(|c| c.gold_label.is_some())
        .map(|c| c.id.as_str())
        .collect();
    let mut predictions = Vec::new();
    let mut excluded_count = 0u64;
    for trace in traces {
        match trace.final_verdict {
            Some(verdict) if trace.is_scored() && gold_known.contains(trace.claim_id.as_str()) => {
                predictions.push((trace.claim_id.clone(), verdict));
            }
            _ => excluded_count += 1,
        }
    }
    let report = score(&predictions, claims)?;
    Ok(RunLedger {
        llm_cost: traces.iter().map(|t| t.total_llm_cost).sum(),
        search_cost: traces.iter().map(|t| t.total_search_cost).sum(),
        wall_time_seconds,
        per_claim_search_histogram: histogram_of_searches(traces),
        metrics_true: report.true_class,
        metrics_false: report.false_class,
        excluded_count,
    })
}

/// Exact count of traces per search count, zero bucket included.
pub fn histogram_of_searches(traces: &[ClaimTrace]) -> BTreeMap<usize, u64> {
    let mut histogram = BTreeMap::new();
    for trace in traces {
        *histogram.entry(trace.search_count).or_insert(0) += 1;
    }
    histogram
}
