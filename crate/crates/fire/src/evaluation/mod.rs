//! Evaluation harness: metrics, batch runner, reports.

mod metrics;
mod report;
mod runner;

pub use metrics::{score, ClassMetrics, ConfusionCounts, ScoreError, ScoreReport};
pub use report::{
    aborted_count, emit_report, emit_search_histogram, round2_string, write_run_artifacts,
    LedgerFile, ReportEntry, ReportFormat,
};
pub use runner::{
    histogram_of_searches, run, RunError, RunLedger, RunOptions, RunOutcome, RunnerKind,
    RunnerSpec,
};
