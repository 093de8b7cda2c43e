//! Report rendering and run artifacts.
//!
//! Reports round to two decimals half-up; raw ledgers keep full precision.
//! Times are reported in hours.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::runner::RunLedger;
use crate::agent::{ClaimTrace, TraceStatus};
use crate::types::Claim;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

/// One (framework, model, dataset) row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub framework: String,
    pub model: String,
    pub dataset: String,
    pub ledger: RunLedger,
}

/// Two-decimal half-up rendering for a non-negative value.
pub fn round2_string(value: f64) -> String {
    let scaled = (value * 100.0 + 0.5).floor() as i64;
    format!("{}.{:02}", scaled / 100, scaled % 100)
}

fn row_cells(entry: &ReportEntry) -> Vec<String> {
    let ledger = &entry.ledger;
    vec![
        entry.framework.clone(),
        entry.model.clone(),
        entry.dataset.clone(),
        round2_string(ledger.metrics_true.precision),
        round2_string(ledger.metrics_true.recall),
        round2_string(ledger.metrics_true.f1),
        round2_string(ledger.metrics_false.precision),
        round2_string(ledger.metrics_false.recall),
        round2_string(ledger.metrics_false.f1),
        ledger.llm_cost.to_cents_string(),
        ledger.search_cost.to_cents_string(),
        round2_string(ledger.wall_time_seconds / 3600.0),
    ]
}

const HEADER: [&str; 12] = [
    "framework",
    "model",
    "dataset",
    "p_true",
    "r_true",
    "f1_true",
    "p_false",
    "r_false",
    "f1_false",
    "llm_cost_usd",
    "search_cost_usd",
    "time_hours",
];

/// Render per-class metric rows plus the cost table. Markdown and CSV carry
/// identical numeric cells.
pub fn emit_report(entries: &[ReportEntry], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(entries),
        ReportFormat::Markdown => emit_markdown(entries),
    }
}

fn emit_csv(entries: &[ReportEntry]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(HEADER).expect("csv header");
    for entry in entries {
        writer.write_record(row_cells(entry)).expect("csv row");
    }
    String::from_utf8(writer.into_inner().expect("csv buffer")).expect("csv utf8")
}

fn emit_markdown(entries: &[ReportEntry]) -> String {
    let mut out = String::new();
    out.push_str("# Results\n\n");
    out.push_str("| Framework | Model | Dataset | P (True) | R (True) | F1 (True) | P (False) | R (False) | F1 (False) |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for entry in entries {
        let cells = row_cells(entry);
        out.push_str(&format!("| {} |\n", cells[..9].join(" | ")));
    }
    out.push_str("\n# Cost\n\n");
    out.push_str("| Framework | Model | Dataset | LLM Cost (USD) | Search Cost (USD) | Time (hrs) |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    for entry in entries {
        let cells = row_cells(entry);
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            cells[0], cells[1], cells[2], cells[9], cells[10], cells[11]
        ));
    }
    out
}

/// `search_histogram.csv`: per bucket, how many claims took that many
/// searches and how many of those were misclassified.
pub fn emit_search_histogram(traces: &[ClaimTrace], golds: &[Claim]) -> String {
    let gold_by_id: std::collections::BTreeMap<&str, crate::types::Verdict> = golds
        .iter()
        .filter_map(|c| c.gold_label.map(|v| (c.id.as_str(), v)))
        .collect();
    let mut buckets: std::collections::BTreeMap<usize, (u64, u64)> =
        std::collections::BTreeMap::new();
    for trace in traces {
        let entry = buckets.entry(trace.search_count).or_insert((0, 0));
        entry.0 += 1;
        let misclassified = trace.is_scored()
            && match (trace.final_verdict, gold_by_id.get(trace.claim_id.as_str())) {
                (Some(pred), Some(gold)) => pred != *gold,
                _ => false,
            };
        if misclassified {
            entry.1 += 1;
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["searches", "instances", "misclassified_instances"]).expect("header");
    for (searches, (instances, misclassified)) in buckets {
        writer
            .write_record([
                searches.to_string(),
                instances.to_string(),
                misclassified.to_string(),
            ])
            .expect("row");
    }
    String::from_utf8(writer.into_inner().expect("csv buffer")).expect("csv utf8")
}

/// On-disk shape of `ledger.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerFile {
    pub framework: String,
    pub model: String,
    pub dataset: String,
    pub ledger: RunLedger,
}

/// Write `traces.jsonl`, `ledger.json`, `report.md`, `report.csv`, and
/// `search_histogram.csv` into `dir`.
pub fn write_run_artifacts(
    dir: &Path,
    entry: &ReportEntry,
    traces: &[ClaimTrace],
    golds: &[Claim],
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut jsonl = std::fs::File::create(dir.join("traces.jsonl"))?;
    for trace in traces {
        serde_json::to_writer(&mut jsonl, trace)?;
        jsonl.write_all(b"\n")?;
    }

    let ledger_file = LedgerFile {
        framework: entry.framework.clone(),
        model: entry.model.clone(),
        dataset: entry.dataset.clone(),
        ledger: entry.ledger.clone(),
    };
    std::fs::write(
        dir.join("ledger.json"),
        serde_json::to_string_pretty(&ledger_file).expect("ledger json"),
    )?;
    std::fs::write(
        dir.join("report.md"),
        emit_report(std::slice::from_ref(entry), ReportFormat::Markdown),
    )?;
    std::fs::write(
        dir.join("report.csv"),
        emit_report(std::slice::from_ref(entry), ReportFormat::Csv),
    )?;
    std::fs::write(dir.join("search_histogram.csv"), emit_search_histogram(traces, golds))?;
    Ok(())
}

/// Count of aborted traces, for operator-facing summaries.
pub fn aborted_count(traces: &[ClaimTrace]) -> usize {
    traces.iter().filter(|t| matches!(t.status, TraceStatus::Aborted { .. })).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::metrics::ClassMetrics;
    use crate::money::Money;
    use crate::types::Verdict;
    use std::collections::BTreeMap;

    fn entry(p: f64, r: f64, f1: f64) -> ReportEntry {
        ReportEntry {
            framework: "always-true".into(),
            model: "-".into(),
            dataset: "factool_qa".into(),
            ledger: RunLedger {
                llm_cost: Money::ZERO,
                search_cost: Money::ZERO,
                wall_time_seconds: 0.0,
                per_claim_search_histogram: BTreeMap::new(),
                metrics_true: ClassMetrics { precision: p, recall: r, f1 },
                metrics_false: ClassMetrics::default(),
                excluded_count: 0,
            },
        }
    }

    #[test]
    fn rounding_is_half_up_at_two_decimals() {
        assert_eq!(round2_string(0.759656), "0.76");
        assert_eq!(round2_string(0.863414), "0.86");
        assert_eq!(round2_string(0.005), "0.01");
        assert_eq!(round2_string(0.0), "0.00");
        assert_eq!(round2_string(1.0), "1.00");
    }

    #[test]
    fn csv_contains_the_flattened_metric_cells() {
        let csv = emit_report(&[entry(0.759656, 1.0, 0.863414)], ReportFormat::Csv);
        assert!(csv.contains("0.76,1.00,0.86,0.00,0.00,0.00"), "csv was:\n{csv}");
        assert!(csv.starts_with("framework,model,dataset,"));
    }

    #[test]
    fn empty_input_renders_header_only() {
        let csv = emit_report(&[], ReportFormat::Csv);
        assert_eq!(csv.lines().count(), 1);
        let md = emit_report(&[], ReportFormat::Markdown);
        assert!(md.contains("# Results"));
        assert!(md.contains("# Cost"));
    }

    #[test]
    fn markdown_and_csv_share_numeric_cells() {
        let e = entry(0.123456, 0.98765, 0.5);
        let csv = emit_report(std::slice::from_ref(&e), ReportFormat::Csv);
        let md = emit_report(std::slice::from_ref(&e), ReportFormat::Markdown);
        for cell in ["0.12", "0.99", "0.50"] {
            assert!(csv.contains(cell));
            assert!(md.contains(cell));
        }
    }

    #[test]
    fn histogram_csv_reports_misclassified_split() {
        let golds = vec![
            Claim::new("a", "x").unwrap().with_gold(Verdict::Factual),
            Claim::new("b", "y").unwrap().with_gold(Verdict::Factual),
            Claim::new("c", "z").unwrap().with_gold(Verdict::NonFactual),
        ];
        let mut ta = ClaimTrace::new("a");
        ta.final_verdict = Some(Verdict::Factual);
        let mut tb = ClaimTrace::new("b");
        tb.final_verdict = Some(Verdict::NonFactual); // wrong
        let mut tc = ClaimTrace::new("c");
        tc.search_count = 2;
        tc.final_verdict = Some(Verdict::NonFactual);
        let csv = emit_search_histogram(&[ta, tb, tc], &golds);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "searches,instances,misclassified_instances");
        assert_eq!(lines[1], "0,2,1");
        assert_eq!(lines[2], "2,1,0");
    }
}
