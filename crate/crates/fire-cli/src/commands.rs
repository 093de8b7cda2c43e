//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context, Result};

use fire::agent::{digest_text, verify_claim, TraceStatus};
use fire::datasets::{
    load_dataset, sample_subset, write_normalized, AdapterKind, DatasetManifest, LoadedDataset,
};
use fire::evaluation::{
    emit_report, run, write_run_artifacts, LedgerFile, ReportEntry, ReportFormat, RunOptions,
    RunnerSpec,
};
use fire::types::{Claim, Verdict};

use crate::config::{resolve, ResolvedConfig};
use crate::providers_setup::{self, build};
use crate::{AgentFlags, RunnerArg};

/// `fire verify <claim>` — exits 0 for Factual, 1 for Non-Factual, 2 on error.
pub fn verify(
    claim_text: &str,
    out: Option<PathBuf>,
    seed: Option<u64>,
    config_path: Option<&Path>,
    flags: &AgentFlags,
) -> Result<u8> {
    let config = resolve(config_path, flags)?;
    providers_setup::require_no_scripted_conflicts(&config)?;
    let digest = digest_text(claim_text);
    let claim = Claim::new(format!("cli-{}", &digest[..12]), claim_text)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    if flags.dry_run {
        println!("dry run: would verify claim {:?}", claim.id);
        println!("  model: {}", config.llm_model);
        println!("  agent: {:?}", config.agent);
        // Providers are contact traps in dry-run mode; building them proves
        // configuration resolves without any call.
        let _ = build(&config, true)?;
        return Ok(0);
    }

    let built = build(&config, false)?;
    let mut trace = verify_claim(&claim, &config.agent, &built.set);
    if built.deterministic {
        trace.wall_time_seconds = 0.0;
    }

    let out_dir = out.unwrap_or_else(|| config.out_dir.join(format!("verify-{}", &digest[..12])));
    std::fs::create_dir_all(&out_dir)?;
    write_config_echo(&out_dir, &config, seed)?;
    std::fs::write(out_dir.join("trace.json"), serde_json::to_string_pretty(&trace)?)?;

    match (&trace.status, trace.final_verdict) {
        (TraceStatus::Completed, Some(verdict)) => {
            println!("{} ({} searches)", verdict.label(&config.agent.labels), trace.search_count);
            println!(
                "llm cost: ${} | search cost: ${}",
                trace.total_llm_cost.to_decimal_string(),
                trace.total_search_cost.to_decimal_string()
            );
            println!("trace: {}", out_dir.join("trace.json").display());
            Ok(match verdict {
                Verdict::Factual => 0,
                Verdict::NonFactual => 1,
            })
        }
        (TraceStatus::Excluded { reason }, _) => {
            eprintln!("no verdict: {reason}");
            Ok(2)
        }
        (TraceStatus::Aborted { error }, _) => {
            eprintln!("aborted: {error}");
            Ok(2)
        }
        (TraceStatus::Completed, None) => unreachable!("completed trace without verdict"),
    }
}

/// `fire run --dataset ... --runner ...`
#[allow(clippy::too_many_arguments)]
pub fn run_dataset(
    dataset: &Path,
    runner: RunnerArg,
    seed: Option<u64>,
    out: Option<PathBuf>,
    config_path: Option<&Path>,
    flags: &AgentFlags,
    cancel: Arc<AtomicBool>,
) -> Result<u8> {
    let config = resolve(config_path, flags)?;
    providers_setup::require_no_scripted_conflicts(&config)?;
    let loaded = load_claims(dataset)?;
    if let Some(warning) = &loaded.manifest_mismatch {
        eprintln!("warning: {warning}");
    }
    if loaded.claims.is_empty() {
        bail!("dataset {} contains no claims", dataset.display());
    }
    let kind = runner.into_kind(seed.unwrap_or(0));
    let spec = RunnerSpec { kind, agent_config: config.agent.clone() };
    let dataset_name =
        dataset.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();

    if flags.dry_run {
        println!("dry run: would evaluate {} claims from {}", loaded.claims.len(), dataset_name);
        println!("  runner: {} | parallelism: {}", kind.name(), config.parallelism);
        println!("  agent: {:?}", spec.effective_config());
        let _ = build(&config, true)?;
        return Ok(0);
    }

    let built = if kind.is_fire() { Some(build(&config, false)?) } else { None };
    let zero_wall_time = built.as_ref().is_none_or(|b| b.deterministic);
    let options = RunOptions { zero_wall_time, cancel: Some(cancel.clone()) };
    let model_id =
        built.as_ref().map_or_else(|| "-".to_string(), |b| b.set.model_id.clone());

    let outcome = run(
        &spec,
        &loaded.claims,
        built.as_ref().map(|b| &b.set),
        config.parallelism,
        &options,
    )?;

    let out_dir = out.unwrap_or_else(|| {
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        config.out_dir.join(format!("{stamp}-{}", kind.name()))
    });
    let entry = ReportEntry {
        framework: kind.name().to_string(),
        model: model_id,
        dataset: dataset_name,
        ledger: outcome.ledger.clone(),
    };
    std::fs::create_dir_all(&out_dir)?;
    write_config_echo(&out_dir, &config, seed)?;
    write_run_artifacts(&out_dir, &entry, &outcome.traces, &loaded.claims)?;

    let aborted = fire::evaluation::aborted_count(&outcome.traces);
    println!(
        "{} on {} | claims: {} | excluded: {} | aborted: {}",
        entry.framework,
        entry.dataset,
        loaded.claims.len(),
        outcome.ledger.excluded_count,
        aborted
    );
    print!("{}", emit_report(std::slice::from_ref(&entry), ReportFormat::Markdown));
    println!("artifacts: {}", out_dir.display());

    if cancel.load(Ordering::SeqCst) {
        eprintln!("interrupted: completed traces flushed to {}", out_dir.display());
        return Ok(130);
    }
    Ok(0)
}

/// `fire datasets normalize`
pub fn normalize(
    raw: &Path,
    adapter: Option<&str>,
    out: Option<PathBuf>,
    sample_true: Option<usize>,
    seed: Option<u64>,
    dry_run: bool,
) -> Result<u8> {
    let manifest = if raw.extension().is_some_and(|e| e == "toml") {
        DatasetManifest::from_toml_path(raw).map_err(|e| anyhow::anyhow!("{e}"))?
    } else {
        let name = raw.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let adapter_name = adapter.context("--adapter is required for non-manifest inputs")?;
        let kind = AdapterKind::parse(adapter_name).with_context(|| {
            format!("unknown adapter {adapter_name:?}; valid adapters: {}", AdapterKind::NAMES.join(", "))
        })?;
        DatasetManifest::new(&name, kind, raw)
    };

    let loaded = load_dataset(&manifest).map_err(|e| anyhow::anyhow!("{e}"))?;
    if let Some(warning) = &loaded.manifest_mismatch {
        eprintln!("warning: {warning}");
    }

    let claims = match sample_true {
        Some(count) => {
            sample_subset(&loaded.claims, Verdict::Factual, count, seed.unwrap_or(0))
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        None => loaded.claims.clone(),
    };
    let factual = claims.iter().filter(|c| c.gold_label == Some(Verdict::Factual)).count();
    let non_factual = claims.iter().filter(|c| c.gold_label == Some(Verdict::NonFactual)).count();
    println!("Factual: {factual}, Non-Factual: {non_factual}");
    if loaded.excluded_count > 0 {
        println!("excluded (not supported): {}", loaded.excluded_count);
    }

    if dry_run {
        return Ok(0);
    }
    let out_path = out.unwrap_or_else(|| raw.with_extension("normalized.jsonl"));
    let mut writer = std::io::BufWriter::new(std::fs::File::create(&out_path)?);
    write_normalized(&claims, &mut writer)?;
    use std::io::Write;
    writer.flush()?;
    println!("wrote {} claims to {}", claims.len(), out_path.display());
    Ok(0)
}

/// `fire report <run-dir>...`
pub fn report(run_dirs: &[PathBuf], out: Option<PathBuf>) -> Result<u8> {
    if run_dirs.is_empty() {
        bail!("no run directories given");
    }
    let mut entries = Vec::new();
    for dir in run_dirs {
        let path = dir.join("ledger.json");
        let raw = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let ledger: LedgerFile = serde_json::from_str(&raw)
            .with_context(|| format!("invalid ledger {}", path.display()))?;
        entries.push(ReportEntry {
            framework: ledger.framework,
            model: ledger.model,
            dataset: ledger.dataset,
            ledger: ledger.ledger,
        });
    }
    print!("{}", emit_report(&entries, ReportFormat::Markdown));
    if let Some(out_dir) = out {
        std::fs::create_dir_all(&out_dir)?;
        std::fs::write(out_dir.join("report.md"), emit_report(&entries, ReportFormat::Markdown))?;
        std::fs::write(out_dir.join("report.csv"), emit_report(&entries, ReportFormat::Csv))?;
        println!("reports written to {}", out_dir.display());
    }
    Ok(0)
}

fn load_claims(dataset: &Path) -> Result<LoadedDataset> {
    let manifest = if dataset.extension().is_some_and(|e| e == "toml") {
        DatasetManifest::from_toml_path(dataset).map_err(|e| anyhow::anyhow!("{e}"))?
    } else {
        let name =
            dataset.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        DatasetManifest::new(&name, AdapterKind::Normalized, dataset)
    };
    load_dataset(&manifest).map_err(|e| anyhow::anyhow!("{e}"))
}

/// `config.json`: the resolved configuration (secrets redacted) plus the seed
/// actually used, so a run can be re-issued from its artifacts.
fn write_config_echo(out_dir: &Path, config: &ResolvedConfig, seed: Option<u64>) -> Result<()> {
    let mut echo = serde_json::to_value(config)?;
    echo["seed"] = serde_json::to_value(seed)?;
    std::fs::write(out_dir.join("config.json"), serde_json::to_string_pretty(&echo)?)?;
    Ok(())
}
