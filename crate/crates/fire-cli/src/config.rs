//! Configuration resolution: flags override environment, environment
//! overrides the `fire.toml` file, and everything has a default.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fire::providers::{
    PricingTable, LLM_API_KEY_ENV, LLM_BASE_URL_ENV, LLM_MODEL_ENV, SERP_API_KEY_ENV,
};
use fire::types::{AgentConfig, MalformedPolicy, PromptVariant};

use crate::AgentFlags;

pub const DEFAULT_CONFIG_FILE: &str = "fire.toml";
const DEFAULT_LLM_BASE_URL: &str = "https://api.openai.com/v1";
const DEFAULT_MODEL: &str = "gpt-4o-mini";

/// On-disk `fire.toml` shape; every section optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default)]
pub struct ConfigFile {
    pub provider: ProviderSection,
    pub pricing: PricingSection,
    pub agent: AgentSection,
    pub run: RunSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default)]
pub struct ProviderSection {
    pub llm_base_url: Option<String>,
    pub llm_api_key: Option<String>,
    pub llm_model: Option<String>,
    pub serp_api_key: Option<String>,
    pub max_snippets: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default)]
pub struct PricingSection {
    pub path: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default)]
pub struct AgentSection {
    pub max_steps: Option<usize>,
    pub prompt_variant: Option<PromptVariant>,
    pub search_enabled: Option<bool>,
    pub early_termination_window: Option<usize>,
    pub diversity_prompt: Option<bool>,
    pub similarity_threshold: Option<f32>,
    pub parse_retries: Option<usize>,
    pub malformed_policy: Option<MalformedPolicy>,
    pub enforce_min_evidence: Option<bool>,
    pub count_similar_pairs: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default)]
pub struct RunSection {
    pub parallelism: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

/// Fully merged view of file, environment, and flags. This is what gets
/// echoed (secrets redacted) into `runs/<run-id>/config.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub llm_base_url: String,
    #[serde(serialize_with = "redact")]
    pub llm_api_key: Option<String>,
    pub llm_model: String,
    #[serde(serialize_with = "redact")]
    pub serp_api_key: Option<String>,
    pub max_snippets: Option<usize>,
    pub pricing_path: Option<PathBuf>,
    pub agent: AgentConfig,
    pub parallelism: usize,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub replay: bool,
    pub scripted: Option<PathBuf>,
}

fn redact<S: serde::Serializer>(key: &Option<String>, s: S) -> Result<S::Ok, S::Error> {
    match key {
        Some(_) => s.serialize_str("***"),
        None => s.serialize_none(),
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.is_empty())
}

pub fn resolve(config_path: Option<&Path>, flags: &AgentFlags) -> Result<ResolvedConfig> {
    let file: ConfigFile = match config_path {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            toml::from_str(&raw)
                .with_context(|| format!("invalid config file {}", path.display()))?
        }
        None if Path::new(DEFAULT_CONFIG_FILE).exists() => {
            let raw = std::fs::read_to_string(DEFAULT_CONFIG_FILE)?;
            toml::from_str(&raw).context("invalid fire.toml")?
        }
        None => ConfigFile::default(),
    };

    let mut agent = AgentConfig {
        max_steps: file.agent.max_steps.unwrap_or(5),
        search_enabled: file.agent.search_enabled.unwrap_or(true),
        early_termination_window: file.agent.early_termination_window,
        diversity_prompt: file.agent.diversity_prompt.unwrap_or(false),
        parse_retries: file.agent.parse_retries.unwrap_or(1),
        ..AgentConfig::default()
    };
    if let Some(v) = file.agent.prompt_variant {
        agent.prompt_variant = v;
    }
    if let Some(t) = file.agent.similarity_threshold {
        agent.similarity_threshold = t;
    }
    if let Some(p) = file.agent.malformed_policy {
        agent.malformed_policy = p;
    }
    if let Some(e) = file.agent.enforce_min_evidence {
        agent.enforce_min_evidence = e;
    }
    if let Some(c) = file.agent.count_similar_pairs {
        agent.count_similar_pairs = c;
    }

    // Flags win over everything.
    if let Some(n) = flags.max_steps {
        agent.max_steps = n;
    }
    if let Some(w) = flags.window {
        agent.early_termination_window = Some(w);
    }
    if flags.diversity {
        agent.diversity_prompt = true;
    }
    if let Some(variant) = flags.prompt_variant {
        agent.prompt_variant = variant.into();
    }
    if flags.no_reason {
        agent.prompt_variant = PromptVariant::NoReason;
    }
    if flags.no_search {
        agent.search_enabled = false;
    }
    agent.validate().map_err(|e| anyhow::anyhow!("{e}"))?;

    let resolved = ResolvedConfig {
        llm_base_url: env_var(LLM_BASE_URL_ENV)
            .or(file.provider.llm_base_url)
            .unwrap_or_else(|| DEFAULT_LLM_BASE_URL.to_string()),
        llm_api_key: env_var(LLM_API_KEY_ENV).or(file.provider.llm_api_key),
        llm_model: flags
            .model
            .clone()
            .or_else(|| env_var(LLM_MODEL_ENV))
            .or(file.provider.llm_model)
            .unwrap_or_else(|| DEFAULT_MODEL.to_string()),
        serp_api_key: env_var(SERP_API_KEY_ENV).or(file.provider.serp_api_key),
        max_snippets: file.provider.max_snippets,
        pricing_path: flags.pricing.clone().or(file.pricing.path),
        agent,
        parallelism: flags.parallelism.or(file.run.parallelism).unwrap_or(1),
        out_dir: file.run.out_dir.unwrap_or_else(|| PathBuf::from("runs")),
        cache_dir: file
            .run
            .cache_dir
            .unwrap_or_else(|| PathBuf::from(fire::providers::ResponseCache::DEFAULT_DIR)),
        replay: flags.replay,
        scripted: flags.scripted.clone(),
    };
    if resolved.parallelism == 0 {
        bail!("parallelism must be >= 1");
    }
    Ok(resolved)
}

impl ResolvedConfig {
    pub fn pricing(&self) -> Result<PricingTable> {
        match &self.pricing_path {
            Some(path) => PricingTable::from_path(path).map_err(|e| anyhow::anyhow!(e)),
            None => Ok(PricingTable::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> AgentFlags {
        AgentFlags::default()
    }

    #[test]
    fn defaults_apply_without_file_or_env() {
        let resolved = resolve(Some(Path::new("/nonexistent")), &flags());
        assert!(resolved.is_err(), "missing explicit config file should fail");

        // No file at all: defaults.
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("fire.toml");
        std::fs::write(&file, "").unwrap();
        let resolved = resolve(Some(&file), &flags()).unwrap();
        assert_eq!(resolved.llm_model, DEFAULT_MODEL);
        assert_eq!(resolved.agent.max_steps, 5);
        assert_eq!(resolved.parallelism, 1);
    }

    #[test]
    fn file_values_are_overridden_by_flags() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("fire.toml");
        std::fs::write(
            &file,
            r#"
[provider]
llm_model = "file-model"

[agent]
max_steps = 3
early_termination_window = 4

[run]
parallelism = 2
"#,
        )
        .unwrap();
        let resolved = resolve(Some(&file), &flags()).unwrap();
        assert_eq!(resolved.llm_model, "file-model");
        assert_eq!(resolved.agent.max_steps, 3);
        assert_eq!(resolved.agent.early_termination_window, Some(4));
        assert_eq!(resolved.parallelism, 2);

        let mut overridden = flags();
        overridden.model = Some("flag-model".into());
        overridden.max_steps = Some(9);
        overridden.window = Some(2);
        overridden.no_search = true;
        let resolved = resolve(Some(&file), &overridden).unwrap();
        assert_eq!(resolved.llm_model, "flag-model");
        assert_eq!(resolved.agent.max_steps, 9);
        assert_eq!(resolved.agent.early_termination_window, Some(2));
        assert!(!resolved.agent.search_enabled);
    }

    #[test]
    fn config_echo_redacts_secrets() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("fire.toml");
        std::fs::write(&file, "[provider]\nllm_api_key = \"sk-secret\"\n").unwrap();
        let resolved = resolve(Some(&file), &flags()).unwrap();
        let echoed = serde_json::to_string(&resolved).unwrap();
        assert!(!echoed.contains("sk-secret"));
        assert!(echoed.contains("***"));
    }
}
