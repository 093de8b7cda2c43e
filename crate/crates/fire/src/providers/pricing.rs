//! Per-model token rates and the per-request search rate.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Completion, ProviderError};
use crate::money::Money;

/// USD per million prompt/completion tokens for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRate {
    pub prompt_usd_per_million: Money,
    pub completion_usd_per_million: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PricingTable {
    pub models: BTreeMap<String, ModelRate>,
    pub search_usd_per_request: Money,
}

impl Default for PricingTable {
    fn default() -> Self {
        PricingTable {
            models: BTreeMap::new(),
            search_usd_per_request: "0.00105".parse().expect("default search rate"),
        }
    }
}

impl PricingTable {
    pub fn from_toml_str(s: &str) -> Result<PricingTable, toml::de::Error> {
        toml::from_str(s)
    }

    pub fn from_path(path: &Path) -> Result<PricingTable, String> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read pricing file {}: {e}", path.display()))?;
        Self::from_toml_str(&raw).map_err(|e| format!("invalid pricing file {}: {e}", path.display()))
    }

    pub fn with_model(mut self, model_id: &str, prompt: Money, completion: Money) -> PricingTable {
        self.models.insert(
            model_id.to_string(),
            ModelRate { prompt_usd_per_million: prompt, completion_usd_per_million: completion },
        );
        self
    }

    pub fn rate_for(&self, model_id: &str) -> Option<&ModelRate> {
        self.models.get(model_id)
    }

    /// Cost of one completion, zero when the model has no pricing entry.
    /// The agent loop uses this so scripted runs do not need pricing rows.
    pub fn llm_cost_or_zero(&self, usage: &Completion) -> Money {
        llm_cost(usage, self).unwrap_or(Money::ZERO)
    }
}

/// `prompt_tokens * rate_in / 1e6 + completion_tokens * rate_out / 1e6`,
/// exact in fixed-point decimal.
pub fn llm_cost(usage: &Completion, pricing: &PricingTable) -> Result<Money, ProviderError> {
    let rate = pricing
        .rate_for(&usage.model_id)
        .ok_or_else(|| ProviderError::UnknownModel(usage.model_id.clone()))?;
    Ok(rate.prompt_usd_per_million.per_million(usage.prompt_tokens)
        + rate.completion_usd_per_million.per_million(usage.completion_tokens))
}

/// `request_count` times the per-search rate.
pub fn search_cost(request_count: u64, pricing: &PricingTable) -> Money {
    pricing.search_usd_per_request.times(request_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn usd(s: &str) -> Money {
        s.parse().unwrap()
    }

    fn usage(model: &str, prompt: u64, completion: u64) -> Completion {
        Completion {
            text: String::new(),
            prompt_tokens: prompt,
            completion_tokens: completion,
            model_id: model.to_string(),
        }
    }

    #[test]
    fn llm_cost_follows_token_rates() {
        let pricing = PricingTable::default().with_model("m", usd("0.15"), usd("0.60"));
        assert_eq!(llm_cost(&usage("m", 1_000_000, 0), &pricing).unwrap(), usd("0.15"));
        assert_eq!(llm_cost(&usage("m", 0, 0), &pricing).unwrap(), Money::ZERO);
        assert_eq!(llm_cost(&usage("m", 500_000, 200_000), &pricing).unwrap(), usd("0.195"));
    }

    #[test]
    fn unknown_model_is_an_error() {
        let pricing = PricingTable::default();
        assert!(matches!(
            llm_cost(&usage("ghost", 1, 1), &pricing),
            Err(ProviderError::UnknownModel(_))
        ));
        assert_eq!(pricing.llm_cost_or_zero(&usage("ghost", 1, 1)), Money::ZERO);
    }

    #[test]
    fn search_cost_scales_linearly() {
        let pricing = PricingTable::default();
        assert_eq!(search_cost(0, &pricing), Money::ZERO);
        assert_eq!(search_cost(1, &pricing), usd("0.00105"));
        assert_eq!(search_cost(1000, &pricing), usd("1.05"));
    }

    #[test]
    fn pricing_parses_from_toml() {
        let table = PricingTable::from_toml_str(
            r#"
search_usd_per_request = "0.00105"

[models."gpt-4o-mini"]
prompt_usd_per_million = "0.15"
completion_usd_per_million = "0.60"
"#,
        )
        .unwrap();
        assert_eq!(table.search_usd_per_request, usd("0.00105"));
        let rate = table.rate_for("gpt-4o-mini").unwrap();
        assert_eq!(rate.prompt_usd_per_million, usd("0.15"));
        assert_eq!(rate.completion_usd_per_million, usd("0.60"));
    }

    #[test]
    fn cost_is_additive_over_call_sequences() {
        let pricing = PricingTable::default().with_model("m", usd("0.3"), usd("1.2"));
        let calls = [usage("m", 123, 45), usage("m", 6789, 10), usage("m", 0, 99999)];
        let summed: Money = calls.iter().map(|u| llm_cost(u, &pricing).unwrap()).sum();
        let combined = usage("m", 123 + 6789, 45 + 10 + 99999);
        assert_eq!(summed, llm_cost(&combined, &pricing).unwrap());
    }
}
