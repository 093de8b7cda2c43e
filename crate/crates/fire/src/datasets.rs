//! Benchmark ingestion into the normalized claim format.
//!
//! Community releases differ in schema, so each adapter is a field map
//! (claim-text path, label path, label vocabulary) over one record per
//! claim; upstream drift is a config edit, not a code change. The harness
//! itself only ever consumes the normalized JSONL form.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::types::{Claim, SourceDataset, Verdict};

/// Label vocabulary of the four-way datasets plus plain binary labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RawLabel {
    Supported,
    PartiallySupported,
    NotSupported,
    Refuted,
    True,
    False,
}

/// Collapse four-way labels into the binary scheme:
/// supported and partially supported merge into Factual, refuted maps to
/// NonFactual, and not supported drops out entirely.
pub fn binarize_label(raw: RawLabel) -> Option<Verdict> {
    match raw {
        RawLabel::Supported | RawLabel::PartiallySupported | RawLabel::True => {
            Some(Verdict::Factual)
        }
        RawLabel::Refuted | RawLabel::False => Some(Verdict::NonFactual),
        RawLabel::NotSupported => None,
    }
}

/// How to read one record of a community release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    /// Dotted path to the claim sentence, e.g. "claim" or "response.text".
    pub claim_text: String,
    /// Dotted path to the label value (string or boolean).
    pub label: String,
    /// Dotted path to a stable id; omitted ids fall back to the record index.
    #[serde(default)]
    pub id: Option<String>,
    /// Lowercased label string to vocabulary entry. Empty means defaults.
    #[serde(default)]
    pub label_values: BTreeMap<String, RawLabel>,
}

impl FieldMap {
    pub fn simple(claim_text: &str, label: &str) -> FieldMap {
        FieldMap {
            claim_text: claim_text.to_string(),
            label: label.to_string(),
            id: None,
            label_values: BTreeMap::new(),
        }
    }

    fn lookup_label(&self, text: &str) -> Option<RawLabel> {
        let key = text.trim().to_lowercase();
        if let Some(label) = self.label_values.get(&key) {
            return Some(*label);
        }
        if !self.label_values.is_empty() {
            return None;
        }
        match key.as_str() {
            "supported" => Some(RawLabel::Supported),
            "partially supported" | "partially_supported" => Some(RawLabel::PartiallySupported),
            "not supported" | "not_supported" => Some(RawLabel::NotSupported),
            "refuted" => Some(RawLabel::Refuted),
            "true" | "factual" => Some(RawLabel::True),
            "false" | "non-factual" | "non_factual" => Some(RawLabel::False),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterKind {
    /// Our pinned interchange schema; loading it is the identity.
    Normalized,
    FactcheckBench,
    FactoolQa,
    FelmWk,
    Bingcheck,
    Custom,
}

impl AdapterKind {
    pub fn source(self) -> SourceDataset {
        match self {
            AdapterKind::FactcheckBench => SourceDataset::FactcheckBench,
            AdapterKind::FactoolQa => SourceDataset::FactoolQa,
            AdapterKind::FelmWk => SourceDataset::FelmWk,
            AdapterKind::Bingcheck => SourceDataset::BingCheck,
            AdapterKind::Normalized | AdapterKind::Custom => SourceDataset::Custom,
        }
    }

    /// Built-in field map; `Custom` has none and requires one in the manifest.
    /// Four-way label values parse only under the four-way adapters.
    pub fn default_field_map(self) -> Option<FieldMap> {
        let with_vocab = |vocab: BTreeMap<String, RawLabel>| {
            let mut map = FieldMap::simple("claim", "label");
            map.label_values = vocab;
            Some(map)
        };
        match self {
            AdapterKind::Normalized | AdapterKind::Custom => None,
            AdapterKind::FactcheckBench | AdapterKind::Bingcheck => with_vocab(four_way_vocabulary()),
            AdapterKind::FactoolQa | AdapterKind::FelmWk => with_vocab(binary_vocabulary()),
        }
    }

    pub fn parse(name: &str) -> Option<AdapterKind> {
        match name {
            "normalized" => Some(AdapterKind::Normalized),
            "factcheck_bench" => Some(AdapterKind::FactcheckBench),
            "factool_qa" => Some(AdapterKind::FactoolQa),
            "felm_wk" => Some(AdapterKind::FelmWk),
            "bingcheck" => Some(AdapterKind::Bingcheck),
            "custom" => Some(AdapterKind::Custom),
            _ => None,
        }
    }

    pub const NAMES: [&'static str; 6] =
        ["normalized", "factcheck_bench", "factool_qa", "felm_wk", "bingcheck", "custom"];
}

fn four_way_vocabulary() -> BTreeMap<String, RawLabel> {
    [
        ("supported", RawLabel::Supported),
        ("partially supported", RawLabel::PartiallySupported),
        ("partially_supported", RawLabel::PartiallySupported),
        ("not supported", RawLabel::NotSupported),
        ("not_supported", RawLabel::NotSupported),
        ("refuted", RawLabel::Refuted),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn binary_vocabulary() -> BTreeMap<String, RawLabel> {
    [
        ("true", RawLabel::True),
        ("false", RawLabel::False),
        ("factual", RawLabel::True),
        ("non-factual", RawLabel::False),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub adapter: AdapterKind,
    pub path: PathBuf,
    #[serde(default)]
    pub claim_count_true: Option<u64>,
    #[serde(default)]
    pub claim_count_false: Option<u64>,
    #[serde(default)]
    pub field_map: Option<FieldMap>,
}

impl DatasetManifest {
    pub fn new(name: &str, adapter: AdapterKind, path: impl Into<PathBuf>) -> DatasetManifest {
        DatasetManifest {
            name: name.to_string(),
            adapter,
            path: path.into(),
            claim_count_true: None,
            claim_count_false: None,
            field_map: None,
        }
    }

    pub fn with_expected_counts(mut self, factual: u64, non_factual: u64) -> DatasetManifest {
        self.claim_count_true = Some(factual);
        self.claim_count_false = Some(non_factual);
        self
    }

    /// Relative data paths are resolved against the manifest's directory.
    pub fn from_toml_path(path: &Path) -> Result<DatasetManifest, DatasetError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|_| DatasetError::FileNotFound(path.to_path_buf()))?;
        let mut manifest: DatasetManifest =
            toml::from_str(&raw).map_err(|e| DatasetError::InvalidManifest(e.to_string()))?;
        if manifest.path.is_relative() {
            if let Some(dir) = path.parent() {
                manifest.path = dir.join(&manifest.path);
            }
        }
        Ok(manifest)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("dataset file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("schema mismatch at record {record}: {reason}")]
    SchemaMismatch { record: usize, reason: String },
    #[error("requested {requested} claims but only {available} carry that label")]
    InsufficientClaims { requested: usize, available: usize },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
}

/// A loaded dataset with its processing tallies.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub claims: Vec<Claim>,
    pub factual_count: u64,
    pub non_factual_count: u64,
    /// Records dropped by binarization (not supported).
    pub excluded_count: u64,
    /// Set when the manifest's expected counts disagree with the file.
    pub manifest_mismatch: Option<String>,
}

/// One line of the normalized JSONL interchange format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NormalizedClaim {
    id: String,
    claim: String,
    label: Verdict,
    source: SourceDataset,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

/// Load and normalize a dataset per its manifest.
///
/// Gold labels are binarized, exclusions applied, and ids are stable across
/// reloads. When the manifest carries expected counts, a mismatch is recorded
/// and logged but does not fail the load.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<LoadedDataset, DatasetError> {
    let raw = std::fs::read_to_string(&manifest.path)
        .map_err(|_| DatasetError::FileNotFound(manifest.path.clone()))?;
    let records = parse_records(&raw)?;

    let mut claims = Vec::new();
    let mut excluded = 0u64;
    match manifest.adapter {
        AdapterKind::Normalized => {
            for (index, record) in records.into_iter().enumerate() {
                let parsed: NormalizedClaim =
                    serde_json::from_value(record).map_err(|e| DatasetError::SchemaMismatch {
                        record: index,
                        reason: e.to_string(),
                    })?;
                let mut claim = Claim::new(parsed.id, parsed.claim).map_err(|e| {
                    DatasetError::SchemaMismatch { record: index, reason: e.to_string() }
                })?;
                claim.gold_label = Some(parsed.label);
                claim.source_dataset = parsed.source;
                claim.meta = parsed.meta;
                claims.push(claim);
            }
        }
        adapter => {
            let field_map = manifest
                .field_map
                .clone()
                .or_else(|| adapter.default_field_map())
                .ok_or_else(|| {
                    DatasetError::InvalidManifest(
                        "custom adapter requires a field_map".to_string(),
                    )
                })?;
            for (index, record) in records.into_iter().enumerate() {
                match normalize_record(&record, index, manifest, &field_map, adapter)? {
                    Some(claim) => claims.push(claim),
                    None => excluded += 1,
                }
            }
        }
    }

    ensure_unique_ids(&claims)?;
    let factual_count =
        claims.iter().filter(|c| c.gold_label == Some(Verdict::Factual)).count() as u64;
    let non_factual_count =
        claims.iter().filter(|c| c.gold_label == Some(Verdict::NonFactual)).count() as u64;

    let manifest_mismatch = match (manifest.claim_count_true, manifest.claim_count_false) {
        (Some(t), _) if t != factual_count => Some(format!(
            "manifest expects {t} Factual claims, file has {factual_count}"
        )),
        (_, Some(f)) if f != non_factual_count => Some(format!(
            "manifest expects {f} Non-Factual claims, file has {non_factual_count}"
        )),
        _ => None,
    };
    if let Some(msg) = &manifest_mismatch {
        log::warn!("{}: {msg}", manifest.name);
    }

    Ok(LoadedDataset {
        claims,
        factual_count,
        non_factual_count,
        excluded_count: excluded,
        manifest_mismatch,
    })
}

fn parse_records(raw: &str) -> Result<Vec<serde_json::Value>, DatasetError> {
    let trimmed = raw.trim_start();
    let records: Vec<serde_json::Value> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| DatasetError::SchemaMismatch {
            record: 0,
            reason: format!("not a JSON array: {e}"),
        })?
    } else {
        let mut out = Vec::new();
        for (line_no, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(line).map_err(|e| DatasetError::SchemaMismatch {
                record: line_no,
                reason: format!("invalid JSON line: {e}"),
            })?);
        }
        out
    };
    if records.is_empty() {
        return Err(DatasetError::SchemaMismatch {
            record: 0,
            reason: "file contains no records".to_string(),
        });
    }
    Ok(records)
}

fn normalize_record(
    record: &serde_json::Value,
    index: usize,
    manifest: &DatasetManifest,
    field_map: &FieldMap,
    adapter: AdapterKind,
) -> Result<Option<Claim>, DatasetError> {
    let mismatch = |reason: String| DatasetError::SchemaMismatch { record: index, reason };

    let text = lookup(record, &field_map.claim_text)
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| mismatch(format!("no claim text at {:?}", field_map.claim_text)))?;

    let label_value = lookup(record, &field_map.label)
        .ok_or_else(|| mismatch(format!("no label at {:?}", field_map.label)))?;
    let label_text = match label_value {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Bool(b) => b.to_string(),
        other => return Err(mismatch(format!("label is neither string nor bool: {other}"))),
    };
    let raw_label = field_map
        .lookup_label(&label_text)
        .ok_or_else(|| mismatch(format!("unknown label value {label_text:?}")))?;

    let Some(verdict) = binarize_label(raw_label) else {
        return Ok(None);
    };

    let id = match &field_map.id {
        Some(path) => lookup(record, path)
            .map(|v| match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .ok_or_else(|| mismatch(format!("no id at {path:?}")))?,
        None => format!("{}-{index:05}", manifest.name),
    };

    let mut claim =
        Claim::new(id, text).map_err(|e| mismatch(e.to_string()))?;
    claim.gold_label = Some(verdict);
    claim.source_dataset = adapter.source();
    claim.meta.insert("raw_label".to_string(), label_text.trim().to_lowercase());
    Ok(Some(claim))
}

fn ensure_unique_ids(claims: &[Claim]) -> Result<(), DatasetError> {
    let mut seen = std::collections::BTreeSet::new();
    for (index, claim) in claims.iter().enumerate() {
        if !seen.insert(claim.id.as_str()) {
            return Err(DatasetError::SchemaMismatch {
                record: index,
                reason: format!("duplicate claim id {:?}", claim.id),
            });
        }
    }
    Ok(())
}

/// Dotted-path lookup; numeric segments index into arrays.
fn lookup<'a>(value: &'a serde_json::Value, path: &str) -> Option<&'a serde_json::Value> {
    path.split('.').try_fold(value, |acc, segment| match segment.parse::<usize>() {
        Ok(index) => acc.get(index),
        Err(_) => acc.get(segment),
    })
}

/// Keep a seeded sample of `count` claims carrying `keep_label` plus every
/// claim of the other label, preserving the original relative order.
pub fn sample_subset(
    claims: &[Claim],
    keep_label: Verdict,
    count: usize,
    seed: u64,
) -> Result<Vec<Claim>, DatasetError> {
    let keep_indices: Vec<usize> = claims
        .iter()
        .enumerate()
        .filter(|(_, c)| c.gold_label == Some(keep_label))
        .map(|(i, _)| i)
        .collect();
    if count > keep_indices.len() {
        return Err(DatasetError::InsufficientClaims {
            requested: count,
            available: keep_indices.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: std::collections::BTreeSet<usize> =
        rand::seq::index::sample(&mut rng, keep_indices.len(), count)
            .into_iter()
            .map(|i| keep_indices[i])
            .collect();
    Ok(claims
        .iter()
        .enumerate()
        .filter(|(i, c)| match c.gold_label {
            Some(label) if label == keep_label => chosen.contains(i),
            Some(_) => true,
            None => false,
        })
        .map(|(_, c)| c.clone())
        .collect())
}

/// Write claims as normalized JSONL.
pub fn write_normalized(claims: &[Claim], writer: &mut impl Write) -> std::io::Result<()> {
    for claim in claims {
        let label = claim.gold_label.ok_or_else(|| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("claim {:?} has no gold label", claim.id),
            )
        })?;
        let line = NormalizedClaim {
            id: claim.id.clone(),
            claim: claim.text.clone(),
            label,
            source: claim.source_dataset,
            meta: claim.meta.clone(),
        };
        serde_json::to_writer(&mut *writer, &line)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binarization_follows_the_merge_rule() {
        assert_eq!(binarize_label(RawLabel::Supported), Some(Verdict::Factual));
        assert_eq!(binarize_label(RawLabel::PartiallySupported), Some(Verdict::Factual));
        assert_eq!(binarize_label(RawLabel::Refuted), Some(Verdict::NonFactual));
        assert_eq!(binarize_label(RawLabel::NotSupported), None);
        assert_eq!(binarize_label(RawLabel::True), Some(Verdict::Factual));
        assert_eq!(binarize_label(RawLabel::False), Some(Verdict::NonFactual));
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), content).unwrap();
        file
    }

    #[test]
    fn loads_four_way_jsonl_with_exclusions() {
        let file = write_temp(
            r#"{"claim": "a", "label": "supported"}
{"claim": "b", "label": "partially supported"}
{"claim": "c", "label": "not supported"}
{"claim": "d", "label": "refuted"}
"#,
        );
        let manifest = DatasetManifest::new("fcb", AdapterKind::FactcheckBench, file.path());
        let loaded = load_dataset(&manifest).unwrap();
        assert_eq!(loaded.factual_count, 2);
        assert_eq!(loaded.non_factual_count, 1);
        assert_eq!(loaded.excluded_count, 1);
        assert_eq!(loaded.claims[0].id, "fcb-00000");
        assert_eq!(loaded.claims[2].id, "fcb-00003");
        assert_eq!(loaded.claims[0].source_dataset, SourceDataset::FactcheckBench);
        assert_eq!(loaded.claims[0].meta["raw_label"], "supported");
        assert!(loaded.manifest_mismatch.is_none());
    }

    #[test]
    fn loads_json_array_with_boolean_labels() {
        let file = write_temp(r#"[{"claim": "x", "label": true}, {"claim": "y", "label": false}]"#);
        let manifest = DatasetManifest::new("ft", AdapterKind::FactoolQa, file.path());
        let loaded = load_dataset(&manifest).unwrap();
        assert_eq!(loaded.factual_count, 1);
        assert_eq!(loaded.non_factual_count, 1);
    }

    #[test]
    fn load_is_idempotent() {
        let file = write_temp(
            r#"{"claim": "a", "label": "true"}
{"claim": "b", "label": "false"}
"#,
        );
        let manifest = DatasetManifest::new("d", AdapterKind::FelmWk, file.path());
        let first = load_dataset(&manifest).unwrap();
        let second = load_dataset(&manifest).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn empty_file_is_a_schema_mismatch() {
        let file = write_temp("");
        let manifest = DatasetManifest::new("d", AdapterKind::FactoolQa, file.path());
        assert!(matches!(
            load_dataset(&manifest),
            Err(DatasetError::SchemaMismatch { record: 0, .. })
        ));
    }

    #[test]
    fn schema_errors_name_the_offending_record() {
        let file = write_temp(
            r#"{"claim": "a", "label": "true"}
{"claim": "b"}
"#,
        );
        let manifest = DatasetManifest::new("d", AdapterKind::FactoolQa, file.path());
        match load_dataset(&manifest) {
            Err(DatasetError::SchemaMismatch { record, reason }) => {
                assert_eq!(record, 1);
                assert!(reason.contains("label"));
            }
            other => panic!("expected schema mismatch, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_file_not_found() {
        let manifest =
            DatasetManifest::new("d", AdapterKind::FactoolQa, "/nonexistent/nowhere.jsonl");
        assert!(matches!(load_dataset(&manifest), Err(DatasetError::FileNotFound(_))));
    }

    #[test]
    fn manifest_count_mismatch_is_recorded_not_fatal() {
        let file = write_temp(r#"{"claim": "a", "label": "true"}"#);
        let manifest = DatasetManifest::new("d", AdapterKind::FactoolQa, file.path())
            .with_expected_counts(2, 0);
        let loaded = load_dataset(&manifest).unwrap();
        assert!(loaded.manifest_mismatch.is_some());
        assert_eq!(loaded.claims.len(), 1);
    }

    #[test]
    fn binary_adapters_reject_four_way_labels() {
        let file = write_temp(r#"{"claim": "a", "label": "supported"}"#);
        let manifest = DatasetManifest::new("d", AdapterKind::FactoolQa, file.path());
        match load_dataset(&manifest) {
            Err(DatasetError::SchemaMismatch { reason, .. }) => {
                assert!(reason.contains("supported"));
            }
            other => panic!("expected schema mismatch, got {other:?}"),
        }
    }

    #[test]
    fn custom_adapter_uses_nested_paths() {
        let file = write_temp(
            r#"{"item": {"sentence": "deep claim", "verdict": "refuted"}, "key": "z9"}"#,
        );
        let mut manifest = DatasetManifest::new("c", AdapterKind::Custom, file.path());
        manifest.field_map = Some(FieldMap {
            claim_text: "item.sentence".into(),
            label: "item.verdict".into(),
            id: Some("key".into()),
            label_values: BTreeMap::new(),
        });
        let loaded = load_dataset(&manifest).unwrap();
        assert_eq!(loaded.claims[0].id, "z9");
        assert_eq!(loaded.claims[0].text, "deep claim");
        assert_eq!(loaded.claims[0].gold_label, Some(Verdict::NonFactual));
    }

    #[test]
    fn custom_adapter_without_field_map_is_invalid() {
        let file = write_temp(r#"{"claim": "a", "label": "true"}"#);
        let manifest = DatasetManifest::new("c", AdapterKind::Custom, file.path());
        assert!(matches!(load_dataset(&manifest), Err(DatasetError::InvalidManifest(_))));
    }

    fn synthetic_claims(factual: usize, non_factual: usize) -> Vec<Claim> {
        let mut out = Vec::new();
        for i in 0..(factual + non_factual) {
            let label = if i < factual { Verdict::Factual } else { Verdict::NonFactual };
            out.push(Claim::new(format!("s{i}"), format!("claim {i}")).unwrap().with_gold(label));
        }
        out
    }

    #[test]
    fn sampling_keeps_all_minority_claims() {
        let claims = synthetic_claims(3581, 42);
        let sampled = sample_subset(&claims, Verdict::Factual, 100, 1).unwrap();
        assert_eq!(sampled.len(), 142);
        assert_eq!(
            sampled.iter().filter(|c| c.gold_label == Some(Verdict::NonFactual)).count(),
            42
        );

        // Original relative order is preserved.
        let positions: Vec<usize> = sampled
            .iter()
            .map(|c| claims.iter().position(|o| o.id == c.id).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let claims = synthetic_claims(50, 5);
        let a = sample_subset(&claims, Verdict::Factual, 10, 99).unwrap();
        let b = sample_subset(&claims, Verdict::Factual, 10, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_count_zero_keeps_only_the_other_label() {
        let claims = synthetic_claims(10, 4);
        let sampled = sample_subset(&claims, Verdict::Factual, 0, 1).unwrap();
        assert_eq!(sampled.len(), 4);
        assert!(sampled.iter().all(|c| c.gold_label == Some(Verdict::NonFactual)));
    }

    #[test]
    fn sampling_more_than_available_fails() {
        let claims = synthetic_claims(3, 1);
        assert_eq!(
            sample_subset(&claims, Verdict::Factual, 4, 1),
            Err(DatasetError::InsufficientClaims { requested: 4, available: 3 })
        );
    }

    #[test]
    fn normalization_is_idempotent() {
        let file = write_temp(
            r#"{"claim": "a", "label": "supported"}
{"claim": "b", "label": "refuted"}
"#,
        );
        let manifest = DatasetManifest::new("n", AdapterKind::Bingcheck, file.path());
        let loaded = load_dataset(&manifest).unwrap();

        let mut first = Vec::new();
        write_normalized(&loaded.claims, &mut first).unwrap();

        let normalized_file = write_temp(std::str::from_utf8(&first).unwrap());
        let manifest2 =
            DatasetManifest::new("n", AdapterKind::Normalized, normalized_file.path());
        let reloaded = load_dataset(&manifest2).unwrap();
        let mut second = Vec::new();
        write_normalized(&reloaded.claims, &mut second).unwrap();
        assert_eq!(first, second);
    }
}
