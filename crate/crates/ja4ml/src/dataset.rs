//! JA4DB ingestion, labeling, and the seeded train/test split.
//!
//! Labeling: records whose `application` or `user_agent_string` mentions a
//! known good crawler are excluded; of the rest, an `application`
//! containing "bot" (case-insensitive) is a bad bot and everything else is
//! benign. The split shuffles indices with the in-repo SplitMix64
//! generator so a (seed, N) pair pins the manifest on every platform.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{parse_ja4_string, FeatureVector, MISSING};
use crate::rng::SplitMix64;

/// Default good-crawler identifiers. The source list is open-ended; these
/// three are the well-known ones and the CLI can extend the list.
pub const DEFAULT_GOOD_BOT_IDS: [&str; 3] = ["googlebot", "bingbot", "linkedinbot"];

/// Composition of the reference snapshot the labeling rules were tuned
/// on, used for delta reporting: total, bad bots, benign, excluded.
pub const REFERENCE_COMPOSITION: (u64, u64, u64, u64) = (227_404, 50_212, 148_610, 32_007);

/// One raw JA4DB row. Unknown fields are preserved opaquely in `extra`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Ja4dbRecord {
    #[serde(default)]
    pub application: Option<String>,
    #[serde(default)]
    pub library: Option<String>,
    #[serde(default)]
    pub device: Option<String>,
    #[serde(default)]
    pub os: Option<String>,
    #[serde(default)]
    pub user_agent_string: Option<String>,
    #[serde(default)]
    pub certificate_authority: Option<String>,
    #[serde(default)]
    pub observation_count: Option<u64>,
    #[serde(default)]
    pub verified: Option<bool>,
    #[serde(default)]
    pub ja4_fingerprint: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelOutcome {
    GoodBotExcluded,
    BadBot,
    Benign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Benign,
    BadBot,
}

impl ClassLabel {
    pub fn as_u8(self) -> u8 {
        match self {
            ClassLabel::Benign => 0,
            ClassLabel::BadBot => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub features: FeatureVector,
    pub label: ClassLabel,
    /// Index of the record in the source JSON array.
    pub source_index: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub total: u64,
    pub bad_bot: u64,
    pub benign: u64,
    pub good_bot_excluded: u64,
    pub missing_fingerprint: u64,
    pub malformed_fingerprint: u64,
    pub bad_bot_pct: String,
    pub benign_pct: String,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("JSON root must be an array of records")]
    NotAnArray,
    #[error("need at least 2 records to split, have {0}")]
    TooFewRecords(usize),
    #[error("split ratio must be in (0,1), got {0}")]
    BadRatio(f64),
}

/// Applies the labeling rules to one record.
pub fn label_record(rec: &Ja4dbRecord, good_bot_ids: &[String]) -> LabelOutcome {
    let application = rec.application.as_deref().unwrap_or("").to_lowercase();
    let user_agent = rec.user_agent_string.as_deref().unwrap_or("").to_lowercase();
    for id in good_bot_ids {
        let id = id.to_lowercase();
        if !id.is_empty() && (application.contains(&id) || user_agent.contains(&id)) {
            return LabelOutcome::GoodBotExcluded;
        }
    }
    if application.contains("bot") {
        LabelOutcome::BadBot
    } else {
        LabelOutcome::Benign
    }
}

fn clean(field: &Option<String>) -> String {
    field
        .as_deref()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .unwrap_or(MISSING)
        .to_string()
}

/// Labels every record in a parsed JA4DB array. Good bots and records with
/// missing or malformed fingerprints are excluded from the labeled list
/// but counted in the stats.
pub fn label_records(
    records: &[Ja4dbRecord],
    good_bot_ids: &[String],
) -> (Vec<LabeledRecord>, IngestStats) {
    let mut stats = IngestStats {
        total: records.len() as u64,
        ..Default::default()
    };
    let mut labeled = Vec::new();
    for (source_index, rec) in records.iter().enumerate() {
        let outcome = label_record(rec, good_bot_ids);
        let label = match outcome {
            LabelOutcome::GoodBotExcluded => {
                stats.good_bot_excluded += 1;
                continue;
            }
            LabelOutcome::BadBot => ClassLabel::BadBot,
            LabelOutcome::Benign => ClassLabel::Benign,
        };
        let fp_text = match rec.ja4_fingerprint.as_deref().map(str::trim) {
            Some(t) if !t.is_empty() => t,
            _ => {
                stats.missing_fingerprint += 1;
                continue;
            }
        };
        let parts = match parse_ja4_string(fp_text) {
            Ok(p) => p,
            Err(_) => {
                stats.malformed_fingerprint += 1;
                continue;
            }
        };
        let mut features = parts.into_feature_vector();
        features.application = clean(&rec.application);
        features.os = clean(&rec.os);
        features.device = clean(&rec.device);
        features.verified = rec.verified.unwrap_or(false);
        features.observation_count = rec.observation_count.unwrap_or(0);
        match label {
            ClassLabel::BadBot => stats.bad_bot += 1,
            ClassLabel::Benign => stats.benign += 1,
        }
        labeled.push(LabeledRecord {
            features,
            label,
            source_index,
        });
    }
    stats.bad_bot_pct = format!("{:.2}", 100.0 * stats.bad_bot as f64 / stats.total.max(1) as f64);
    stats.benign_pct = format!("{:.2}", 100.0 * stats.benign as f64 / stats.total.max(1) as f64);
    (labeled, stats)
}

/// Reads and labels a JA4DB JSON export.
pub fn ingest(
    path: &Path,
    good_bot_ids: &[String],
) -> Result<(Vec<LabeledRecord>, IngestStats), DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| DatasetError::Json {
            path: path.display().to_string(),
            source,
        })?;
    let array = value.as_array().ok_or(DatasetError::NotAnArray)?;
    let records: Vec<Ja4dbRecord> = array
        .iter()
        .map(|v| serde_json::from_value(v.clone()))
        .collect::<Result<_, _>>()
        .map_err(|source| DatasetError::Json {
            path: path.display().to_string(),
            source,
        })?;
    Ok(label_records(&records, good_bot_ids))
}

/// Replayable record of one train/test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub ratio: f64,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Splits `n` labeled records into train/test positions. The shuffle is a
/// Fisher-Yates pass over 0..n driven by SplitMix64(seed); the test set
/// takes the first round((1-ratio)*n) shuffled positions.
pub fn split(n: usize, seed: u64, ratio: f64) -> Result<SplitManifest, DatasetError> {
    if n < 2 {
        return Err(DatasetError::TooFewRecords(n));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DatasetError::BadRatio(ratio));
    }
    let n_test = ((1.0 - ratio) * n as f64).round() as usize;
    let n_test = n_test.clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut test_indices: Vec<usize> = order[..n_test].to_vec();
    let mut train_indices: Vec<usize> = order[n_test..].to_vec();
    test_indices.sort_unstable();
    train_indices.sort_unstable();
    Ok(SplitManifest {
        seed,
        ratio,
        train_indices,
        test_indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids() -> Vec<String> {
        DEFAULT_GOOD_BOT_IDS.iter().map(|s| s.to_string()).collect()
    }

    fn rec(application: &str, ua: &str) -> Ja4dbRecord {
        Ja4dbRecord {
            application: (!application.is_empty()).then(|| application.to_string()),
            user_agent_string: (!ua.is_empty()).then(|| ua.to_string()),
            ja4_fingerprint: Some("t13d1516h2_8daaf6152771_02713d6af862".into()),
            ..Default::default()
        }
    }

    #[test]
    fn googlebot_is_excluded() {
        assert_eq!(
            label_record(&rec("Googlebot", ""), &ids()),
            LabelOutcome::GoodBotExcluded
        );
        // matching applies to the user agent too
        assert_eq!(
            label_record(&rec("Chrome", "Mozilla/5.0 (compatible; bingbot/2.0)"), &ids()),
            LabelOutcome::GoodBotExcluded
        );
    }

    #[test]
    fn bot_substring_in_application_is_bad() {
        assert_eq!(
            label_record(&rec("scrapybot-custom", ""), &ids()),
            LabelOutcome::BadBot
        );
        assert_eq!(label_record(&rec("RoBoT", ""), &ids()), LabelOutcome::BadBot);
        // "bot" in the user agent alone does not make a bad bot
        assert_eq!(
            label_record(&rec("Chrome", "some-bot-ua"), &ids()),
            LabelOutcome::Benign
        );
    }

    #[test]
    fn plain_application_is_benign() {
        assert_eq!(label_record(&rec("Chrome", "Mozilla/5.0"), &ids()), LabelOutcome::Benign);
        assert_eq!(label_record(&rec("", ""), &ids()), LabelOutcome::Benign);
    }

    #[test]
    fn synthetic_ten_record_composition() {
        let mut records = Vec::new();
        records.push(rec("Googlebot", ""));
        records.push(rec("Chrome", "bingbot crawler"));
        records.push(rec("scrapybot", ""));
        records.push(rec("MegaBot", ""));
        records.push(rec("curl-bot", ""));
        for _ in 0..5 {
            records.push(rec("Firefox", "Mozilla/5.0"));
        }
        let (labeled, stats) = label_records(&records, &ids());
        assert_eq!(stats.good_bot_excluded, 2);
        assert_eq!(stats.bad_bot, 3);
        assert_eq!(stats.benign, 5);
        assert_eq!(stats.total, 10);
        assert_eq!(labeled.len(), 8);
    }

    #[test]
    fn empty_array_yields_zero_stats() {
        let (labeled, stats) = label_records(&[], &ids());
        assert!(labeled.is_empty());
        assert_eq!(stats.total, 0);
        assert_eq!(stats.bad_bot, 0);
    }

    #[test]
    fn missing_and_malformed_fingerprints_are_counted() {
        let mut no_fp = rec("Chrome", "");
        no_fp.ja4_fingerprint = None;
        let mut bad_fp = rec("Chrome", "");
        bad_fp.ja4_fingerprint = Some("garbage".into());
        let (labeled, stats) = label_records(&[no_fp, bad_fp, rec("Chrome", "")], &ids());
        assert_eq!(stats.missing_fingerprint, 1);
        assert_eq!(stats.malformed_fingerprint, 1);
        assert_eq!(labeled.len(), 1);
        assert_eq!(labeled[0].source_index, 2);
    }

    #[test]
    fn metadata_is_trimmed_and_defaulted() {
        let mut r = rec("Chrome", "");
        r.os = Some("  Windows  ".into());
        r.device = Some("   ".into());
        let (labeled, _) = label_records(&[r], &ids());
        assert_eq!(labeled[0].features.os, "Windows");
        assert_eq!(labeled[0].features.device, MISSING);
        assert!(!labeled[0].features.verified);
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let a = split(1000, 42, 0.8).unwrap();
        let b = split(1000, 42, 0.8).unwrap();
        assert_eq!(a, b);
        let c = split(1000, 43, 0.8).unwrap();
        assert_ne!(a, c);

        assert_eq!(a.test_indices.len(), 200);
        assert_eq!(a.train_indices.len(), 800);
        let mut all: Vec<usize> = a
            .train_indices
            .iter()
            .chain(a.test_indices.iter())
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn split_sizes_round() {
        let m = split(10, 1, 0.8).unwrap();
        assert_eq!(m.test_indices.len(), 2);
        let m = split(11, 1, 0.8).unwrap();
        // round(0.2 * 11) = 2
        assert_eq!(m.test_indices.len(), 2);
    }

    #[test]
    fn split_rejects_degenerate_input() {
        assert!(matches!(split(1, 1, 0.8), Err(DatasetError::TooFewRecords(1))));
        assert!(matches!(split(10, 1, 1.5), Err(DatasetError::BadRatio(_))));
    }

    #[test]
    fn extra_fields_are_preserved_opaquely() {
        let json = r#"{"application":"Chrome","ja4_fingerprint":"t13d1516h2_8daaf6152771_02713d6af862","custom_field":[1,2,3]}"#;
        let rec: Ja4dbRecord = serde_json::from_str(json).unwrap();
        assert!(rec.extra.contains_key("custom_field"));
    }
}
