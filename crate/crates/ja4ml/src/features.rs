//! Feature extraction from JA4 strings and JA4DB metadata.
//!
//! A JA4 string decomposes positionally into protocol, TLS version, SNI
//! flag, cipher count, extension count, ALPN code, and the two hash parts.
//! Together with the record metadata (application, os, device, verified,
//! observation count) these form the model's feature vector. Categorical
//! fields are label-encoded with dense codes starting at 1; code 0 is
//! reserved for unseen or missing values, and the missing marker is the
//! empty string.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Missing categorical values are stored as the empty string and always
/// encode to the reserved code 0.
pub const MISSING: &str = "";

/// Fixed CSV column order for the labeled dataset. `label` is 1 for
/// bad_bot, 0 for benign.
pub const CSV_HEADER: [&str; 15] = [
    "source_index",
    "label",
    "protocol",
    "tls_version",
    "sni_flag",
    "cipher_count",
    "ext_count",
    "alpn_code",
    "ja4_b",
    "ja4_c",
    "application",
    "os",
    "device",
    "verified",
    "observation_count",
];

/// Model features in encoded-column order. `application` is appended only
/// under the paper-fidelity flag: labels are derived from it, so including
/// it by default would leak the label into the features.
pub fn feature_columns(include_application: bool) -> Vec<&'static str> {
    let mut cols = vec![
        "protocol",
        "tls_version",
        "sni_flag",
        "cipher_count",
        "ext_count",
        "alpn_code",
        "ja4_b",
        "ja4_c",
        "os",
        "device",
        "verified",
        "observation_count",
    ];
    if include_application {
        cols.push("application");
    }
    cols
}

/// Which of the model features are categorical (the rest pass through
/// numerically).
pub const CATEGORICAL_FEATURES: [&str; 9] = [
    "protocol",
    "tls_version",
    "sni_flag",
    "alpn_code",
    "ja4_b",
    "ja4_c",
    "os",
    "device",
    "application",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub protocol: String,
    pub tls_version: String,
    pub sni_flag: String,
    pub cipher_count: u8,
    pub ext_count: u8,
    pub alpn_code: String,
    pub ja4_b: String,
    pub ja4_c: String,
    pub application: String,
    pub os: String,
    pub device: String,
    pub verified: bool,
    pub observation_count: u64,
}

impl FeatureVector {
    pub fn categorical(&self, feature: &str) -> Option<&str> {
        match feature {
            "protocol" => Some(&self.protocol),
            "tls_version" => Some(&self.tls_version),
            "sni_flag" => Some(&self.sni_flag),
            "alpn_code" => Some(&self.alpn_code),
            "ja4_b" => Some(&self.ja4_b),
            "ja4_c" => Some(&self.ja4_c),
            "os" => Some(&self.os),
            "device" => Some(&self.device),
            "application" => Some(&self.application),
            _ => None,
        }
    }
}

/// The positional pieces of one JA4 string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ja4Parts {
    pub protocol: String,
    pub tls_version: String,
    pub sni_flag: String,
    pub cipher_count: u8,
    pub ext_count: u8,
    pub alpn_code: String,
    pub ja4_b: String,
    pub ja4_c: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Ja4ParseError {
    #[error("expected 3 underscore-joined parts, found {0}")]
    WrongPartCount(usize),
    #[error("ja4_a must be 10 characters, found {0}")]
    BadHeaderLength(usize),
    #[error("{part} must be 12 lowercase hex characters")]
    BadHash { part: &'static str },
    #[error("{field} is not a 2-digit decimal count")]
    BadCount { field: &'static str },
}

/// Slices a JA4 string into its positional fields.
pub fn parse_ja4_string(text: &str) -> Result<Ja4Parts, Ja4ParseError> {
    let parts: Vec<&str> = text.split('_').collect();
    if parts.len() != 3 {
        return Err(Ja4ParseError::WrongPartCount(parts.len()));
    }
    let (a, b, c) = (parts[0], parts[1], parts[2]);
    if a.chars().count() != 10 || !a.is_ascii() {
        return Err(Ja4ParseError::BadHeaderLength(a.chars().count()));
    }
    for (part, name) in [(b, "ja4_b"), (c, "ja4_c")] {
        let ok = part.len() == 12
            && part
                .chars()
                .all(|ch| ch.is_ascii_digit() || ('a'..='f').contains(&ch));
        if !ok {
            return Err(Ja4ParseError::BadHash { part: name });
        }
    }
    let cipher_count = a[4..6]
        .parse::<u8>()
        .map_err(|_| Ja4ParseError::BadCount {
            field: "cipher_count",
        })?;
    let ext_count = a[6..8]
        .parse::<u8>()
        .map_err(|_| Ja4ParseError::BadCount { field: "ext_count" })?;
    Ok(Ja4Parts {
        protocol: a[0..1].to_string(),
        tls_version: a[1..3].to_string(),
        sni_flag: a[3..4].to_string(),
        cipher_count,
        ext_count,
        alpn_code: a[8..10].to_string(),
        ja4_b: b.to_string(),
        ja4_c: c.to_string(),
    })
}

impl Ja4Parts {
    /// Feature vector with all metadata fields missing.
    pub fn into_feature_vector(self) -> FeatureVector {
        FeatureVector {
            protocol: self.protocol,
            tls_version: self.tls_version,
            sni_flag: self.sni_flag,
            cipher_count: self.cipher_count,
            ext_count: self.ext_count,
            alpn_code: self.alpn_code,
            ja4_b: self.ja4_b,
            ja4_c: self.ja4_c,
            application: MISSING.to_string(),
            os: MISSING.to_string(),
            device: MISSING.to_string(),
            verified: false,
            observation_count: 0,
        }
    }
}

/// Per-feature mapping from category text to dense integer codes.
///
/// Distinct values are sorted lexicographically and assigned 1..K, so the
/// mapping depends only on the value set, not on record order or platform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryEncoder {
    pub mappings: BTreeMap<String, BTreeMap<String, u32>>,
    pub include_application: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncoderError {
    #[error("cannot fit an encoder on an empty record list")]
    EmptyInput,
}

/// Fits the encoder over the given records for every categorical feature
/// in the active column set.
pub fn fit_encoder(
    records: &[FeatureVector],
    include_application: bool,
) -> Result<CategoryEncoder, EncoderError> {
    if records.is_empty() {
        return Err(EncoderError::EmptyInput);
    }
    let active = feature_columns(include_application);
    let mut mappings = BTreeMap::new();
    for feature in CATEGORICAL_FEATURES {
        if !active.contains(&feature) {
            continue;
        }
        let mut values: Vec<&str> = records
            .iter()
            .filter_map(|r| r.categorical(feature))
            .filter(|v| !v.is_empty())
            .collect();
        values.sort_unstable();
        values.dedup();
        let map: BTreeMap<String, u32> = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v.to_string(), i as u32 + 1))
            .collect();
        mappings.insert(feature.to_string(), map);
    }
    Ok(CategoryEncoder {
        mappings,
        include_application,
    })
}

impl CategoryEncoder {
    pub fn code(&self, feature: &str, value: &str) -> u32 {
        self.mappings
            .get(feature)
            .and_then(|m| m.get(value))
            .copied()
            .unwrap_or(0)
    }

    /// Encodes one record into the fixed numeric column order from
    /// [`feature_columns`]. Unseen and missing categories become 0.
    pub fn encode(&self, record: &FeatureVector) -> Vec<f64> {
        feature_columns(self.include_application)
            .iter()
            .map(|&col| match col {
                "cipher_count" => record.cipher_count as f64,
                "ext_count" => record.ext_count as f64,
                "verified" => {
                    if record.verified {
                        1.0
                    } else {
                        0.0
                    }
                }
                "observation_count" => record.observation_count as f64,
                _ => self.code(col, record.categorical(col).unwrap_or(MISSING)) as f64,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("encoder serializes");
        out.push('\n');
        out
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// One CSV row in [`CSV_HEADER`] order.
pub fn csv_row(source_index: usize, label: u8, fv: &FeatureVector) -> Vec<String> {
    let mut row = Vec::with_capacity(CSV_HEADER.len());
    row.push(source_index.to_string());
    row.push(label.to_string());
    row.push(fv.protocol.clone());
    row.push(fv.tls_version.clone());
    row.push(fv.sni_flag.clone());
    row.push(fv.cipher_count.to_string());
    row.push(fv.ext_count.to_string());
    row.push(fv.alpn_code.clone());
    row.push(fv.ja4_b.clone());
    row.push(fv.ja4_c.clone());
    row.push(fv.application.clone());
    row.push(fv.os.clone());
    row.push(fv.device.clone());
    row.push(if fv.verified { "1" } else { "0" }.to_string());
    let mut obs = String::new();
    let _ = write!(obs, "{}", fv.observation_count);
    row.push(obs);
    row
}
