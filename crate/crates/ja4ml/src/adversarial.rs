//! Executable threat-model scenarios.
//!
//! Each scenario mutates a fixture ClientHello the way a bot evasion
//! would and asserts what the fingerprint does: metadata rotation leaves
//! it unchanged, a different TLS stack changes it, and a byte-exact mimic
//! of a browser hello produces the browser's fingerprint. The mimic rows
//! are asserted on purpose: identical bytes must mean identical
//! fingerprints, so a run that "detects" a bitwise mimic indicates a
//! fingerprint bug, not an improvement.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clienthello::{is_grease, parse_clienthello, ClientHello, Transport, GREASE_VALUES};
use crate::ja4::compute_ja4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    RotateUserAgentMetadata,
    RotateIpMetadata,
    PermuteGrease,
    ReorderCiphers,
    SwapTlsStack,
    BitwiseMimic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    FingerprintUnchanged,
    FingerprintChanged,
    FingerprintEqualsTarget,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvasionScenario {
    pub name: String,
    /// Fixture hello name the bot starts from.
    pub base: String,
    pub mutation: Mutation,
    /// Fixture hello name for stack-swap / mimic mutations.
    #[serde(default)]
    pub target: Option<String>,
    pub expected: Expected,
}

/// One fixture ClientHello, stored as hex with its precomputed
/// fingerprint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HelloFixture {
    pub name: String,
    pub transport: Transport,
    pub hex: String,
    pub ja4: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail { reason: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct ScenarioVerdict {
    pub name: String,
    pub outcome: Outcome,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid fixture JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("scenario {scenario} references unknown hello {hello:?}")]
    UnknownHello { scenario: String, hello: String },
    #[error("fixture {name} does not parse: {reason}")]
    BadFixture { name: String, reason: String },
}

pub fn load_hellos(path: &Path) -> Result<BTreeMap<String, HelloFixture>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let list: Vec<HelloFixture> =
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.display().to_string(),
            source,
        })?;
    Ok(list.into_iter().map(|h| (h.name.clone(), h)).collect())
}

pub fn load_scenarios(path: &Path) -> Result<Vec<EvasionScenario>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn parse_fixture(fixture: &HelloFixture) -> Result<ClientHello, HarnessError> {
    let bytes = hex::decode(&fixture.hex).map_err(|e| HarnessError::BadFixture {
        name: fixture.name.clone(),
        reason: e.to_string(),
    })?;
    parse_clienthello(&bytes, fixture.transport).map_err(|e| HarnessError::BadFixture {
        name: fixture.name.clone(),
        reason: e.to_string(),
    })
}

/// Replaces every GREASE occurrence with the next GREASE value, the way a
/// client randomizes them between connections.
fn rotate_grease(hello: &mut ClientHello) {
    let next = |v: u16| -> u16 {
        let pos = GREASE_VALUES.iter().position(|&g| g == v).unwrap();
        GREASE_VALUES[(pos + 1) % GREASE_VALUES.len()]
    };
    for c in &mut hello.cipher_suites {
        if is_grease(*c) {
            *c = next(*c);
        }
    }
    for e in &mut hello.extensions {
        if is_grease(e.ext_type) {
            e.ext_type = next(e.ext_type);
        }
    }
    for v in &mut hello.supported_versions {
        if is_grease(*v) {
            *v = next(*v);
        }
    }
}

pub fn run_scenario(
    scenario: &EvasionScenario,
    hellos: &BTreeMap<String, HelloFixture>,
) -> Result<ScenarioVerdict, HarnessError> {
    let base_fixture = hellos
        .get(&scenario.base)
        .ok_or_else(|| HarnessError::UnknownHello {
            scenario: scenario.name.clone(),
            hello: scenario.base.clone(),
        })?;
    let base = parse_fixture(base_fixture)?;
    let before = compute_ja4(&base).full;

    let target_fixture = match &scenario.target {
        Some(name) => Some(hellos.get(name).ok_or_else(|| HarnessError::UnknownHello {
            scenario: scenario.name.clone(),
            hello: name.clone(),
        })?),
        None => None,
    };

    let after = match scenario.mutation {
        // header and IP rotation touch metadata only; the hello bytes and
        // therefore the fingerprint input are untouched
        Mutation::RotateUserAgentMetadata | Mutation::RotateIpMetadata => {
            compute_ja4(&base).full
        }
        Mutation::PermuteGrease => {
            let has_grease = base.cipher_suites.iter().any(|&c| is_grease(c))
                || base.extensions.iter().any(|e| is_grease(e.ext_type))
                || base.supported_versions.iter().any(|&v| is_grease(v));
            if !has_grease {
                return Ok(ScenarioVerdict {
                    name: scenario.name.clone(),
                    outcome: Outcome::Skipped {
                        reason: "base hello carries no GREASE values".into(),
                    },
                    before,
                    after: String::new(),
                });
            }
            let mut mutated = base.clone();
            rotate_grease(&mut mutated);
            compute_ja4(&mutated).full
        }
        Mutation::ReorderCiphers => {
            if base.cipher_suites.len() < 2 {
                return Ok(ScenarioVerdict {
                    name: scenario.name.clone(),
                    outcome: Outcome::Skipped {
                        reason: "fewer than 2 cipher suites to reorder".into(),
                    },
                    before,
                    after: String::new(),
                });
            }
            let mut mutated = base.clone();
            mutated.cipher_suites.reverse();
            compute_ja4(&mutated).full
        }
        Mutation::SwapTlsStack | Mutation::BitwiseMimic => {
            let fixture = target_fixture.ok_or_else(|| HarnessError::UnknownHello {
                scenario: scenario.name.clone(),
                hello: "<missing target>".into(),
            })?;
            compute_ja4(&parse_fixture(fixture)?).full
        }
    };

    let ok = match scenario.expected {
        Expected::FingerprintUnchanged => after == before,
        Expected::FingerprintChanged => after != before,
        Expected::FingerprintEqualsTarget => {
            let target = target_fixture.expect("target checked above");
            after == target.ja4
        }
    };
    let outcome = if ok {
        Outcome::Pass
    } else {
        Outcome::Fail {
            reason: format!(
                "expected {:?}, before={before} after={after}",
                scenario.expected
            ),
        }
    };
    Ok(ScenarioVerdict {
        name: scenario.name.clone(),
        outcome,
        before,
        after,
    })
}

/// Runs every scenario and renders TAP-style lines.
pub fn run_all(
    scenarios: &[EvasionScenario],
    hellos: &BTreeMap<String, HelloFixture>,
) -> Result<(Vec<ScenarioVerdict>, String), HarnessError> {
    let mut verdicts = Vec::new();
    let mut tap = format!("1..{}\n", scenarios.len());
    for (i, scenario) in scenarios.iter().enumerate() {
        let verdict = run_scenario(scenario, hellos)?;
        let line = match &verdict.outcome {
            Outcome::Pass => format!("ok {} - {}\n", i + 1, verdict.name),
            Outcome::Skipped { reason } => {
                format!("ok {} - {} # SKIP {}\n", i + 1, verdict.name, reason)
            }
            Outcome::Fail { reason } => {
                format!("not ok {} - {} # {}\n", i + 1, verdict.name, reason)
            }
        };
        tap.push_str(&line);
        verdicts.push(verdict);
    }
    Ok((verdicts, tap))
}
