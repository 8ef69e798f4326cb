//! JA4 client fingerprint computation.
//!
//! The fingerprint is three underscore-joined parts: a 10-character
//! readable header (transport, TLS version, SNI flag, cipher count,
//! extension count, ALPN code), a 12-hex-char hash of the sorted
//! non-GREASE cipher codes, and a 12-hex-char hash of the sorted
//! non-GREASE extension codes (minus SNI and ALPN) plus the signature
//! algorithms in original order.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clienthello::{
    is_grease, ClientHello, Transport, EXT_ALPN, EXT_SNI, EXT_SUPPORTED_VERSIONS,
};

const ZERO_HASH: &str = "000000000000";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ja4Fingerprint {
    pub full: String,
    pub ja4_a: String,
    pub ja4_b: String,
    pub ja4_c: String,
}

/// Computes the full JA4 fingerprint for a parsed ClientHello.
pub fn compute_ja4(hello: &ClientHello) -> Ja4Fingerprint {
    let ja4_a = ja4_a_component(hello);
    let ja4_b = cipher_hash(hello);
    let ja4_c = extension_hash(hello);
    let full = format!("{ja4_a}_{ja4_b}_{ja4_c}");
    Ja4Fingerprint {
        full,
        ja4_a,
        ja4_b,
        ja4_c,
    }
}

/// The 10-character readable header.
pub fn ja4_a_component(hello: &ClientHello) -> String {
    let proto = match hello.transport {
        Transport::Tcp => 't',
        Transport::UdpQuic => 'q',
    };
    let sni = if hello.extensions.iter().any(|e| e.ext_type == EXT_SNI) {
        'd'
    } else {
        'i'
    };
    let ciphers = hello
        .cipher_suites
        .iter()
        .filter(|&&c| !is_grease(c))
        .count()
        .min(99);
    let exts = hello
        .extensions
        .iter()
        .filter(|e| !is_grease(e.ext_type))
        .count()
        .min(99);
    format!(
        "{proto}{}{sni}{ciphers:02}{exts:02}{}",
        version_code(hello),
        alpn_code(hello)
    )
}

fn version_code(hello: &ClientHello) -> &'static str {
    let has_supported_versions = hello
        .extensions
        .iter()
        .any(|e| e.ext_type == EXT_SUPPORTED_VERSIONS);
    let from_ext = hello
        .supported_versions
        .iter()
        .copied()
        .filter(|&v| !is_grease(v))
        .max();
    let code = match (has_supported_versions, from_ext) {
        (true, Some(v)) => v,
        _ => hello.legacy_version,
    };
    match code {
        0x0304 => "13",
        0x0303 => "12",
        0x0302 => "11",
        0x0301 => "10",
        0x0300 => "s3",
        0x0002 => "s2",
        _ => "00",
    }
}

fn alpn_code(hello: &ClientHello) -> String {
    let entry = match hello.alpn_protocols.first() {
        Some(e) if !e.is_empty() => e,
        _ => return "00".to_string(),
    };
    let first = entry[0];
    let last = *entry.last().unwrap();
    if first.is_ascii_alphanumeric() {
        format!("{}{}", first as char, last as char)
    } else {
        let hi = format!("{first:02x}");
        let lo = format!("{last:02x}");
        format!(
            "{}{}",
            hi.chars().next().unwrap(),
            lo.chars().nth(1).unwrap()
        )
    }
}

fn sha256_12(input: &str) -> String {
    let digest = Sha256::digest(input.as_bytes());
    hex::encode(digest)[..12].to_string()
}

fn cipher_hash(hello: &ClientHello) -> String {
    let mut codes: Vec<u16> = hello
        .cipher_suites
        .iter()
        .copied()
        .filter(|&c| !is_grease(c))
        .collect();
    if codes.is_empty() {
        return ZERO_HASH.to_string();
    }
    codes.sort_unstable();
    let joined = codes
        .iter()
        .map(|c| format!("{c:04x}"))
        .collect::<Vec<_>>()
        .join(",");
    sha256_12(&joined)
}

fn extension_hash(hello: &ClientHello) -> String {
    let mut codes: Vec<u16> = hello
        .extensions
        .iter()
        .map(|e| e.ext_type)
        .filter(|&t| !is_grease(t) && t != EXT_SNI && t != EXT_ALPN)
        .collect();
    if codes.is_empty() {
        return ZERO_HASH.to_string();
    }
    codes.sort_unstable();
    let mut joined = codes
        .iter()
        .map(|c| format!("{c:04x}"))
        .collect::<Vec<_>>()
        .join(",");
    if !hello.signature_algorithms.is_empty() {
        joined.push('_');
        joined.push_str(
            &hello
                .signature_algorithms
                .iter()
                .map(|c| format!("{c:04x}"))
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    sha256_12(&joined)
}
