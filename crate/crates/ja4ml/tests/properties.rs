//! Property-based suites with shrinking, complementing the deterministic
//! bulk checks in the acceptance suite.

mod common;

use proptest::prelude::*;

use common::{build_clienthello, sni_body, HelloSpec};
use ja4ml::clienthello::{is_grease, parse_clienthello, ParseError, Transport, GREASE_VALUES};
use ja4ml::dataset;
use ja4ml::features::parse_ja4_string;
use ja4ml::ja4::compute_ja4;

const CIPHERS: [u16; 12] = [
    0x1301, 0x1302, 0x1303, 0xc02b, 0xc02f, 0xc02c, 0xc030, 0xcca9, 0xcca8, 0x009c, 0x002f,
    0x0035,
];
const EXTS: [u16; 10] = [
    0x0005, 0x000a, 0x000b, 0x0012, 0x0017, 0x001b, 0x0023, 0x002d, 0x0033, 0xff01,
];

prop_compose! {
    fn hello_strategy()(
        ciphers in proptest::sample::subsequence(CIPHERS.to_vec(), 1..=12),
        exts in proptest::sample::subsequence(EXTS.to_vec(), 0..=10),
        with_sni in any::<bool>(),
        with_alpn in any::<bool>(),
        with_versions in any::<bool>(),
        session in prop_oneof![Just(0u8), Just(32u8)],
    ) -> HelloSpec {
        let mut extensions: Vec<(u16, Vec<u8>)> = Vec::new();
        if with_sni {
            extensions.push((0x0000, sni_body("example.com")));
        }
        if with_alpn {
            extensions.push((0x0010, common::alpn_body(&["h2", "http/1.1"])));
        }
        if with_versions {
            extensions.push((0x002b, common::supported_versions_body(&[0x0304, 0x0303])));
        }
        for e in exts {
            extensions.push((e, vec![0u8; 2]));
        }
        HelloSpec {
            legacy_version: 0x0303,
            session_id_len: session,
            cipher_suites: ciphers,
            extensions,
        }
    }
}

proptest! {
    // no failure-persistence files: integration tests have no src root to
    // anchor them, and regressions here are deterministic anyway
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn round_trip_preserves_structure(spec in hello_strategy()) {
        let bytes = build_clienthello(&spec);
        let hello = parse_clienthello(&bytes, Transport::Tcp).unwrap();
        prop_assert_eq!(&hello.cipher_suites, &spec.cipher_suites);
        let ext_types: Vec<u16> = hello.extensions.iter().map(|e| e.ext_type).collect();
        let want: Vec<u16> = spec.extensions.iter().map(|(t, _)| *t).collect();
        prop_assert_eq!(ext_types, want);
        let has_sni = spec.extensions.iter().any(|(t, _)| *t == 0x0000);
        prop_assert_eq!(hello.sni_hostname.is_some(), has_sni);
    }

    #[test]
    fn trailing_bytes_are_rejected(spec in hello_strategy()) {
        let mut bytes = build_clienthello(&spec);
        bytes.push(0x00);
        let rejected = matches!(
            parse_clienthello(&bytes, Transport::Tcp),
            Err(ParseError::TrailingBytes { .. }) | Err(ParseError::LengthMismatch { .. })
        );
        prop_assert!(rejected);
    }

    #[test]
    fn grease_insertion_leaves_fingerprint_unchanged(
        spec in hello_strategy(),
        grease_idx in 0..GREASE_VALUES.len(),
        pos_seed in any::<u64>(),
    ) {
        let baseline = fingerprint(&spec);
        let g = GREASE_VALUES[grease_idx];
        let mut mutated = spec.clone();
        let pos = (pos_seed as usize) % (mutated.cipher_suites.len() + 1);
        mutated.cipher_suites.insert(pos, g);
        mutated.extensions.push((g, vec![]));
        prop_assert_eq!(fingerprint(&mutated), baseline);
    }

    #[test]
    fn cipher_permutation_leaves_fingerprint_unchanged(
        spec in hello_strategy(),
        rotation in any::<usize>(),
    ) {
        let baseline = fingerprint(&spec);
        let mut mutated = spec.clone();
        let k = rotation % mutated.cipher_suites.len();
        mutated.cipher_suites.rotate_left(k);
        prop_assert_eq!(fingerprint(&mutated), baseline.clone());
        mutated.cipher_suites.reverse();
        prop_assert_eq!(fingerprint(&mutated), baseline);
    }

    #[test]
    fn sni_text_change_leaves_fingerprint_unchanged(
        spec in hello_strategy(),
        host in "[a-z]{1,20}\\.[a-z]{2,5}",
    ) {
        let mut with_sni = spec;
        with_sni.extensions.retain(|(t, _)| *t != 0x0000);
        with_sni.extensions.insert(0, (0x0000, sni_body("original.example")));
        let baseline = fingerprint(&with_sni);
        let mut renamed = with_sni.clone();
        renamed.extensions[0].1 = sni_body(&host);
        prop_assert_eq!(fingerprint(&renamed), baseline);
    }

    #[test]
    fn fingerprint_decomposes_consistently(spec in hello_strategy()) {
        let bytes = build_clienthello(&spec);
        let hello = parse_clienthello(&bytes, Transport::Tcp).unwrap();
        let fp = compute_ja4(&hello);
        let parts = parse_ja4_string(&fp.full).unwrap();
        prop_assert_eq!(&parts.protocol, "t");
        let non_grease = spec.cipher_suites.iter().filter(|&&c| !is_grease(c)).count();
        prop_assert_eq!(parts.cipher_count as usize, non_grease.min(99));
        prop_assert_eq!(parts.ja4_b, fp.ja4_b);
        prop_assert_eq!(parts.ja4_c, fp.ja4_c);
        let has_sni = spec.extensions.iter().any(|(t, _)| *t == 0x0000);
        prop_assert_eq!(&parts.sni_flag, if has_sni { "d" } else { "i" });
    }

    #[test]
    fn parser_never_panics_on_arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_clienthello(&bytes, Transport::Tcp);
        let _ = parse_clienthello(&bytes, Transport::UdpQuic);
    }

    #[test]
    fn split_partitions_for_any_seed(
        n in 2usize..500,
        seed in any::<u64>(),
        ratio_pct in 1u32..100,
    ) {
        let ratio = ratio_pct as f64 / 100.0;
        let manifest = dataset::split(n, seed, ratio).unwrap();
        prop_assert!(!manifest.train_indices.is_empty());
        prop_assert!(!manifest.test_indices.is_empty());
        let mut all: Vec<usize> = manifest
            .train_indices
            .iter()
            .chain(manifest.test_indices.iter())
            .copied()
            .collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let again = dataset::split(n, seed, ratio).unwrap();
        prop_assert_eq!(manifest, again);
    }
}

fn fingerprint(spec: &HelloSpec) -> String {
    let bytes = build_clienthello(spec);
    compute_ja4(&parse_clienthello(&bytes, Transport::Tcp).unwrap()).full
}
