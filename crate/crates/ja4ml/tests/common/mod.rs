//! Helpers shared by the integration suites: a ClientHello byte builder
//! (the inverse of the parser, used to generate test inputs), a seeded
//! random-hello generator, and a synthetic JA4DB-style snapshot generator
//! for end-to-end pipeline tests.

#![allow(dead_code)]

use ja4ml::rng::SplitMix64;

/// Plain data used to build a ClientHello; mirrors what the parser
/// extracts so round-trip tests can compare.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelloSpec {
    pub legacy_version: u16,
    pub session_id_len: u8,
    pub cipher_suites: Vec<u16>,
    /// (extension type, body bytes)
    pub extensions: Vec<(u16, Vec<u8>)>,
}

/// Serializes a handshake-level ClientHello (starting at the 0x01 message
/// type byte, no TLS record header).
pub fn build_clienthello(spec: &HelloSpec) -> Vec<u8> {
    let mut body = Vec::new();
    body.extend(spec.legacy_version.to_be_bytes());
    body.extend([0u8; 32]); // random
    body.push(spec.session_id_len);
    body.extend(std::iter::repeat(0u8).take(spec.session_id_len as usize));
    body.extend(((spec.cipher_suites.len() * 2) as u16).to_be_bytes());
    for c in &spec.cipher_suites {
        body.extend(c.to_be_bytes());
    }
    body.extend([0x01, 0x00]); // one null compression method
    if !spec.extensions.is_empty() {
        let mut ext_block = Vec::new();
        for (ext_type, ext_body) in &spec.extensions {
            ext_block.extend(ext_type.to_be_bytes());
            ext_block.extend((ext_body.len() as u16).to_be_bytes());
            ext_block.extend(ext_body);
        }
        body.extend((ext_block.len() as u16).to_be_bytes());
        body.extend(ext_block);
    }
    let mut msg = vec![0x01];
    let len = body.len() as u32;
    msg.extend(&len.to_be_bytes()[1..]);
    msg.extend(body);
    msg
}

pub fn sni_body(hostname: &str) -> Vec<u8> {
    let name = hostname.as_bytes();
    let mut body = Vec::new();
    body.extend(((name.len() + 3) as u16).to_be_bytes());
    body.push(0); // host_name type
    body.extend((name.len() as u16).to_be_bytes());
    body.extend(name);
    body
}

pub fn alpn_body(protocols: &[&str]) -> Vec<u8> {
    let mut list = Vec::new();
    for p in protocols {
        list.push(p.len() as u8);
        list.extend(p.as_bytes());
    }
    let mut body = Vec::new();
    body.extend((list.len() as u16).to_be_bytes());
    body.extend(list);
    body
}

pub fn sigalgs_body(algs: &[u16]) -> Vec<u8> {
    let mut body = Vec::new();
    body.extend(((algs.len() * 2) as u16).to_be_bytes());
    for a in algs {
        body.extend(a.to_be_bytes());
    }
    body
}

pub fn supported_versions_body(versions: &[u16]) -> Vec<u8> {
    let mut body = Vec::new();
    body.push((versions.len() * 2) as u8);
    for v in versions {
        body.extend(v.to_be_bytes());
    }
    body
}

const CIPHER_POOL: [u16; 12] = [
    0x1301, 0x1302, 0x1303, 0xc02b, 0xc02f, 0xc02c, 0xc030, 0xcca9, 0xcca8, 0x009c, 0x002f,
    0x0035,
];
const EXT_POOL: [u16; 10] = [
    0x0005, 0x000a, 0x000b, 0x0012, 0x0017, 0x001b, 0x0023, 0x002d, 0x0033, 0xff01,
];
const SIGALG_POOL: [u16; 6] = [0x0403, 0x0804, 0x0401, 0x0503, 0x0805, 0x0501];

/// A random, structurally valid hello. Optional SNI/ALPN/sigalgs/
/// supported_versions, random cipher and extension subsets, no duplicates
/// within a draw.
pub fn random_hello(rng: &mut SplitMix64) -> HelloSpec {
    let n_ciphers = 1 + rng.below(CIPHER_POOL.len() as u64) as usize;
    let cipher_idx = rng.sample_indices(CIPHER_POOL.len(), n_ciphers);
    let cipher_suites: Vec<u16> = cipher_idx.iter().map(|&i| CIPHER_POOL[i]).collect();

    let mut extensions: Vec<(u16, Vec<u8>)> = Vec::new();
    if rng.below(2) == 1 {
        extensions.push((0x0000, sni_body("example.com")));
    }
    if rng.below(2) == 1 {
        extensions.push((0x0010, alpn_body(&["h2", "http/1.1"])));
    }
    if rng.below(2) == 1 {
        let n = 1 + rng.below(SIGALG_POOL.len() as u64) as usize;
        let idx = rng.sample_indices(SIGALG_POOL.len(), n);
        let algs: Vec<u16> = idx.iter().map(|&i| SIGALG_POOL[i]).collect();
        extensions.push((0x000d, sigalgs_body(&algs)));
    }
    if rng.below(2) == 1 {
        extensions.push((0x002b, supported_versions_body(&[0x0304, 0x0303])));
    }
    let n_other = rng.below(EXT_POOL.len() as u64 + 1) as usize;
    let idx = rng.sample_indices(EXT_POOL.len(), n_other);
    for &i in &idx {
        extensions.push((EXT_POOL[i], vec![0u8; rng.below(4) as usize]));
    }
    rng.shuffle(&mut extensions);

    HelloSpec {
        legacy_version: 0x0303,
        session_id_len: if rng.below(2) == 1 { 32 } else { 0 },
        cipher_suites,
        extensions,
    }
}

fn pick<'a, T>(rng: &mut SplitMix64, pool: &'a [T]) -> &'a T {
    &pool[rng.below(pool.len() as u64) as usize]
}

fn hex12(rng: &mut SplitMix64, first_range: &[char]) -> String {
    let digits: Vec<char> = "0123456789abcdef".chars().collect();
    let mut s = String::new();
    s.push(*pick(rng, first_range));
    for _ in 0..11 {
        s.push(*pick(rng, &digits));
    }
    s
}

/// Generates a JA4DB-style JSON array with learnable class structure:
/// bad-bot records cluster on low ja4_b hashes and small cipher/extension
/// counts, benign records on the opposite, with a small noise rate on the
/// informative fields. Application names interleave lexicographically
/// across classes so the label-leaking field carries little split gain.
/// Includes good-crawler records so exclusion paths are exercised.
pub fn synthetic_snapshot(n: usize, seed: u64) -> serde_json::Value {
    let mut rng = SplitMix64::new(seed);
    let low: Vec<char> = "01234567".chars().collect();
    let high: Vec<char> = "89abcdef".chars().collect();
    let any: Vec<char> = "0123456789abcdef".chars().collect();

    // per-class ja4_b vocabularies, disjoint by first hex digit
    let bot_hashes: Vec<String> = (0..40).map(|_| hex12(&mut rng, &low)).collect();
    let benign_hashes: Vec<String> = (0..40).map(|_| hex12(&mut rng, &high)).collect();
    let shared_c: Vec<String> = (0..25).map(|_| hex12(&mut rng, &any)).collect();

    let oses = ["Windows", "Linux", "Mac OS X", "Android", "iOS", ""];
    let devices = ["", "Desktop", "Mobile", "Tablet"];
    let good_apps = ["Googlebot", "bingbot", "LinkedInBot"];

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        // ~4% good crawlers, excluded downstream
        if rng.below(25) == 0 {
            records.push(serde_json::json!({
                "application": pick(&mut rng, &good_apps),
                "user_agent_string": "Mozilla/5.0 (compatible; crawler)",
                "ja4_fingerprint": format!("t13d1112h2_{}_{}",
                    pick(&mut rng, &benign_hashes), pick(&mut rng, &shared_c)),
                "os": "Linux",
                "verified": true,
                "observation_count": rng.below(1000),
            }));
            continue;
        }
        let is_bot = rng.below(100) < 25;
        // interleaved application names: shared numeric prefix, class
        // suffix, so lexicographic codes alternate between classes
        let app = if is_bot {
            format!("svc{:03}x-bot", rng.below(200))
        } else {
            format!("svc{:03}-web", rng.below(200))
        };
        // ~1% feature noise per signal, never both at once, so noisy
        // records stay partially rankable (mirrors real fingerprint reuse)
        let hash_bot = is_bot != (rng.below(100) == 0);
        let counts_bot = is_bot != (rng.below(100) == 0);
        let hash = if hash_bot {
            pick(&mut rng, &bot_hashes).clone()
        } else {
            pick(&mut rng, &benign_hashes).clone()
        };
        let (cc, ec) = if counts_bot {
            (3 + rng.below(7), 2 + rng.below(7))
        } else {
            (9 + rng.below(8), 8 + rng.below(9))
        };
        let alpn = if counts_bot && rng.below(3) == 0 { "00" } else { "h2" };
        records.push(serde_json::json!({
            "application": app,
            "user_agent_string": format!("client-{i}"),
            "ja4_fingerprint": format!("t13d{cc:02}{ec:02}{alpn}_{}_{}",
                hash, pick(&mut rng, &shared_c)),
            "os": pick(&mut rng, &oses),
            "device": pick(&mut rng, &devices),
            "verified": rng.below(2) == 1,
            "observation_count": rng.below(5000),
        }));
    }
    serde_json::Value::Array(records)
}

pub fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}
