//! TLS ClientHello decoding.
//!
//! Parses the handshake-message bytes (starting at handshake type 0x01)
//! into the fields the fingerprint needs. Parsing is strict: every length
//! field must cover exactly what it declares, trailing bytes are an error,
//! and errors carry the offending field name and byte offset.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Extension types with dedicated decoding.
pub const EXT_SNI: u16 = 0x0000;
pub const EXT_ALPN: u16 = 0x0010;
pub const EXT_SIGNATURE_ALGORITHMS: u16 = 0x000D;
pub const EXT_SUPPORTED_VERSIONS: u16 = 0x002B;

/// The 16 reserved GREASE code points (0x0a0a, 0x1a1a, ... 0xfafa).
pub const GREASE_VALUES: [u16; 16] = [
    0x0A0A, 0x1A1A, 0x2A2A, 0x3A3A, 0x4A4A, 0x5A5A, 0x6A6A, 0x7A7A, 0x8A8A,
    0x9A9A, 0xAAAA, 0xBABA, 0xCACA, 0xDADA, 0xEAEA, 0xFAFA,
];

/// True iff `code` is a GREASE value: identical high and low bytes, each
/// with low nibble 0xa.
pub fn is_grease(code: u16) -> bool {
    (code >> 8) == (code & 0x00FF) && (code & 0x000F) == 0x000A
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transport {
    Tcp,
    UdpQuic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub ext_type: u16,
    pub body: Vec<u8>,
}

/// Structured decode of one ClientHello. Extension order and duplicates
/// are preserved exactly as on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientHello {
    pub legacy_version: u16,
    pub cipher_suites: Vec<u16>,
    pub extensions: Vec<Extension>,
    pub sni_hostname: Option<String>,
    pub alpn_protocols: Vec<Vec<u8>>,
    pub signature_algorithms: Vec<u16>,
    pub supported_versions: Vec<u16>,
    pub transport: Transport,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{field}: need {needed} more byte(s) at offset {offset}")]
    UnexpectedEnd {
        field: &'static str,
        offset: usize,
        needed: usize,
    },
    #[error("{field}: declared length {declared} does not match remaining {actual} at offset {offset}")]
    LengthMismatch {
        field: &'static str,
        offset: usize,
        declared: usize,
        actual: usize,
    },
    #[error("{field}: invalid value at offset {offset}")]
    InvalidField { field: &'static str, offset: usize },
    #[error("not a ClientHello: handshake type 0x{found:02x}")]
    NotClientHello { found: u8 },
    #[error("{count} trailing byte(s) after ClientHello at offset {offset}")]
    TrailingBytes { offset: usize, count: usize },
    #[error("empty input")]
    Empty,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn take(&mut self, n: usize, field: &'static str) -> Result<&'a [u8], ParseError> {
        if self.remaining() < n {
            return Err(ParseError::UnexpectedEnd {
                field,
                offset: self.pos,
                needed: n - self.remaining(),
            });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, field: &'static str) -> Result<u8, ParseError> {
        Ok(self.take(1, field)?[0])
    }

    fn u16(&mut self, field: &'static str) -> Result<u16, ParseError> {
        let b = self.take(2, field)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u24(&mut self, field: &'static str) -> Result<usize, ParseError> {
        let b = self.take(3, field)?;
        Ok(((b[0] as usize) << 16) | ((b[1] as usize) << 8) | b[2] as usize)
    }
}

/// Decodes ClientHello bytes (handshake type byte first).
pub fn parse_clienthello(bytes: &[u8], transport: Transport) -> Result<ClientHello, ParseError> {
    let mut cur = Cursor::new(bytes);
    let msg_type = match cur.u8("handshake_type") {
        Ok(t) => t,
        Err(_) => return Err(ParseError::Empty),
    };
    if msg_type != 0x01 {
        return Err(ParseError::NotClientHello { found: msg_type });
    }
    let declared = cur.u24("handshake_length")?;
    if declared != cur.remaining() {
        return Err(ParseError::LengthMismatch {
            field: "handshake_length",
            offset: 1,
            declared,
            actual: cur.remaining(),
        });
    }

    let legacy_version = cur.u16("legacy_version")?;
    cur.take(32, "random")?;

    let sid_offset = cur.pos;
    let sid_len = cur.u8("session_id_length")? as usize;
    if sid_len > 32 {
        return Err(ParseError::InvalidField {
            field: "session_id_length",
            offset: sid_offset,
        });
    }
    cur.take(sid_len, "session_id")?;

    let cipher_offset = cur.pos;
    let cipher_len = cur.u16("cipher_suites_length")? as usize;
    if cipher_len % 2 != 0 {
        return Err(ParseError::InvalidField {
            field: "cipher_suites_length",
            offset: cipher_offset,
        });
    }
    let cipher_bytes = cur.take(cipher_len, "cipher_suites")?;
    let cipher_suites: Vec<u16> = cipher_bytes
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();

    let comp_len = cur.u8("compression_methods_length")? as usize;
    cur.take(comp_len, "compression_methods")?;

    let mut hello = ClientHello {
        legacy_version,
        cipher_suites,
        extensions: Vec::new(),
        sni_hostname: None,
        alpn_protocols: Vec::new(),
        signature_algorithms: Vec::new(),
        supported_versions: Vec::new(),
        transport,
    };

    if cur.remaining() > 0 {
        let ext_offset = cur.pos;
        let ext_total = cur.u16("extensions_length")? as usize;
        if ext_total != cur.remaining() {
            return Err(ParseError::LengthMismatch {
                field: "extensions_length",
                offset: ext_offset,
                declared: ext_total,
                actual: cur.remaining(),
            });
        }
        while cur.remaining() > 0 {
            let ext_type = cur.u16("extension_type")?;
            let body_len = cur.u16("extension_length")? as usize;
            let body_offset = cur.pos;
            let body = cur.take(body_len, "extension_body")?;
            decode_known_extension(&mut hello, ext_type, body, body_offset)?;
            hello.extensions.push(Extension {
                ext_type,
                body: body.to_vec(),
            });
        }
    }

    debug_assert_eq!(cur.remaining(), 0);
    Ok(hello)
}

fn decode_known_extension(
    hello: &mut ClientHello,
    ext_type: u16,
    body: &[u8],
    offset: usize,
) -> Result<(), ParseError> {
    let mut cur = Cursor::new(body);
    cur.pos = 0;
    match ext_type {
        EXT_SNI => {
            // empty SNI bodies occur in session resumption; no host_name then
            if body.is_empty() {
                return Ok(());
            }
            let list_len = cur.u16("sni_list_length")? as usize;
            if list_len != cur.remaining() {
                return Err(ParseError::LengthMismatch {
                    field: "sni_list_length",
                    offset,
                    declared: list_len,
                    actual: cur.remaining(),
                });
            }
            while cur.remaining() > 0 {
                let name_type = cur.u8("sni_name_type")?;
                let name_len = cur.u16("sni_name_length")? as usize;
                let name = cur.take(name_len, "sni_host_name")?;
                if name_type == 0 && hello.sni_hostname.is_none() {
                    hello.sni_hostname =
                        Some(String::from_utf8_lossy(name).into_owned());
                }
            }
        }
        EXT_ALPN => {
            let list_len = cur.u16("alpn_list_length")? as usize;
            if list_len != cur.remaining() {
                return Err(ParseError::LengthMismatch {
                    field: "alpn_list_length",
                    offset,
                    declared: list_len,
                    actual: cur.remaining(),
                });
            }
            while cur.remaining() > 0 {
                let proto_len = cur.u8("alpn_protocol_length")? as usize;
                let proto = cur.take(proto_len, "alpn_protocol")?;
                hello.alpn_protocols.push(proto.to_vec());
            }
        }
        EXT_SIGNATURE_ALGORITHMS => {
            // taken from 0x000d only; duplicates keep the first occurrence
            if !hello.signature_algorithms.is_empty() {
                return Ok(());
            }
            let list_len = cur.u16("signature_algorithms_length")? as usize;
            if list_len != cur.remaining() || list_len % 2 != 0 {
                return Err(ParseError::LengthMismatch {
                    field: "signature_algorithms_length",
                    offset,
                    declared: list_len,
                    actual: cur.remaining(),
                });
            }
            while cur.remaining() > 0 {
                let code = cur.u16("signature_algorithm")?;
                hello.signature_algorithms.push(code);
            }
        }
        EXT_SUPPORTED_VERSIONS => {
            if !hello.supported_versions.is_empty() {
                return Ok(());
            }
            let list_len = cur.u8("supported_versions_length")? as usize;
            if list_len != cur.remaining() || list_len % 2 != 0 {
                return Err(ParseError::LengthMismatch {
                    field: "supported_versions_length",
                    offset,
                    declared: list_len,
                    actual: cur.remaining(),
                });
            }
            while cur.remaining() > 0 {
                let code = cur.u16("supported_version")?;
                hello.supported_versions.push(code);
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_hello() -> Vec<u8> {
        // version 0x0303, zero random, empty session id, one cipher 0x1301,
        // one null compression method, no extension block
        let mut body = vec![0x03, 0x03];
        body.extend([0u8; 32]);
        body.push(0); // session id
        body.extend([0x00, 0x02, 0x13, 0x01]); // ciphers
        body.extend([0x01, 0x00]); // compression
        let mut msg = vec![0x01, 0x00, 0x00, body.len() as u8];
        msg.extend(body);
        msg
    }

    #[test]
    fn parses_minimal_hello() {
        let hello = parse_clienthello(&minimal_hello(), Transport::Tcp).unwrap();
        assert_eq!(hello.legacy_version, 0x0303);
        assert_eq!(hello.cipher_suites, vec![0x1301]);
        assert!(hello.extensions.is_empty());
        assert!(hello.sni_hostname.is_none());
        assert!(hello.alpn_protocols.is_empty());
    }

    #[test]
    fn parses_sni_hostname() {
        let host = b"example.com";
        let mut sni = vec![0x00, (host.len() + 3) as u8, 0x00];
        sni.extend([0x00, host.len() as u8]);
        sni.extend(host);
        let mut ext = vec![0x00, 0x00, 0x00, sni.len() as u8];
        ext.extend(&sni);

        let mut body = vec![0x03, 0x03];
        body.extend([0u8; 32]);
        body.push(0);
        body.extend([0x00, 0x02, 0x13, 0x01]);
        body.extend([0x01, 0x00]);
        body.extend([0x00, ext.len() as u8]);
        body.extend(&ext);
        let mut msg = vec![0x01, 0x00, 0x00, body.len() as u8];
        msg.extend(body);

        let hello = parse_clienthello(&msg, Transport::Tcp).unwrap();
        assert_eq!(hello.sni_hostname.as_deref(), Some("example.com"));
        assert_eq!(hello.extensions.len(), 1);
        assert_eq!(hello.extensions[0].ext_type, EXT_SNI);
    }

    #[test]
    fn rejects_serverhello() {
        let mut msg = minimal_hello();
        msg[0] = 0x02;
        assert_eq!(
            parse_clienthello(&msg, Transport::Tcp),
            Err(ParseError::NotClientHello { found: 0x02 })
        );
    }

    #[test]
    fn rejects_trailing_bytes() {
        let mut msg = minimal_hello();
        msg.push(0xFF);
        match parse_clienthello(&msg, Transport::Tcp) {
            Err(ParseError::LengthMismatch { field, .. }) => {
                assert_eq!(field, "handshake_length")
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn rejects_truncated_cipher_list() {
        let mut msg = minimal_hello();
        // declare 4 cipher bytes but carry 2
        msg[3] += 0; // keep handshake length as-is, bump declared cipher len
        let cipher_len_pos = 4 + 2 + 32 + 1;
        msg[cipher_len_pos + 1] = 0x04;
        let err = parse_clienthello(&msg, Transport::Tcp).unwrap_err();
        assert!(matches!(
            err,
            ParseError::UnexpectedEnd { .. } | ParseError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn rejects_oversized_session_id() {
        let mut body = vec![0x03, 0x03];
        body.extend([0u8; 32]);
        body.push(33);
        body.extend([0u8; 33]);
        body.extend([0x00, 0x02, 0x13, 0x01, 0x01, 0x00]);
        let mut msg = vec![0x01, 0x00, 0x00, body.len() as u8];
        msg.extend(body);
        assert_eq!(
            parse_clienthello(&msg, Transport::Tcp),
            Err(ParseError::InvalidField {
                field: "session_id_length",
                offset: 6 + 32,
            })
        );
    }

    #[test]
    fn grease_table_matches_predicate() {
        for v in GREASE_VALUES {
            assert!(is_grease(v), "{v:04x}");
        }
        assert!(!is_grease(0x1301));
        assert!(!is_grease(0x0a0b));
        assert!(!is_grease(0x0b0a));
        assert!(is_grease(0x0a0a));
        assert!(is_grease(0xfafa));
        let count = (0..=u16::MAX).filter(|&c| is_grease(c)).count();
        assert_eq!(count, 16);
    }

    #[test]
    fn duplicate_extensions_preserved() {
        let ext = [0x00u8, 0x17, 0x00, 0x00, 0x00, 0x17, 0x00, 0x00];
        let mut body = vec![0x03, 0x03];
        body.extend([0u8; 32]);
        body.push(0);
        body.extend([0x00, 0x02, 0x13, 0x01]);
        body.extend([0x01, 0x00]);
        body.extend([0x00, ext.len() as u8]);
        body.extend(ext);
        let mut msg = vec![0x01, 0x00, 0x00, body.len() as u8];
        msg.extend(body);
        let hello = parse_clienthello(&msg, Transport::Tcp).unwrap();
        assert_eq!(hello.extensions.len(), 2);
        assert!(hello.extensions.iter().all(|e| e.ext_type == 0x0017));
    }
}
