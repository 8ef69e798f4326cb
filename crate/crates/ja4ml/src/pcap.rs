//! Capture ingestion: classic libpcap files, hex strings, and raw bytes.
//!
//! The reader walks the capture once, keeps the first client-to-server TLS
//! handshake record per 5-tuple flow, and yields the TCP segment payload as
//! a [`HandshakeCandidate`]. ClientHello reassembly spans consecutive TLS
//! records inside that first segment only; cross-segment TCP reassembly is
//! out of scope and surfaces as a truncation error instead.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clienthello::Transport;

const MAGIC_US_BE: u32 = 0xA1B2_C3D4;
const MAGIC_US_LE: u32 = 0xD4C3_B2A1;
const MAGIC_NS_BE: u32 = 0xA1B2_3C4D;
const MAGIC_NS_LE: u32 = 0x4D3C_B2A1;
const MAGIC_PCAPNG: u32 = 0x0A0D_0D0A;

pub const LINKTYPE_ETHERNET: u32 = 1;
pub const LINKTYPE_RAW_IP: u32 = 101;
pub const LINKTYPE_LINUX_SLL: u32 = 113;

/// Where ClientHello bytes come from.
#[derive(Debug, Clone)]
pub enum CaptureSource {
    PcapFile(std::path::PathBuf),
    /// Whitespace-tolerant, case-insensitive hex of either a full TLS
    /// record stream or bare handshake bytes.
    HexString {
        hex: String,
        transport: Transport,
    },
    RawBytes {
        bytes: Vec<u8>,
        transport: Transport,
    },
}

/// One candidate ClientHello-bearing payload, keyed by its flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandshakeCandidate {
    /// Digest of (src addr, dst addr, src port, dst port, transport).
    pub flow_id: String,
    pub payload: Vec<u8>,
    pub transport: Transport,
}

#[derive(Debug, Error)]
pub enum CaptureError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad capture magic 0x{magic:08x} (pcapng is not supported, classic pcap only)")]
    PcapngNotSupported { magic: u32 },
    #[error("bad capture magic 0x{magic:08x}")]
    BadMagic { magic: u32 },
    #[error("unsupported link type {0} (supported: 1 ethernet, 101 raw ip, 113 linux cooked)")]
    UnsupportedLinkType(u32),
    #[error("truncated pcap record at byte offset {offset}")]
    TruncatedRecord { offset: usize },
    #[error("odd-length hex input ({0} digits)")]
    OddHexLength(usize),
    #[error("invalid hex input: {0}")]
    BadHex(hex::FromHexError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("payload does not start with a TLS handshake record (content type 0x{found:02x})")]
    NotTlsHandshake { found: u8 },
    #[error("first handshake message is type 0x{found:02x}, not a ClientHello")]
    NotClientHello { found: u8 },
    #[error("TLS record at offset {offset} declares {declared} bytes but only {available} are available")]
    TruncatedRecord {
        offset: usize,
        declared: usize,
        available: usize,
    },
    #[error("ClientHello declares {declared} handshake bytes but records carry only {available}")]
    TruncatedHandshake { declared: usize, available: usize },
    #[error("payload too short ({0} bytes)")]
    TooShort(usize),
}

struct FlowKey {
    src: Vec<u8>,
    dst: Vec<u8>,
    sport: u16,
    dport: u16,
}

impl fmt::Display for FlowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut hasher = Sha256::new();
        hasher.update(&self.src);
        hasher.update(&self.dst);
        hasher.update(self.sport.to_be_bytes());
        hasher.update(self.dport.to_be_bytes());
        hasher.update(b"tcp");
        write!(f, "{}", &hex::encode(hasher.finalize())[..16])
    }
}

/// Opens a capture source and returns the candidate list in capture order,
/// at most one candidate per flow.
pub fn open_capture(source: &CaptureSource) -> Result<Vec<HandshakeCandidate>, CaptureError> {
    match source {
        CaptureSource::PcapFile(path) => read_pcap(path),
        CaptureSource::HexString { hex, transport } => {
            let bytes = decode_hex(hex)?;
            Ok(inline_candidate(bytes, *transport))
        }
        CaptureSource::RawBytes { bytes, transport } => {
            Ok(inline_candidate(bytes.clone(), *transport))
        }
    }
}

fn decode_hex(input: &str) -> Result<Vec<u8>, CaptureError> {
    let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.len() % 2 != 0 {
        return Err(CaptureError::OddHexLength(cleaned.len()));
    }
    hex::decode(&cleaned).map_err(CaptureError::BadHex)
}

fn inline_candidate(bytes: Vec<u8>, transport: Transport) -> Vec<HandshakeCandidate> {
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    hasher.update(b"inline");
    let flow_id = hex::encode(hasher.finalize())[..16].to_string();
    // bare handshake bytes are wrapped in a synthetic record so extraction
    // sees a uniform shape
    let payload = if bytes.first() == Some(&0x01) {
        let mut rec = vec![0x16, 0x03, 0x01];
        rec.extend((bytes.len() as u16).to_be_bytes());
        rec.extend(&bytes);
        rec
    } else {
        bytes
    };
    vec![HandshakeCandidate {
        flow_id,
        payload,
        transport,
    }]
}

fn read_pcap(path: &Path) -> Result<Vec<HandshakeCandidate>, CaptureError> {
    let data = fs::read(path).map_err(|source| CaptureError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if data.len() < 24 {
        return Err(CaptureError::TruncatedRecord { offset: 0 });
    }
    let magic_be = u32::from_be_bytes(data[0..4].try_into().unwrap());
    let swapped = match magic_be {
        MAGIC_US_BE | MAGIC_NS_BE => false,
        MAGIC_US_LE | MAGIC_NS_LE => true,
        MAGIC_PCAPNG => return Err(CaptureError::PcapngNotSupported { magic: magic_be }),
        other => return Err(CaptureError::BadMagic { magic: other }),
    };
    let read_u32 = |buf: &[u8]| -> u32 {
        let raw = u32::from_be_bytes(buf.try_into().unwrap());
        if swapped {
            raw.swap_bytes()
        } else {
            raw
        }
    };
    let link_type = read_u32(&data[20..24]);
    if ![LINKTYPE_ETHERNET, LINKTYPE_RAW_IP, LINKTYPE_LINUX_SLL].contains(&link_type) {
        return Err(CaptureError::UnsupportedLinkType(link_type));
    }

    let mut candidates = Vec::new();
    let mut seen_flows: HashSet<String> = HashSet::new();
    let mut offset = 24;
    while offset < data.len() {
        if offset + 16 > data.len() {
            return Err(CaptureError::TruncatedRecord { offset });
        }
        let incl_len = read_u32(&data[offset + 8..offset + 12]) as usize;
        let pkt_start = offset + 16;
        if pkt_start + incl_len > data.len() {
            return Err(CaptureError::TruncatedRecord { offset });
        }
        let frame = &data[pkt_start..pkt_start + incl_len];
        if let Some((key, payload)) = tcp_payload(frame, link_type) {
            if !payload.is_empty() && payload[0] == 0x16 {
                let is_clienthello = payload.len() > 5 && payload[5] == 0x01;
                if is_clienthello {
                    let flow_id = key.to_string();
                    if seen_flows.insert(flow_id.clone()) {
                        candidates.push(HandshakeCandidate {
                            flow_id,
                            payload: payload.to_vec(),
                            transport: Transport::Tcp,
                        });
                    }
                }
            }
        }
        offset = pkt_start + incl_len;
    }
    Ok(candidates)
}

/// Strips the link and network layers; returns the flow key and TCP payload.
fn tcp_payload(frame: &[u8], link_type: u32) -> Option<(FlowKey, &[u8])> {
    let ip = match link_type {
        LINKTYPE_ETHERNET => {
            if frame.len() < 14 {
                return None;
            }
            let ethertype = u16::from_be_bytes([frame[12], frame[13]]);
            match ethertype {
                0x0800 | 0x86DD => &frame[14..],
                // single VLAN tag
                0x8100 if frame.len() >= 18 => &frame[18..],
                _ => return None,
            }
        }
        LINKTYPE_LINUX_SLL => {
            if frame.len() < 16 {
                return None;
            }
            &frame[16..]
        }
        LINKTYPE_RAW_IP => frame,
        _ => return None,
    };
    ip_tcp_payload(ip)
}

fn ip_tcp_payload(ip: &[u8]) -> Option<(FlowKey, &[u8])> {
    if ip.is_empty() {
        return None;
    }
    let (src, dst, proto, transport_bytes) = match ip[0] >> 4 {
        4 => {
            if ip.len() < 20 {
                return None;
            }
            let ihl = ((ip[0] & 0x0F) as usize) * 4;
            let total = u16::from_be_bytes([ip[2], ip[3]]) as usize;
            if ihl < 20 || total < ihl || ip.len() < total {
                return None;
            }
            (
                ip[12..16].to_vec(),
                ip[16..20].to_vec(),
                ip[9],
                &ip[ihl..total],
            )
        }
        6 => {
            if ip.len() < 40 {
                return None;
            }
            let payload_len = u16::from_be_bytes([ip[4], ip[5]]) as usize;
            if ip.len() < 40 + payload_len {
                return None;
            }
            // extension-header chains are not walked
            (
                ip[8..24].to_vec(),
                ip[24..40].to_vec(),
                ip[6],
                &ip[40..40 + payload_len],
            )
        }
        _ => return None,
    };
    if proto != 6 || transport_bytes.len() < 20 {
        return None;
    }
    let tcp = transport_bytes;
    let sport = u16::from_be_bytes([tcp[0], tcp[1]]);
    let dport = u16::from_be_bytes([tcp[2], tcp[3]]);
    let data_offset = ((tcp[12] >> 4) as usize) * 4;
    if data_offset < 20 || tcp.len() < data_offset {
        return None;
    }
    Some((
        FlowKey {
            src,
            dst,
            sport,
            dport,
        },
        &tcp[data_offset..],
    ))
}

/// Pulls the ClientHello handshake message (type byte, 3-byte length, body)
/// out of a candidate payload, reassembling across consecutive TLS records.
pub fn extract_clienthello_bytes(candidate: &HandshakeCandidate) -> Result<Vec<u8>, ExtractError> {
    let payload = &candidate.payload;
    if payload.len() < 6 {
        return Err(ExtractError::TooShort(payload.len()));
    }
    if payload[0] != 0x16 {
        return Err(ExtractError::NotTlsHandshake { found: payload[0] });
    }
    if payload[5] != 0x01 {
        return Err(ExtractError::NotClientHello { found: payload[5] });
    }

    // declared handshake length from the first record's first 4 bytes
    let declared = 4
        + (((payload[6] as usize) << 16) | ((payload[7] as usize) << 8) | payload[8] as usize);

    let mut handshake = Vec::with_capacity(declared);
    let mut offset = 0;
    while handshake.len() < declared {
        if offset + 5 > payload.len() {
            return Err(ExtractError::TruncatedHandshake {
                declared,
                available: handshake.len(),
            });
        }
        if payload[offset] != 0x16 {
            return Err(ExtractError::NotTlsHandshake {
                found: payload[offset],
            });
        }
        let rec_len = u16::from_be_bytes([payload[offset + 3], payload[offset + 4]]) as usize;
        let body_start = offset + 5;
        if body_start + rec_len > payload.len() {
            return Err(ExtractError::TruncatedRecord {
                offset,
                declared: rec_len,
                available: payload.len() - body_start,
            });
        }
        let take = rec_len.min(declared - handshake.len());
        handshake.extend_from_slice(&payload[body_start..body_start + take]);
        offset = body_start + rec_len;
    }
    debug_assert_eq!(handshake.len(), declared);
    Ok(handshake)
}
