#!/usr/bin/env python3
"""Generates the test fixtures under crates/ja4ml/fixtures/: synthetic
ClientHello profiles with expected fingerprints from ja4_reference.py,
pcap capture files wrapping them, and the evasion-scenario table."""

import json
import os
import struct
import sys

sys.path.insert(0, os.path.dirname(__file__))
from ja4_reference import ja4, parse_clienthello  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "ja4ml", "fixtures")


def u8(v):
    return struct.pack(">B", v)


def u16(v):
    return struct.pack(">H", v)


def u24(v):
    return struct.pack(">I", v)[1:]


def ext(etype, body):
    return u16(etype) + u16(len(body)) + body


def sni_body(host):
    entry = u8(0) + u16(len(host)) + host.encode()
    return u16(len(entry)) + entry


def alpn_body(protos):
    entries = b"".join(u8(len(p)) + p.encode() for p in protos)
    return u16(len(entries)) + entries


def sigalgs_body(algs):
    return u16(2 * len(algs)) + b"".join(u16(a) for a in algs)


def versions_body(versions):
    return u8(2 * len(versions)) + b"".join(u16(v) for v in versions)


def groups_body(groups):
    return u16(2 * len(groups)) + b"".join(u16(g) for g in groups)


def keyshare_body(shares):
    body = b"".join(u16(g) + u16(len(k)) + k for g, k in shares)
    return u16(len(body)) + body


def build_hello(legacy_version, ciphers, extensions, session_id=b"\x11" * 32):
    body = u16(legacy_version)
    body += b"\xab" * 32
    body += u8(len(session_id)) + session_id
    body += u16(2 * len(ciphers)) + b"".join(u16(c) for c in ciphers)
    body += u8(1) + u8(0)
    if extensions is not None:
        blob = b"".join(ext(t, b) for t, b in extensions)
        body += u16(len(blob)) + blob
    return u8(0x01) + u24(len(body)) + body


CHROME_CIPHERS = [0x0A0A, 0x1301, 0x1302, 0x1303, 0xC02B, 0xC02F, 0xC02C,
                  0xC030, 0xCCA9, 0xCCA8, 0xC013, 0xC014, 0x009C, 0x009D,
                  0x002F, 0x0035]
CHROME_SIGALGS = [0x0403, 0x0804, 0x0401, 0x0503, 0x0805, 0x0501, 0x0806, 0x0601]


def chrome_exts(sni="example.com", alpn=("h2", "http/1.1")):
    exts = [
        (0x1A1A, b""),
        (0x0017, b""),
        (0xFF01, b"\x00"),
        (0x000A, groups_body([0x2A2A, 0x001D, 0x0017, 0x0018])),
        (0x000B, b"\x01\x00"),
        (0x0023, b""),
        (0x0005, b"\x01\x00\x00\x00\x00"),
        (0x000D, sigalgs_body(CHROME_SIGALGS)),
        (0x0012, b""),
        (0x0033, keyshare_body([(0x2A2A, b"\x00"), (0x001D, b"\x5a" * 32)])),
        (0x002D, b"\x01\x01"),
        (0x002B, versions_body([0x3A3A, 0x0304, 0x0303])),
        (0x001B, b"\x02\x00\x02"),
        (0x4469, b"\x00\x03\x02h2"),
        (0xFE0D, b"\x00\x00\x01\x00\x01\x20\x00\x20" + b"\x77" * 32),
        (0x2A2A, b"\x00"),
    ]
    if alpn is not None:
        exts.insert(6, (0x0010, alpn_body(list(alpn))))
    if sni is not None:
        exts.insert(1, (0x0000, sni_body(sni)))
    return exts


def scripted_exts(sni="example.com", alpn=("http/1.1",)):
    exts = [
        (0x000B, b"\x01\x00"),
        (0x000A, groups_body([0x001D, 0x0017, 0x001E, 0x0019, 0x0018])),
        (0x0023, b""),
        (0x0016, b""),
        (0x0017, b""),
        (0x000D, sigalgs_body([0x0403, 0x0503, 0x0603, 0x0804, 0x0805,
                               0x0806, 0x0401, 0x0501, 0x0601])),
    ]
    if alpn is not None:
        exts.insert(2, (0x0010, alpn_body(list(alpn))))
    if sni is not None:
        exts.insert(0, (0x0000, sni_body(sni)))
    return exts


SCRIPTED_CIPHERS = [0x1302, 0x1303, 0x1301, 0xC02C, 0xC030, 0xC02B, 0xC02F,
                    0xCCA9, 0xCCA8, 0x009D, 0x009C, 0x0035, 0x002F]

# Real browser capture (petalsearch.com connection), handshake bytes only.
REAL_CAPTURE_HEX = (
    "010000f10303ad8e0c8dfe3adbc045e51aee4cb9480c02d5da4a240f95e8282a1f51b"
    "e34901a20681af80b44c4b359adb3f9543a966e07e6ba6bed551472a62cd4b107cbd4"
    "0e830014130213011303c02cc02bcca9c030c02fcca800ff01000094002b000504030"
    "40303000b00020100000a00080006001d00170018000d00140012050304030807080"
    "608050804060105010401001700000005000501000000000000001800160000137777"
    "772e706574616c7365617263682e636f6d00120000003300260024001d0020086fffe"
    "f5fa7f04fb7d788615bc425820eba366ddb5f75c7d8336a0a05722d38002d00020101"
    "00230000"
)


def grease_heavy():
    ciphers = [0x0A0A, 0x1A1A, 0x2A2A, 0x1301, 0x1302, 0x3A3A]
    exts = [
        (0x4A4A, b""),
        (0x0000, sni_body("grease.test")),
        (0x5A5A, b"\x00\x01\x02"),
        (0x000D, sigalgs_body([0x0403, 0x0804])),
        (0x002B, versions_body([0x6A6A, 0x7A7A, 0x0304])),
        (0x8A8A, b""),
        (0x002D, b"\x01\x01"),
    ]
    return build_hello(0x0303, ciphers, exts)


def make_hellos():
    hellos = [
        ("chrome_like", "tcp",
         build_hello(0x0303, CHROME_CIPHERS, chrome_exts())),
        ("scripted_client", "tcp",
         build_hello(0x0303, SCRIPTED_CIPHERS, scripted_exts())),
        ("no_sni", "tcp",
         build_hello(0x0303, CHROME_CIPHERS, chrome_exts(sni=None))),
        ("no_alpn", "tcp",
         build_hello(0x0303, CHROME_CIPHERS, chrome_exts(alpn=None))),
        ("grease_heavy", "tcp", grease_heavy()),
        ("real_capture", "tcp", bytes.fromhex(REAL_CAPTURE_HEX)),
        ("quic_client", "udp-quic",
         build_hello(0x0303, [0x1301, 0x1302, 0x1303],
                     [(0x0000, sni_body("quic.test")),
                      (0x0010, alpn_body(["h3"])),
                      (0x000D, sigalgs_body([0x0403, 0x0804])),
                      (0x002B, versions_body([0x0304]))])),
    ]
    out = []
    for name, transport, raw in hellos:
        fp = ja4(parse_clienthello(raw), transport)
        out.append({"name": name, "transport": transport,
                    "hex": raw.hex(), "ja4": fp})
        print(f"{name:16} {fp}")
    return out


def tcp_packet(src_ip, dst_ip, sport, dport, payload, seq=1000):
    eth = b"\x02" * 6 + b"\x04" * 6 + b"\x08\x00"
    tcp = (u16(sport) + u16(dport) + struct.pack(">I", seq)
           + struct.pack(">I", 0) + b"\x50\x18" + u16(65535)
           + b"\x00\x00\x00\x00" + payload)
    ip = (b"\x45\x00" + u16(20 + len(tcp)) + b"\x00\x01\x40\x00\x40\x06"
          + b"\x00\x00" + src_ip + dst_ip)
    return eth + ip + tcp


def udp_packet(src_ip, dst_ip, sport, dport, payload):
    eth = b"\x02" * 6 + b"\x04" * 6 + b"\x08\x00"
    udp = u16(sport) + u16(dport) + u16(8 + len(payload)) + b"\x00\x00" + payload
    ip = (b"\x45\x00" + u16(20 + len(udp)) + b"\x00\x02\x40\x00\x40\x11"
          + b"\x00\x00" + src_ip + dst_ip)
    return eth + ip + udp


def pcap(packets, magic=0xA1B2C3D4, linktype=1, swap=False):
    fmt_end = "<" if swap else ">"
    head = struct.pack(fmt_end + "IHHiIII", magic, 2, 4, 0, 0, 65535, linktype)
    body = b""
    for i, pkt in enumerate(packets):
        body += struct.pack(fmt_end + "IIII", 1700000000 + i, 0,
                            len(pkt), len(pkt)) + pkt
    return head + body


def tls_records(hello, split_at=None):
    if split_at is None:
        return b"\x16\x03\x01" + u16(len(hello)) + hello
    a, b = hello[:split_at], hello[split_at:]
    return (b"\x16\x03\x01" + u16(len(a)) + a
            + b"\x16\x03\x01" + u16(len(b)) + b)


def make_captures(hellos):
    cap = os.path.join(OUT, "captures")
    os.makedirs(cap, exist_ok=True)
    by_name = {h["name"]: bytes.fromhex(h["hex"]) for h in hellos}
    ip_a, ip_b = b"\x0a\x00\x00\x01", b"\x5d\xb8\xd8\x22"

    one = tcp_packet(ip_a, ip_b, 40001, 443, tls_records(by_name["chrome_like"]))
    ack = tcp_packet(ip_a, ip_b, 40001, 443, b"", seq=2000)
    with open(os.path.join(cap, "single_https.pcap"), "wb") as f:
        f.write(pcap([ack, one, one]))

    dns = udp_packet(ip_a, b"\x08\x08\x08\x08", 51000, 53,
                     b"\x12\x34\x01\x00\x00\x01\x00\x00\x00\x00\x00\x00")
    with open(os.path.join(cap, "dns_only.pcap"), "wb") as f:
        f.write(pcap([dns, dns]))

    frag = tcp_packet(ip_a, ip_b, 40002, 443,
                      tls_records(by_name["chrome_like"], split_at=100))
    with open(os.path.join(cap, "fragmented.pcap"), "wb") as f:
        f.write(pcap([frag]))

    tcp_profiles = ["chrome_like", "scripted_client", "no_sni", "no_alpn",
                    "grease_heavy", "real_capture"]
    pkts = [tcp_packet(ip_a, ip_b, 41000 + i, 443, tls_records(by_name[n]))
            for i, n in enumerate(tcp_profiles)]
    with open(os.path.join(cap, "samples.pcap"), "wb") as f:
        f.write(pcap(pkts))
    with open(os.path.join(cap, "samples_swapped.pcap"), "wb") as f:
        f.write(pcap(pkts, magic=0xA1B2C3D4, swap=True))
    with open(os.path.join(cap, "samples_nano.pcap"), "wb") as f:
        f.write(pcap(pkts, magic=0xA1B23C4D))

    sll = (b"\x00\x00\x00\x01\x00\x06" + b"\x02" * 6 + b"\x00\x00\x08\x00"
           + tcp_packet(ip_a, ip_b, 40003, 443,
                        tls_records(by_name["scripted_client"]))[14:])
    with open(os.path.join(cap, "linux_sll.pcap"), "wb") as f:
        f.write(pcap([sll], linktype=113))

    raw_ip = tcp_packet(ip_a, ip_b, 40004, 443,
                        tls_records(by_name["no_sni"]))[14:]
    with open(os.path.join(cap, "raw_ip.pcap"), "wb") as f:
        f.write(pcap([raw_ip], linktype=101))

    return tcp_profiles


SCENARIOS = [
    {"name": "header_spoofing_user_agent", "base": "scripted_client",
     "mutation": "rotate_user_agent_metadata", "expected": "fingerprint_unchanged"},
    {"name": "header_spoofing_ip_rotation", "base": "scripted_client",
     "mutation": "rotate_ip_metadata", "expected": "fingerprint_unchanged"},
    {"name": "automated_script_stack", "base": "chrome_like",
     "mutation": "swap_tls_stack", "target": "scripted_client",
     "expected": "fingerprint_changed"},
    {"name": "grease_randomization", "base": "chrome_like",
     "mutation": "permute_grease", "expected": "fingerprint_unchanged"},
    {"name": "cipher_reordering", "base": "chrome_like",
     "mutation": "reorder_ciphers", "expected": "fingerprint_unchanged"},
    {"name": "full_stack_emulation", "base": "chrome_like",
     "mutation": "bitwise_mimic", "target": "chrome_like",
     "expected": "fingerprint_equals_target"},
    {"name": "sophisticated_tls_spoofing", "base": "scripted_client",
     "mutation": "bitwise_mimic", "target": "chrome_like",
     "expected": "fingerprint_equals_target"},
]


def main():
    os.makedirs(OUT, exist_ok=True)
    hellos = make_hellos()
    chrome = next(h for h in hellos if h["name"] == "chrome_like")
    assert chrome["ja4"] == "t13d1516h2_8daaf6152771_02713d6af862", chrome["ja4"]
    with open(os.path.join(OUT, "hellos.json"), "w") as f:
        json.dump(hellos, f, indent=2)
        f.write("\n")
    with open(os.path.join(OUT, "scenarios.json"), "w") as f:
        json.dump(SCENARIOS, f, indent=2)
        f.write("\n")
    make_captures(hellos)
    print("fixtures written to", os.path.abspath(OUT))


if __name__ == "__main__":
    main()
