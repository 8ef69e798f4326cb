#!/usr/bin/env python3
"""Independent JA4 client-fingerprint reference, used only to generate and
check test fixtures. Implements the published JA4 rules directly from
ClientHello bytes; it shares no code with the Rust crate.

Usage: ja4_reference.py <hex-of-clienthello> [tcp|quic]
"""

import hashlib
import string
import sys

GREASE = {0x0A0A + 0x1010 * i for i in range(16)}

VERSION_MAP = {
    0x0304: "13",
    0x0303: "12",
    0x0302: "11",
    0x0301: "10",
    0x0300: "s3",
    0x0002: "s2",
}


class Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise ValueError(f"overrun at {self.pos}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self):
        return self.take(1)[0]

    def u16(self):
        b = self.take(2)
        return (b[0] << 8) | b[1]

    def u24(self):
        b = self.take(3)
        return (b[0] << 16) | (b[1] << 8) | b[2]

    def remaining(self):
        return len(self.data) - self.pos


def parse_clienthello(data):
    r = Reader(data)
    if r.u8() != 0x01:
        raise ValueError("not a ClientHello")
    length = r.u24()
    if length != r.remaining():
        raise ValueError("handshake length mismatch")
    hello = {
        "legacy_version": r.u16(),
        "ciphers": [],
        "extensions": [],
        "sni": None,
        "alpn": [],
        "sigalgs": [],
        "supported_versions": [],
    }
    r.take(32)  # random
    r.take(r.u8())  # session id
    cipher_len = r.u16()
    for _ in range(cipher_len // 2):
        hello["ciphers"].append(r.u16())
    r.take(r.u8())  # compression methods
    if r.remaining() > 0:
        ext_total = r.u16()
        if ext_total != r.remaining():
            raise ValueError("extension block length mismatch")
        while r.remaining() > 0:
            etype = r.u16()
            body = r.take(r.u16())
            hello["extensions"].append(etype)
            br = Reader(body)
            if etype == 0x0000 and len(body) >= 2:
                br.u16()
                if br.remaining() >= 3 and br.u8() == 0:
                    hello["sni"] = br.take(br.u16()).decode("ascii", "replace")
            elif etype == 0x0010 and len(body) >= 2:
                br.u16()
                while br.remaining() > 0:
                    hello["alpn"].append(br.take(br.u8()))
            elif etype == 0x000D and len(body) >= 2:
                n = br.u16()
                for _ in range(n // 2):
                    hello["sigalgs"].append(br.u16())
            elif etype == 0x002B and len(body) >= 1:
                n = br.u8()
                for _ in range(n // 2):
                    hello["supported_versions"].append(br.u16())
    return hello


def sha12(text):
    return hashlib.sha256(text.encode("ascii")).hexdigest()[:12]


def ja4(hello, transport="tcp"):
    proto = "q" if transport in ("quic", "udp-quic") else "t"

    versions = [v for v in hello["supported_versions"] if v not in GREASE]
    if 0x002B in hello["extensions"] and versions:
        version = VERSION_MAP.get(max(versions), "00")
    else:
        version = VERSION_MAP.get(hello["legacy_version"], "00")

    sni = "d" if 0x0000 in hello["extensions"] else "i"

    ciphers = [c for c in hello["ciphers"] if c not in GREASE]
    exts = [e for e in hello["extensions"] if e not in GREASE]
    ncipher = min(len(ciphers), 99)
    next_ = min(len(exts), 99)

    alpn = "00"
    if hello["alpn"] and len(hello["alpn"][0]) > 0:
        entry = hello["alpn"][0]
        first, last = entry[0], entry[-1]
        if chr(first) in string.ascii_letters + string.digits:
            alpn = chr(first) + chr(last)
        else:
            alpn = f"{first:02x}"[0] + f"{last:02x}"[1]

    a = f"{proto}{version}{sni}{ncipher:02d}{next_:02d}{alpn}"

    if ciphers:
        b = sha12(",".join(f"{c:04x}" for c in sorted(ciphers)))
    else:
        b = "0" * 12

    hash_exts = sorted(e for e in exts if e not in (0x0000, 0x0010))
    if hash_exts:
        text = ",".join(f"{e:04x}" for e in hash_exts)
        if hello["sigalgs"]:
            text += "_" + ",".join(f"{s:04x}" for s in hello["sigalgs"])
        c = sha12(text)
    else:
        c = "0" * 12

    return f"{a}_{b}_{c}"


if __name__ == "__main__":
    raw = bytes.fromhex("".join(sys.argv[1].split()))
    transport = sys.argv[2] if len(sys.argv) > 2 else "tcp"
    print(ja4(parse_clienthello(raw), transport))
