#!/usr/bin/env python3
"""Regenerate the bundled case-study fixture data.

Builds src/threatsmith/data/snapshot.json and mitigations.json. The
snapshot is synthetic: CVE ids are made up, but the per-keyword weakness
sets, occurrence counts, and totals are constructed so the analysis
output matches the published case-study numbers (threat counts per
component, top-5 rankings, and the PLC share figures of 9% and 8% over
213 entries). Refreshing against live sources will legitimately diverge.
"""
from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

SRC = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(SRC))

from threatsmith.library import (  # noqa: E402
    FORMAT_VERSION,
    KeywordEntry,
    LibrarySnapshot,
    save_snapshot,
)
from threatsmith.model import CveCwePair, CveId, CweId  # noqa: E402

DATA_DIR = SRC / "threatsmith" / "data"

# The 60 PLC weaknesses from the case study, in published order.
PLC_CWE_SET = [
    121, 125, 384, 294, 319, 312, 703, 676, 798, 306,
    404, 494, 326, 416, 415, 284, 552, 347, 345, 434,
    22, 425, 400, 522, 532, 787, 401, 672, 287, 427,
    23, 755, 770, 20, 863, 94, 476, 119, 665, 120,
    754, 307, 77, 862, 668, 201, 352, 290, 78, 353,
    79, 200, 327, 662, 255, 254, 399, 16, 310, 295,
]

# Per keyword: ranked (cwe, distinct-CVE count) head, filler count (all at
# one CVE each), and how many retrieved CVEs carried no mappable weakness.
CASE_STUDY = {
    "PLC": {
        "head": [(119, 19), (287, 17), (400, 16), (306, 15), (20, 14)],
        "total_threats": 60,
        "unmapped": 77,  # brings the PLC total to 213 CVE entries
        "seq_base": 10000,
    },
    "RTU": {
        "head": [(798, 6), (22, 5), (287, 4), (754, 3), (200, 2)],
        "total_threats": 29,
        "unmapped": 4,
        "seq_base": 20000,
    },
    "SCADA": {
        "head": [(119, 12), (200, 10), (20, 9), (22, 8), (79, 7)],
        "total_threats": 68,
        "unmapped": 11,
        "seq_base": 30000,
    },
    "sensor": {
        "head": [(787, 9), (22, 8), (20, 7), (264, 6), (77, 5)],
        "total_threats": 48,
        "unmapped": 7,
        "seq_base": 40000,
    },
    "actuator": {
        "head": [(22, 6), (200, 5), (862, 4), (94, 3), (732, 2)],
        "total_threats": 11,
        "unmapped": 3,
        "seq_base": 50000,
    },
    "HMI": {
        "head": [(79, 4), (20, 3), (119, 2)],
        "total_threats": 6,
        "unmapped": 2,
        "seq_base": 60000,
    },
    "IED": {
        "head": [(287, 3), (798, 2)],
        "total_threats": 4,
        "unmapped": 1,
        "seq_base": 70000,
    },
}

# Filler weaknesses beyond the PLC set, used where a component needs more
# distinct CWEs than the PLC list can supply without colliding.
EXTRA_FILLERS = [89, 269, 311, 502, 611, 918, 924, 521]


def filler_cwes(head_ids: set[int], needed: int) -> list[int]:
    pool = [n for n in PLC_CWE_SET + EXTRA_FILLERS if n not in head_ids]
    if needed > len(pool):
        raise SystemExit(f"not enough filler CWEs: need {needed}, have {len(pool)}")
    return pool[:needed]


def build_keyword_entry(spec: dict, keyword: str) -> KeywordEntry:
    head = spec["head"]
    fillers = filler_cwes({c for c, _ in head}, spec["total_threats"] - len(head))
    counts = list(head) + [(n, 1) for n in fillers]
    if keyword == "PLC":
        # The PLC threat set must be exactly the published 60 ids.
        assert sorted(n for n, _ in counts) == sorted(PLC_CWE_SET)
    pairs: list[CveCwePair] = []
    seq = spec["seq_base"]
    for cwe_number, cve_count in counts:
        for _ in range(cve_count):
            pairs.append(CveCwePair(CveId(2020, seq, seq_width=5), CweId(cwe_number)))
            seq += 1
    return KeywordEntry(tuple(pairs), spec["unmapped"])


# CWE titles plus one or two concrete mitigations each; covers every
# weakness that can appear in the bundled snapshot.
CATALOG: dict[int, tuple[str, list[str]]] = {
    16: ("Configuration", [
        "Harden device and service configuration against a documented baseline.",
    ]),
    20: ("Improper Input Validation", [
        "Validate all input against an allowlist of expected values and lengths.",
        "Reject malformed protocol messages before they reach control logic.",
    ]),
    22: ("Improper Limitation of a Pathname to a Restricted Directory ('Path Traversal')", [
        "Canonicalize paths and verify they stay inside the permitted root.",
        "Serve files by identifier lookup instead of client-supplied paths.",
    ]),
    23: ("Relative Path Traversal", [
        "Strip or reject '..' sequences after canonicalization.",
    ]),
    77: ("Improper Neutralization of Special Elements used in a Command ('Command Injection')", [
        "Invoke subprocesses with argument vectors, never via shell strings.",
    ]),
    78: ("Improper Neutralization of Special Elements used in an OS Command ('OS Command Injection')", [
        "Use parameterized process APIs and escape any unavoidable shell metacharacters.",
    ]),
    79: ("Improper Neutralization of Input During Web Page Generation ('Cross-site Scripting')", [
        "Contextually encode all untrusted output in HMI web pages.",
        "Set a restrictive Content-Security-Policy on embedded web servers.",
    ]),
    89: ("Improper Neutralization of Special Elements used in an SQL Command ('SQL Injection')", [
        "Use parameterized queries; never concatenate SQL from input.",
    ]),
    94: ("Improper Control of Generation of Code ('Code Injection')", [
        "Never evaluate untrusted data as code; sign and verify uploaded logic.",
    ]),
    119: ("Improper Restriction of Operations within the Bounds of a Memory Buffer", [
        "Use bounds-checked APIs and fuzz protocol parsers on firmware builds.",
        "Enable compiler hardening (stack canaries, ASLR) where the platform allows.",
    ]),
    120: ("Buffer Copy without Checking Size of Input ('Classic Buffer Overflow')", [
        "Replace unbounded copies with length-limited variants.",
    ]),
    121: ("Stack-based Buffer Overflow", [
        "Check input lengths before stack writes; build with stack protection.",
    ]),
    125: ("Out-of-bounds Read", [
        "Validate offsets and lengths before every buffer read.",
    ]),
    200: ("Exposure of Sensitive Information to an Unauthorized Actor", [
        "Restrict diagnostic and configuration interfaces to authenticated roles.",
    ]),
    201: ("Insertion of Sensitive Information Into Sent Data", [
        "Review protocol responses for credential or topology leakage.",
    ]),
    254: ("7PK - Security Features", [
        "Audit authentication, authorization, and crypto features against current guidance.",
    ]),
    255: ("Credentials Management Errors", [
        "Store credentials hashed with a modern KDF; rotate defaults at commissioning.",
    ]),
    264: ("Permissions, Privileges, and Access Controls", [
        "Apply least privilege to accounts, services, and file permissions.",
    ]),
    269: ("Improper Privilege Management", [
        "Drop elevated privileges as soon as the privileged step completes.",
    ]),
    284: ("Improper Access Control", [
        "Enforce access decisions server-side on every request path.",
    ]),
    287: ("Improper Authentication", [
        "Require authentication on every management and engineering interface.",
        "Prefer mutual authentication for controller-to-master links.",
    ]),
    290: ("Authentication Bypass by Spoofing", [
        "Authenticate peers cryptographically, not by address or hostname.",
    ]),
    294: ("Authentication Bypass by Capture-replay", [
        "Include nonces or timestamps in authentication exchanges to defeat replay.",
    ]),
    295: ("Improper Certificate Validation", [
        "Validate the full certificate chain, hostname, and revocation status.",
    ]),
    306: ("Missing Authentication for Critical Function", [
        "Gate firmware update, logic download, and restart functions behind authentication.",
    ]),
    307: ("Improper Restriction of Excessive Authentication Attempts", [
        "Throttle and lock out repeated failed logins.",
    ]),
    310: ("Cryptographic Issues", [
        "Replace proprietary or legacy crypto with vetted standard algorithms.",
    ]),
    311: ("Missing Encryption of Sensitive Data", [
        "Encrypt sensitive data at rest and in transit.",
    ]),
    312: ("Cleartext Storage of Sensitive Information", [
        "Encrypt stored secrets; keep them out of project files and backups.",
    ]),
    319: ("Cleartext Transmission of Sensitive Information", [
        "Wrap legacy protocols in TLS or an encrypted tunnel between stations.",
    ]),
    326: ("Inadequate Encryption Strength", [
        "Use key lengths and algorithms meeting current minimum strengths.",
    ]),
    327: ("Use of a Broken or Risky Cryptographic Algorithm", [
        "Migrate off MD5/SHA-1/DES and similar deprecated algorithms.",
    ]),
    345: ("Insufficient Verification of Data Authenticity", [
        "Verify origin and integrity of data before acting on it.",
    ]),
    347: ("Improper Verification of Cryptographic Signature", [
        "Verify signatures against pinned keys and reject unsigned artifacts.",
    ]),
    352: ("Cross-Site Request Forgery (CSRF)", [
        "Use anti-CSRF tokens and SameSite cookies on web HMIs.",
    ]),
    353: ("Missing Support for Integrity Check", [
        "Add message authentication codes to custom protocols.",
    ]),
    384: ("Session Fixation", [
        "Issue a fresh session identifier at every privilege change.",
    ]),
    399: ("Resource Management Errors", [
        "Bound queue, connection, and memory usage; test exhaustion paths.",
    ]),
    400: ("Uncontrolled Resource Consumption", [
        "Rate-limit requests and cap per-session resource allocation.",
        "Watchdog and recover control tasks under load.",
    ]),
    401: ("Missing Release of Memory after Effective Lifetime", [
        "Audit long-running services for leaks; soak test firmware.",
    ]),
    404: ("Improper Resource Shutdown or Release", [
        "Release sockets, handles, and sessions on every exit path.",
    ]),
    415: ("Double Free", [
        "Null pointers after free; run allocator sanitizers in test builds.",
    ]),
    416: ("Use After Free", [
        "Adopt ownership discipline for shared buffers; sanitize in CI.",
    ]),
    425: ("Direct Request ('Forced Browsing')", [
        "Authorize every URL server-side rather than hiding links.",
    ]),
    427: ("Uncontrolled Search Path Element", [
        "Load libraries and executables from fixed absolute paths only.",
    ]),
    434: ("Unrestricted Upload of File with Dangerous Type", [
        "Allowlist upload types and store uploads outside executable roots.",
    ]),
    476: ("NULL Pointer Dereference", [
        "Check pointer validity on all protocol-driven code paths.",
    ]),
    494: ("Download of Code Without Integrity Check", [
        "Sign firmware and verify before installation.",
    ]),
    502: ("Deserialization of Untrusted Data", [
        "Avoid native deserialization of untrusted input; use schema-validated formats.",
    ]),
    521: ("Weak Password Requirements", [
        "Enforce minimum length and complexity; block known-breached passwords.",
    ]),
    522: ("Insufficiently Protected Credentials", [
        "Protect credentials with OS keystores or hardware-backed storage.",
    ]),
    532: ("Insertion of Sensitive Information into Log File", [
        "Scrub secrets from logs; restrict log access.",
    ]),
    552: ("Files or Directories Accessible to External Parties", [
        "Close anonymous file shares and restrict FTP/SMB exposure.",
    ]),
    611: ("Improper Restriction of XML External Entity Reference", [
        "Disable external entity resolution in all XML parsers.",
    ]),
    662: ("Improper Synchronization", [
        "Guard shared state with proper locking; test under concurrency.",
    ]),
    665: ("Improper Initialization", [
        "Initialize all security-relevant state before first use.",
    ]),
    668: ("Exposure of Resource to Wrong Sphere", [
        "Keep internal interfaces off routable networks; segment OT from IT.",
    ]),
    672: ("Operation on a Resource after Expiration or Release", [
        "Invalidate handles and sessions atomically with release.",
    ]),
    676: ("Use of Potentially Dangerous Function", [
        "Ban unsafe libc functions via lint rules and code review.",
    ]),
    703: ("Improper Check or Handling of Exceptional Conditions", [
        "Fail closed on unexpected states; never crash into an insecure mode.",
    ]),
    732: ("Incorrect Permission Assignment for Critical Resource", [
        "Set restrictive permissions on configuration and key material.",
    ]),
    754: ("Improper Check for Unusual or Exceptional Conditions", [
        "Validate return codes and malformed-frame conditions in protocol stacks.",
    ]),
    755: ("Improper Handling of Exceptional Conditions", [
        "Define safe fallback behavior for every fault class.",
    ]),
    770: ("Allocation of Resources Without Limits or Throttling", [
        "Cap allocation sizes driven by network input.",
    ]),
    787: ("Out-of-bounds Write", [
        "Bounds-check every write; fuzz parsers handling field-device input.",
    ]),
    798: ("Use of Hard-coded Credentials", [
        "Remove embedded accounts; require per-device credentials set at install.",
    ]),
    862: ("Missing Authorization", [
        "Check authorization on every operation, not only at login.",
    ]),
    863: ("Incorrect Authorization", [
        "Centralize authorization decisions and test role boundaries.",
    ]),
    918: ("Server-Side Request Forgery (SSRF)", [
        "Allowlist outbound destinations for server-initiated requests.",
    ]),
    924: ("Improper Enforcement of Message Integrity During Transmission in a Communication Channel", [
        "Use authenticated channels for all control traffic.",
    ]),
}


def main() -> None:
    entries = {
        keyword: build_keyword_entry(spec, keyword)
        for keyword, spec in CASE_STUDY.items()
    }
    snapshot = LibrarySnapshot(
        format_version=FORMAT_VERSION,
        fetched_at=datetime(2024, 6, 1, tzinfo=timezone.utc),
        entries=entries,
        source_note=(
            "Synthetic case-study fixture: CVE ids are fabricated; aggregate "
            "counts reproduce the published case-study tables. Run "
            "'threatsmith update' to refresh from live sources."
        ),
    )
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    save_snapshot(snapshot, DATA_DIR / "snapshot.json")

    used = {p.cwe.number for e in entries.values() for p in e.pairs}
    missing = used - set(CATALOG)
    if missing:
        raise SystemExit(f"catalog lacks titles for: {sorted(missing)}")
    catalog_doc = {
        f"CWE-{n}": {"title": title, "mitigations": mitigations}
        for n, (title, mitigations) in sorted(CATALOG.items())
    }
    catalog_path = DATA_DIR / "mitigations.json"
    catalog_path.write_text(
        json.dumps(catalog_doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {DATA_DIR / 'snapshot.json'} ({len(entries)} keywords)")
    print(f"wrote {catalog_path} ({len(catalog_doc)} CWE entries)")


if __name__ == "__main__":
    main()
