"""Persistent snapshot store of CVE-CWE pairs per search keyword.

The snapshot is the precompiled threat library: one self-describing JSON
document so analysis runs offline and fast, refreshed wholesale per
keyword by an explicit update. Snapshots are immutable values; update
returns a new one and the file swap is write-then-rename.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .model import CveCwePair, MalformedIdentifier, parse_cve_id, parse_cwe_id
from .sources import PartialFetch, SourceClient

FORMAT_VERSION = 1
SUPPORTED_VERSIONS = frozenset({1})


class MalformedSnapshot(ValueError):
    """Snapshot file violates the schema or a library invariant."""


class UnsupportedVersion(MalformedSnapshot):
    def __init__(self, version):
        super().__init__(f"unsupported snapshot format_version: {version}")
        self.version = version


class IoFailure(OSError):
    pass


@dataclass(frozen=True)
class KeywordEntry:
    """One keyword's evidence: unique (cve, cwe) pairs plus the unmapped tally."""

    pairs: tuple[CveCwePair, ...]
    unmapped_count: int

    def __post_init__(self) -> None:
        if len(set(self.pairs)) != len(self.pairs):
            raise MalformedSnapshot("duplicate (cve, cwe) tuple within a keyword entry")
        if self.unmapped_count < 0:
            raise MalformedSnapshot("unmapped_count must be non-negative")
        # Canonical pair order so equal entries serialize identically.
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))


@dataclass(frozen=True)
class LibrarySnapshot:
    format_version: int
    fetched_at: datetime
    entries: Mapping[str, KeywordEntry]
    source_note: str = ""

    def __post_init__(self) -> None:
        if self.format_version not in SUPPORTED_VERSIONS:
            raise UnsupportedVersion(self.format_version)


@dataclass(frozen=True)
class UpdateReport:
    """What an update run touched and what it could not."""

    refreshed: tuple[str, ...]
    failures: tuple[tuple[str, str], ...]  # (keyword, reason)


def _to_document(snapshot: LibrarySnapshot) -> dict:
    return {
        "format_version": snapshot.format_version,
        "fetched_at": snapshot.fetched_at.isoformat(),
        "source_note": snapshot.source_note,
        "entries": {
            keyword: {
                "pairs": [{"cve": str(p.cve), "cwe": str(p.cwe)} for p in entry.pairs],
                "unmapped_count": entry.unmapped_count,
            }
            for keyword, entry in snapshot.entries.items()
        },
    }


def dumps_snapshot(snapshot: LibrarySnapshot) -> str:
    """Canonical serialization: sorted keys, stable pair order, byte-deterministic."""
    return json.dumps(_to_document(snapshot), sort_keys=True, indent=2) + "\n"


def save_snapshot(snapshot: LibrarySnapshot, destination: str | Path) -> None:
    """Write canonically, via a temp file and rename so readers never see a torn file."""
    destination = Path(destination)
    data = dumps_snapshot(snapshot)
    try:
        fd, tmp = tempfile.mkstemp(dir=destination.parent or Path("."), suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(data)
            os.replace(tmp, destination)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def loads_snapshot(text: str) -> LibrarySnapshot:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedSnapshot(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedSnapshot("snapshot document must be a JSON object")
    version = doc.get("format_version")
    if version not in SUPPORTED_VERSIONS:
        raise UnsupportedVersion(version)
    try:
        fetched_at = datetime.fromisoformat(doc["fetched_at"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSnapshot(f"bad fetched_at: {exc}") from exc
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, dict):
        raise MalformedSnapshot("entries must be an object keyed by keyword")
    entries: dict[str, KeywordEntry] = {}
    for keyword, raw in raw_entries.items():
        try:
            pairs = tuple(
                CveCwePair(parse_cve_id(p["cve"]), parse_cwe_id(p["cwe"]))
                for p in raw["pairs"]
            )
            entries[keyword] = KeywordEntry(pairs, int(raw["unmapped_count"]))
        except MalformedSnapshot:
            raise
        except (KeyError, TypeError, MalformedIdentifier) as exc:
            raise MalformedSnapshot(f"entry {keyword!r}: {exc}") from exc
    return LibrarySnapshot(
        format_version=version,
        fetched_at=fetched_at,
        entries=entries,
        source_note=doc.get("source_note", ""),
    )


def load_snapshot(source: str | Path) -> LibrarySnapshot:
    """Load and revalidate every invariant; duplicates and bad ids are rejected."""
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return loads_snapshot(text)


def update_library(
    current: LibrarySnapshot,
    keywords: Iterable[str],
    client: SourceClient,
    now: datetime | None = None,
) -> tuple[LibrarySnapshot, UpdateReport]:
    """Refresh the given keywords wholesale; untouched keywords are preserved.

    A per-keyword failure leaves that keyword's old entry intact and is
    reported rather than raised; the input snapshot is never mutated.
    """
    entries = dict(current.entries)
    refreshed: list[str] = []
    failures: list[tuple[str, str]] = []
    for keyword in keywords:
        try:
            pairs, unmapped = client.fetch_pairs_for_keyword(keyword)
        except PartialFetch as exc:
            failures.append((keyword, str(exc.cause)))
            continue
        # Feeds can repeat a pair across pages; the entry stores each once.
        entries[keyword] = KeywordEntry(tuple(dict.fromkeys(pairs)), unmapped)
        refreshed.append(keyword)
    snapshot = LibrarySnapshot(
        format_version=current.format_version,
        fetched_at=now or datetime.now(timezone.utc),
        entries=entries,
        source_note=current.source_note,
    )
    return snapshot, UpdateReport(tuple(refreshed), tuple(failures))
