"""Methodology core: pairs in, ranked threat lists out.

Threat identification is pure aggregation: group the component's CVE-CWE
pairs by weakness, count distinct CVEs per weakness, drop duplicates,
rank by occurrence. No severity weighting, no weakness grouping, no risk
scoring; prioritization is frequency and nothing else.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Mapping, Union

from .library import LibrarySnapshot
from .model import (
    CveCwePair,
    CveId,
    CweId,
    MalformedIdentifier,
    Scope,
    ThreatEntry,
    ThreatList,
    parse_cwe_id,
    threat_sort_key,
)


class InconsistentCounts(ValueError):
    """total_cve_count is below the number of distinct CVEs observed in pairs."""


@dataclass(frozen=True)
class MissingData:
    """A component whose keywords the snapshot does not cover."""

    component_id: str
    missing_keywords: tuple[str, ...]


AnalysisResult = Union[ThreatList, MissingData]


class MitigationCatalog:
    """Read-only CWE id → (title, mitigation texts) lookup."""

    def __init__(self, entries: Mapping[CweId, tuple[str, tuple[str, ...]]]):
        self._entries = dict(entries)

    def title(self, cwe: CweId) -> str:
        entry = self._entries.get(cwe)
        # Unknown weaknesses fall back to their bare identifier.
        return entry[0] if entry else str(cwe)

    def mitigations(self, cwe: CweId) -> tuple[str, ...]:
        entry = self._entries.get(cwe)
        return entry[1] if entry else ()

    def __contains__(self, cwe: CweId) -> bool:
        return cwe in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    @classmethod
    def from_json(cls, text: str) -> "MitigationCatalog":
        doc = json.loads(text)
        entries: dict[CweId, tuple[str, tuple[str, ...]]] = {}
        for key, value in doc.items():
            cwe = parse_cwe_id(key)
            if not isinstance(cwe, CweId):
                raise MalformedIdentifier(f"catalog key is not a CWE id: {key!r}")
            title = value["title"]
            if not title:
                raise ValueError(f"{key}: empty title")
            entries[cwe] = (title, tuple(value.get("mitigations", ())))
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path) -> "MitigationCatalog":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def bundled_catalog() -> MitigationCatalog:
    """The static catalog shipped with the package."""
    text = resources.files("threatsmith.data").joinpath("mitigations.json").read_text("utf-8")
    return MitigationCatalog.from_json(text)


def bundled_snapshot_path() -> Path:
    """Path of the frozen case-study snapshot shipped with the package."""
    return Path(str(resources.files("threatsmith.data").joinpath("snapshot.json")))


def identify_threats(
    pairs: list[CveCwePair],
    total_cve_count: int,
    unmapped_cve_count: int,
    catalog: MitigationCatalog,
    component_id: str = "",
    snapshot_stamp: datetime | None = None,
) -> ThreatList:
    """De-duplicate weaknesses and count distinct supporting CVEs per weakness.

    A CVE listing the same CWE twice is feed noise and counts once; the
    occurrence count is always the number of distinct CVEs, never the
    number of raw pairs.
    """
    by_cwe: dict[CweId, set[CveId]] = {}
    all_cves: set[CveId] = set()
    for pair in pairs:
        by_cwe.setdefault(pair.cwe, set()).add(pair.cve)
        all_cves.add(pair.cve)
    if total_cve_count < len(all_cves):
        raise InconsistentCounts(
            f"total_cve_count {total_cve_count} < {len(all_cves)} distinct CVEs in pairs"
        )
    entries = [
        ThreatEntry(
            cwe=cwe,
            title=catalog.title(cwe),
            occurrence_count=len(cves),
            supporting_cves=frozenset(cves),
            mitigation_refs=catalog.mitigations(cwe),
        )
        for cwe, cves in by_cwe.items()
    ]
    entries.sort(key=threat_sort_key)
    return ThreatList(
        component_id=component_id,
        entries=tuple(entries),
        total_cve_count=total_cve_count,
        unmapped_cve_count=unmapped_cve_count,
        snapshot_stamp=snapshot_stamp or datetime.fromtimestamp(0, tz=timezone.utc),
    )


def top_k(threat_list: ThreatList, k: int) -> tuple[ThreatEntry, ...]:
    """The first min(k, n) entries. The list is already totally ordered; never re-sorts."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return threat_list.entries[:k]


def occurrence_percentage(entry: ThreatEntry, total_cve_count: int) -> int:
    """Integer percent of the component's CVEs supporting this weakness.

    Rounded to nearest, half away from zero (so 8.5 -> 9, matching how the
    reported shares are presented).
    """
    if total_cve_count <= 0:
        raise ZeroDivisionError("total_cve_count must be positive")
    if entry.occurrence_count > total_cve_count:
        raise InconsistentCounts("entry count exceeds total")
    scaled = 100 * entry.occurrence_count
    # Half away from zero; counts are non-negative so this is ceiling at .5.
    return (2 * scaled + total_cve_count) // (2 * total_cve_count)


def analyze_scope(
    scope: Scope,
    snapshot: LibrarySnapshot,
    catalog: MitigationCatalog,
) -> dict[str, AnalysisResult]:
    """Run threat identification for each component independently.

    Pure function of its inputs. Pairs from a component's multiple
    keywords are unioned with CVE-level dedup before counting; a keyword
    absent from the snapshot yields a MissingData marker for that
    component without aborting the others.
    """
    results: dict[str, AnalysisResult] = {}
    for component in scope.components:
        missing = tuple(k for k in component.keywords if k not in snapshot.entries)
        if missing:
            results[component.id] = MissingData(component.id, missing)
            continue
        merged: set[CveCwePair] = set()
        unmapped = 0
        for keyword in component.keywords:
            entry = snapshot.entries[keyword]
            merged.update(entry.pairs)
            unmapped += entry.unmapped_count
        total = len({p.cve for p in merged}) + unmapped
        results[component.id] = identify_threats(
            sorted(merged),
            total_cve_count=total,
            unmapped_cve_count=unmapped,
            catalog=catalog,
            component_id=component.id,
            snapshot_stamp=snapshot.fetched_at,
        )
    return results
