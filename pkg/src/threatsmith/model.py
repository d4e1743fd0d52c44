"""Core domain types for evidence-based ICS threat modeling.

Everything here is an immutable value object (frozen dataclasses), safe to
share across threads without locking. Identifier parsing and scope
validation live here too, so every other module agrees on what a valid
CVE id, CWE id, component, or scope looks like.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional, Union


class MalformedIdentifier(ValueError):
    """Raised when text is neither a canonical identifier nor a known sentinel."""


class ScopeViolation:
    """Not an exception: scope validation reports violations as data."""

    __slots__ = ("message",)

    def __init__(self, message: str):
        self.message = message

    def __repr__(self) -> str:
        return f"ScopeViolation({self.message!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScopeViolation) and other.message == self.message

    def __hash__(self) -> int:
        return hash(self.message)


# Sentinel strings the NVD feed uses when a record carries no mappable
# weakness. Confirmed against captured live responses (weakness
# descriptions of the form "NVD-CWE-noinfo" / "NVD-CWE-Other").
UNMAPPED_SENTINELS = frozenset({"nvd-cwe-noinfo", "nvd-cwe-other", "noinfo", "other"})


@dataclass(frozen=True, order=True)
class CweId:
    """A weakness identifier, e.g. CWE-119."""

    number: int

    def __post_init__(self) -> None:
        if self.number <= 0:
            raise MalformedIdentifier(f"CWE number must be positive, got {self.number}")

    def __str__(self) -> str:
        return f"CWE-{self.number}"


@dataclass(frozen=True)
class UnmappedWeakness:
    """A weakness slot the feed could not map to any CWE entry."""

    def __str__(self) -> str:
        return "unmapped"


Weakness = Union[CweId, UnmappedWeakness]

_CWE_RE = re.compile(r"^CWE-([1-9][0-9]*)$")
_CVE_RE = re.compile(r"^CVE-([0-9]{4})-([0-9]{4,})$")


def parse_cwe_id(text: str) -> Weakness:
    """Parse "CWE-<n>" into a CweId; NVD no-mapping sentinels become UnmappedWeakness.

    Raises MalformedIdentifier for anything else (including leading zeros
    and the bare prefix "CWE-").
    """
    stripped = text.strip()
    if stripped.lower() in UNMAPPED_SENTINELS:
        return UnmappedWeakness()
    m = _CWE_RE.match(stripped)
    if not m:
        raise MalformedIdentifier(f"not a CWE identifier: {text!r}")
    return CweId(int(m.group(1)))


@dataclass(frozen=True, order=True)
class CveId:
    """A vulnerability identifier, e.g. CVE-2021-22681.

    Ordering is (year, sequence), which matches the canonical text order
    for equal-width sequences and is what result sorting relies on.
    """

    year: int
    sequence: int
    # Sequences are zero-padded to at least 4 digits; wider sequences keep
    # their width so parse/render round-trips exactly.
    seq_width: int = 4

    def __post_init__(self) -> None:
        if not (1000 <= self.year <= 9999):
            raise MalformedIdentifier(f"CVE year must have 4 digits, got {self.year}")
        if self.sequence < 0:
            raise MalformedIdentifier("CVE sequence must be non-negative")
        if self.seq_width < 4 or len(str(self.sequence)) > self.seq_width:
            raise MalformedIdentifier("CVE sequence width invalid")

    def __str__(self) -> str:
        return f"CVE-{self.year}-{self.sequence:0{self.seq_width}d}"


def parse_cve_id(text: str) -> CveId:
    """Parse canonical "CVE-YYYY-NNNN..." text; round-trips through str()."""
    m = _CVE_RE.match(text.strip())
    if not m:
        raise MalformedIdentifier(f"not a CVE identifier: {text!r}")
    year, seq = m.group(1), m.group(2)
    return CveId(int(year), int(seq), seq_width=len(seq))


@dataclass(frozen=True)
class CveRecord:
    """One historical vulnerability as retrieved from the detail source."""

    id: CveId
    description: str
    weakness_ids: tuple[Weakness, ...]
    published: datetime
    severity: Optional[float] = None  # CVSS base score, informational only

    def __post_init__(self) -> None:
        if len(set(self.weakness_ids)) != len(self.weakness_ids):
            raise ValueError(f"{self.id}: duplicate weakness ids")
        if self.severity is not None and not (0.0 <= self.severity <= 10.0):
            raise ValueError(f"{self.id}: severity {self.severity} outside [0, 10]")

    @property
    def mapped_cwes(self) -> tuple[CweId, ...]:
        return tuple(w for w in self.weakness_ids if isinstance(w, CweId))


@dataclass(frozen=True, order=True)
class CveCwePair:
    """The atomic evidence unit: one vulnerability linked to one weakness.

    Pairs are only ever derived from a CveRecord whose weakness list
    contains the CWE; they are never synthesized.
    """

    cve: CveId
    cwe: CweId

    @classmethod
    def from_record(cls, record: CveRecord) -> list["CveCwePair"]:
        return [cls(record.id, cwe) for cwe in record.mapped_cwes]


BUILTIN_KINDS = ("PLC", "SCADA", "HMI", "Sensor", "Actuator", "RTU", "IED")

# Default search keyword per built-in kind. The retrieval queries behind the
# bundled snapshot are not dictated by upstream data, so they live here as
# overridable configuration rather than code.
DEFAULT_KEYWORDS: dict[str, tuple[str, ...]] = {
    "PLC": ("PLC",),
    "SCADA": ("SCADA",),
    "HMI": ("HMI",),
    "Sensor": ("sensor",),
    "Actuator": ("actuator",),
    "RTU": ("RTU",),
    "IED": ("IED",),
}


@dataclass(frozen=True)
class ComponentKind:
    """Either one of the seven built-in ICS kinds or a custom entry."""

    name: str
    description: str = ""
    custom: bool = False

    def __post_init__(self) -> None:
        if self.custom:
            if not self.name.strip():
                raise ValueError("custom component name must be non-empty")
        elif self.name not in BUILTIN_KINDS:
            raise UnknownKind(self.name)

    @classmethod
    def builtin(cls, name: str) -> "ComponentKind":
        return cls(name=name)


class UnknownKind(ValueError):
    """Component kind is not one of the built-in names."""


@dataclass(frozen=True)
class Component:
    """A scoped asset: what to call it and which keywords retrieve its CVEs."""

    id: str
    kind: ComponentKind
    label: str
    keywords: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.keywords:
            raise ValueError(f"component {self.id}: keywords must be non-empty")
        if any(not k.strip() for k in self.keywords):
            raise ValueError(f"component {self.id}: blank keyword")


@dataclass(frozen=True)
class Scope:
    """The set of components under analysis."""

    name: str
    components: tuple[Component, ...]
    created: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )


def validate_scope(scope: Scope) -> list[ScopeViolation]:
    """Return every invariant violation, not just the first. Empty list means ok."""
    violations: list[ScopeViolation] = []
    if not scope.components:
        violations.append(ScopeViolation("empty scope: analysis requires at least one component"))
    seen_ids: set[str] = set()
    for comp in scope.components:
        if comp.id in seen_ids:
            violations.append(ScopeViolation(f"duplicate component id: {comp.id}"))
        seen_ids.add(comp.id)
    seen_custom: set[str] = set()
    for comp in scope.components:
        if comp.kind.custom:
            key = comp.kind.name.strip().lower()
            if key in seen_custom:
                violations.append(
                    ScopeViolation(f"duplicate custom name: {comp.kind.name.strip()}")
                )
            seen_custom.add(key)
    return violations


@dataclass(frozen=True)
class ThreatEntry:
    """One de-duplicated weakness with its supporting evidence."""

    cwe: CweId
    title: str
    occurrence_count: int
    supporting_cves: frozenset[CveId]
    mitigation_refs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.occurrence_count != len(self.supporting_cves):
            raise ValueError(
                f"{self.cwe}: occurrence_count {self.occurrence_count} "
                f"!= |supporting_cves| {len(self.supporting_cves)}"
            )
        if self.occurrence_count <= 0:
            raise ValueError(f"{self.cwe}: occurrence_count must be positive")


def threat_sort_key(entry: ThreatEntry) -> tuple[int, int]:
    """Total order: occurrence count descending, then CWE number ascending."""
    return (-entry.occurrence_count, entry.cwe.number)


@dataclass(frozen=True)
class ThreatList:
    """Per-component analysis result."""

    component_id: str
    entries: tuple[ThreatEntry, ...]
    total_cve_count: int
    unmapped_cve_count: int
    snapshot_stamp: datetime

    def __post_init__(self) -> None:
        cwes = [e.cwe for e in self.entries]
        if len(set(cwes)) != len(cwes):
            raise ValueError("ThreatList entries must carry distinct CWE ids")
        if list(self.entries) != sorted(self.entries, key=threat_sort_key):
            raise ValueError("ThreatList entries out of order")
        supported = set()
        for e in self.entries:
            supported |= e.supporting_cves
        if self.total_cve_count < len(supported):
            raise ValueError(
                f"total_cve_count {self.total_cve_count} below "
                f"{len(supported)} distinct supporting CVEs"
            )
        if self.total_cve_count < 0 or self.unmapped_cve_count < 0:
            raise ValueError("counts must be non-negative")


@dataclass(frozen=True)
class RateLimitPolicy:
    """At most max_requests grants in any rolling window of `window_seconds`."""

    max_requests: int
    window_seconds: float

    def __post_init__(self) -> None:
        if self.max_requests <= 0 or self.window_seconds <= 0:
            raise ValueError("rate limit policy fields must be positive")


# NVD public limits: 5 requests / rolling 30 s without a key, 50 with one.
KEYLESS_POLICY = RateLimitPolicy(max_requests=5, window_seconds=30.0)
KEYED_POLICY = RateLimitPolicy(max_requests=50, window_seconds=30.0)
