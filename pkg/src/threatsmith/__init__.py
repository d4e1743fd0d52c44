"""Evidence-based ICS threat modeling from historical CVE-CWE pairs."""

from .model import (
    BUILTIN_KINDS,
    Component,
    ComponentKind,
    CveCwePair,
    CveId,
    CveRecord,
    CweId,
    RateLimitPolicy,
    Scope,
    ThreatEntry,
    ThreatList,
    UnmappedWeakness,
    parse_cve_id,
    parse_cwe_id,
    validate_scope,
)
from .analysis import (
    MitigationCatalog,
    analyze_scope,
    identify_threats,
    occurrence_percentage,
    top_k,
)
from .library import LibrarySnapshot, load_snapshot, save_snapshot, update_library

__all__ = [
    "BUILTIN_KINDS",
    "Component",
    "ComponentKind",
    "CveCwePair",
    "CveId",
    "CveRecord",
    "CweId",
    "LibrarySnapshot",
    "MitigationCatalog",
    "RateLimitPolicy",
    "Scope",
    "ThreatEntry",
    "ThreatList",
    "UnmappedWeakness",
    "analyze_scope",
    "identify_threats",
    "load_snapshot",
    "occurrence_percentage",
    "parse_cve_id",
    "parse_cwe_id",
    "save_snapshot",
    "top_k",
    "update_library",
    "validate_scope",
]

__version__ = "0.1.0"
