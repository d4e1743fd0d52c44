"""Report rendering: canonical JSON, markdown tables, and chart-ready data.

Charts are emitted as data (labels, counts, precomputed percents), never
as images; pixel rendering belongs to the web client. Everything here is
deterministic: the same results render to the same bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping

from .analysis import AnalysisResult, MissingData, occurrence_percentage, top_k
from .model import Scope, ThreatList

TOP_SLICES = 5

MISSING_MARKER = "(no data)"


class UnsupportedFormat(ValueError):
    pass


@dataclass(frozen=True)
class ChartSlice:
    label: str
    count: int
    percent: int


@dataclass(frozen=True)
class ChartData:
    """Pie-chart input: top-5 slices in rank order plus an aggregate remainder."""

    component_label: str
    slices: tuple[ChartSlice, ...]
    other_count: int

    def __post_init__(self) -> None:
        if len(self.slices) > TOP_SLICES:
            raise ValueError(f"at most {TOP_SLICES} slices")


def chart_data(threat_list: ThreatList, component_label: str) -> ChartData:
    top = top_k(threat_list, TOP_SLICES) if threat_list.entries else ()
    slices = tuple(
        ChartSlice(
            label=str(e.cwe),
            count=e.occurrence_count,
            percent=occurrence_percentage(e, threat_list.total_cve_count),
        )
        for e in top
    )
    other = sum(e.occurrence_count for e in threat_list.entries[len(top):])
    return ChartData(component_label=component_label, slices=slices, other_count=other)


def summary_table(
    results: Mapping[str, AnalysisResult], scope: Scope
) -> list[tuple[str, str]]:
    """(component label, threat count) rows in scope order; missing data is marked."""
    rows: list[tuple[str, str]] = []
    for component in scope.components:
        result = results.get(component.id)
        if result is None or isinstance(result, MissingData):
            rows.append((component.label, MISSING_MARKER))
        else:
            rows.append((component.label, str(len(result.entries))))
    return rows


def _component_document(component, result: AnalysisResult) -> dict:
    base = {"label": component.label, "kind": component.kind.name}
    if isinstance(result, MissingData):
        base["missing_data"] = {"keywords": list(result.missing_keywords)}
        return base
    total = result.total_cve_count

    def entry_doc(e):
        return {
            "cwe": str(e.cwe),
            "title": e.title,
            "count": e.occurrence_count,
            "percent": occurrence_percentage(e, total) if total else 0,
            "cves": sorted(str(c) for c in e.supporting_cves),
            "mitigations": list(e.mitigation_refs),
        }

    chart = chart_data(result, component.label)
    base.update(
        {
            "total_cves": total,
            "unmapped_cves": result.unmapped_cve_count,
            "threats": [entry_doc(e) for e in result.entries],
            "top5": [entry_doc(e) for e in top_k(result, TOP_SLICES)] if result.entries else [],
            "chart": {
                "component_label": chart.component_label,
                "slices": [
                    {"label": s.label, "count": s.count, "percent": s.percent}
                    for s in chart.slices
                ],
                "other_count": chart.other_count,
            },
        }
    )
    return base


def report_document(
    results: Mapping[str, AnalysisResult],
    scope: Scope,
    generated_at: datetime | None = None,
) -> dict:
    """The JSON report structure; components appear in scope order."""
    stamps = [
        r.snapshot_stamp for r in results.values() if isinstance(r, ThreatList)
    ]
    return {
        "scope": scope.name,
        "generated_at": (generated_at or datetime.now(timezone.utc)).isoformat(),
        "snapshot_stamp": stamps[0].isoformat() if stamps else None,
        "components": [
            _component_document(c, results[c.id])
            for c in scope.components
            if c.id in results
        ],
    }


def _markdown_component(doc: dict) -> list[str]:
    lines = [f"## {doc['label']} ({doc['kind']})", ""]
    if "missing_data" in doc:
        missing = ", ".join(doc["missing_data"]["keywords"])
        lines += [f"No snapshot data for keyword(s): {missing} {MISSING_MARKER}", ""]
        return lines
    lines += [
        f"{len(doc['threats'])} threats from {doc['total_cves']} CVE entries "
        f"({doc['unmapped_cves']} with no mapped weakness).",
        "",
        "### Top 5 threats",
        "",
        "| CWE | Title | CVEs | Share |",
        "|-----|-------|------|-------|",
    ]
    for t in doc["top5"]:
        lines.append(f"| {t['cwe']} | {t['title']} | {t['count']} | {t['percent']}% |")
    lines += [
        "",
        "### All threats",
        "",
        "| CWE | Title | CVEs | Share | Supporting CVEs |",
        "|-----|-------|------|-------|-----------------|",
    ]
    for t in doc["threats"]:
        lines.append(
            f"| {t['cwe']} | {t['title']} | {t['count']} | {t['percent']}% | {len(t['cves'])} |"
        )
    lines.append("")
    mitigated = [t for t in doc["threats"] if t["mitigations"]]
    if mitigated:
        lines += ["### Mitigations", ""]
        for t in mitigated:
            lines.append(f"- **{t['cwe']}** ({t['title']}):")
            for m in t["mitigations"]:
                lines.append(f"  - {m}")
        lines.append("")
    return lines


def render_report(
    results: Mapping[str, AnalysisResult],
    scope: Scope,
    format: str,
    generated_at: datetime | None = None,
) -> bytes:
    """Render to canonical JSON or markdown; anything else is UnsupportedFormat."""
    doc = report_document(results, scope, generated_at=generated_at)
    if format == "json":
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if format == "markdown":
        lines = [f"# Threat model: {doc['scope']}", ""]
        lines += [
            f"Generated {doc['generated_at']}; snapshot {doc['snapshot_stamp']}.",
            "",
            "| Component | Threats |",
            "|-----------|---------|",
        ]
        for comp in doc["components"]:
            count = MISSING_MARKER if "missing_data" in comp else str(len(comp["threats"]))
            lines.append(f"| {comp['label']} | {count} |")
        lines.append("")
        for comp in doc["components"]:
            lines += _markdown_component(comp)
        return "\n".join(lines).encode("utf-8")
    raise UnsupportedFormat(format)
