"""Shared fixtures: fake clock, fixture-backed mock vulnerability source,
and the case-study scope.

No test in this suite ever contacts a live service; every client runs
against recorded or constructed responses.
"""
from __future__ import annotations

import math
from collections import defaultdict

import pytest

from threatsmith.analysis import MitigationCatalog, bundled_catalog, bundled_snapshot_path
from threatsmith.library import LibrarySnapshot, load_snapshot
from threatsmith.model import (
    DEFAULT_KEYWORDS,
    Component,
    ComponentKind,
    Scope,
    UnmappedWeakness,
)
from threatsmith.sources import NetworkFailure, SourceClient, SourceConfig

SEARCH_URL = "mock://search"
DETAIL_URL = "mock://detail"


class FakeClock:
    """Monotonic clock advanced by sleeping; keeps rate-limit waits instant."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.now += max(seconds, 0.0)


class FakeSource:
    """In-memory stand-in for both vulnerability services.

    `corpus` maps keyword -> {cve_text: [weakness strings]}. Failures can
    be scripted per (url, match) prefix as a queue of statuses or
    NetworkFailure instances consumed before real responses.
    """

    def __init__(self, corpus: dict[str, dict[str, list[str]]], page_size: int = 50):
        self.corpus = corpus
        self.page_size = page_size
        self.calls: list[tuple[str, dict]] = []
        self.scripted: dict[str, list] = defaultdict(list)
        self.detail_index = {
            cve: weaknesses
            for per_kw in corpus.values()
            for cve, weaknesses in per_kw.items()
        }

    def script_failure(self, key: str, outcome) -> None:
        """Queue a failure for requests whose keyword/cveId equals `key`."""
        self.scripted[key].append(outcome)

    def _pop_scripted(self, key: str):
        queue = self.scripted.get(key)
        return queue.pop(0) if queue else None

    def get(self, url: str, params: dict, headers: dict) -> tuple[int, dict]:
        self.calls.append((url, dict(params)))
        if url == SEARCH_URL:
            keyword = params["keyword"]
            outcome = self._pop_scripted(keyword)
            if outcome is not None:
                if isinstance(outcome, Exception):
                    raise outcome
                return outcome, {}
            ids = sorted(self.corpus.get(keyword, {}))
            start = params.get("startIndex", 0)
            page = ids[start : start + min(self.page_size, params.get("resultsPerPage", 50))]
            return 200, {"totalResults": len(ids), "items": page}
        if url == DETAIL_URL:
            cve_id = params["cveId"]
            outcome = self._pop_scripted(cve_id)
            if outcome is not None:
                if isinstance(outcome, Exception):
                    raise outcome
                return outcome, {}
            if cve_id not in self.detail_index:
                return 404, {}
            return 200, {
                "description": f"fixture record for {cve_id}",
                "weaknesses": self.detail_index[cve_id],
                "published": "2020-01-01T00:00:00+00:00",
            }
        raise AssertionError(f"unexpected url {url}")


def make_client(source: FakeSource, api_key: str | None = None, **overrides) -> SourceClient:
    clock = FakeClock()
    config = SourceConfig(
        search_endpoint=SEARCH_URL,
        detail_endpoint=DETAIL_URL,
        api_key=api_key,
        transport=source,
        clock=clock,
        sleep=clock.sleep,
        **overrides,
    )
    return SourceClient(config)


def snapshot_as_corpus(snapshot: LibrarySnapshot) -> dict[str, dict[str, list[str]]]:
    """Rebuild a mock source corpus whose fetch output equals the snapshot."""
    corpus: dict[str, dict[str, list[str]]] = {}
    for keyword, entry in snapshot.entries.items():
        per_cve: dict[str, list[str]] = defaultdict(list)
        for pair in entry.pairs:
            per_cve[str(pair.cve)].append(str(pair.cwe))
        # Unmapped CVEs get sentinel-only records with synthetic ids.
        for i in range(entry.unmapped_count):
            per_cve[f"CVE-2099-{90000 + i}"] = ["NVD-CWE-noinfo"]
        corpus[keyword] = dict(per_cve)
    return corpus


def builtin_component(kind_name: str, cid: str | None = None) -> Component:
    return Component(
        id=cid or kind_name.lower(),
        kind=ComponentKind.builtin(kind_name),
        label=kind_name,
        keywords=DEFAULT_KEYWORDS[kind_name],
    )


@pytest.fixture(scope="session")
def fixture_snapshot() -> LibrarySnapshot:
    return load_snapshot(bundled_snapshot_path())


@pytest.fixture(scope="session")
def catalog() -> MitigationCatalog:
    return bundled_catalog()


@pytest.fixture()
def case_study_scope() -> Scope:
    """The five-component SCADA network from the case study."""
    return Scope(
        name="case-study",
        components=tuple(
            builtin_component(k) for k in ("PLC", "RTU", "SCADA", "Sensor", "Actuator")
        ),
    )


@pytest.fixture()
def transient_failure() -> NetworkFailure:
    return NetworkFailure("connection reset")
