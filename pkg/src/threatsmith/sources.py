"""Clients for the two external vulnerability services.

The search service answers keyword queries with paginated CVE id lists;
the detail service returns per-CVE weakness data. The search side never
carries CWE information, which is why every retrieval is the two-step
composition in fetch_pairs_for_keyword.

All requests go through a shared rolling-window limiter. Transport is
injected so tests replay recorded fixtures; nothing in the test suite
contacts live services.
"""
from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Optional, Protocol

import requests

from .model import (
    KEYED_POLICY,
    KEYLESS_POLICY,
    CveCwePair,
    CveId,
    CveRecord,
    MalformedIdentifier,
    RateLimitPolicy,
    UnmappedWeakness,
    parse_cve_id,
    parse_cwe_id,
)
from .ratelimit import Permit, RollingWindowLimiter

API_KEY_ENV = "THREATSMITH_API_KEY"

PAGE_SIZE = 200

# HTTP statuses treated as transient and retried.
TRANSIENT_STATUSES = frozenset({429, 500, 502, 503, 504})


class NetworkFailure(Exception):
    """Transient transport problem; retried, then surfaced."""


class SourceRejection(Exception):
    """Non-retryable status from the source."""

    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"source rejected request with status {status}: {detail}")
        self.status = status


class NotFound(SourceRejection):
    def __init__(self, detail: str = ""):
        super().__init__(404, detail)


class EmptyKeyword(ValueError):
    """Keyword is empty after trimming."""


class PartialFetch(Exception):
    """A multi-request fetch failed partway; carries the progress made."""

    def __init__(self, cause: Exception, pairs: list[CveCwePair], unmapped: int):
        super().__init__(f"fetch failed after partial progress: {cause}")
        self.cause = cause
        self.pairs = pairs
        self.unmapped = unmapped


class Transport(Protocol):
    """Minimal GET abstraction; real and fixture transports implement it."""

    def get(self, url: str, params: dict, headers: dict) -> tuple[int, dict]:
        """Return (status_code, parsed JSON body). Raise NetworkFailure on I/O error."""
        ...


class HttpTransport:
    def __init__(self, timeout: float = 30.0):
        self.timeout = timeout
        self._session = requests.Session()

    def get(self, url: str, params: dict, headers: dict) -> tuple[int, dict]:
        try:
            resp = self._session.get(url, params=params, headers=headers, timeout=self.timeout)
        except requests.RequestException as exc:
            raise NetworkFailure(str(exc)) from exc
        try:
            body = resp.json() if resp.content else {}
        except ValueError:
            body = {}
        return resp.status_code, body


@dataclass
class SourceConfig:
    """Endpoints, credentials, rate policy, and retry knobs for both services."""

    search_endpoint: str
    detail_endpoint: str
    api_key: Optional[str] = None
    policy: RateLimitPolicy = None  # type: ignore[assignment]
    retry_max: int = 4
    backoff_base: float = 1.0
    transport: Transport = field(default_factory=HttpTransport)
    sleep: Callable[[float], None] = time.sleep
    clock: Callable[[], float] = time.monotonic
    rng: random.Random = field(default_factory=random.Random)

    def __post_init__(self) -> None:
        if self.policy is None:
            # Keyed preset iff a key is present.
            self.policy = KEYED_POLICY if self.api_key else KEYLESS_POLICY

    @classmethod
    def from_env(cls, search_endpoint: str, detail_endpoint: str, **kwargs) -> "SourceConfig":
        """Read the API key from the environment; never from flags or files."""
        return cls(
            search_endpoint=search_endpoint,
            detail_endpoint=detail_endpoint,
            api_key=os.environ.get(API_KEY_ENV) or None,
            **kwargs,
        )


class SourceClient:
    """Shared-limiter client for both services."""

    def __init__(self, config: SourceConfig, limiter: Optional[RollingWindowLimiter] = None):
        self.config = config
        self.limiter = limiter or RollingWindowLimiter(config.policy)

    # -- low-level request machinery ------------------------------------

    def _headers(self) -> dict:
        return {"apiKey": self.config.api_key} if self.config.api_key else {}

    def _request(self, url: str, params: dict) -> dict:
        """One rate-limited GET with capped exponential backoff and jitter."""
        cfg = self.config
        attempts = 0
        while True:
            permit = self.limiter.acquire(cfg.clock())
            if not isinstance(permit, Permit):
                cfg.sleep(max(permit.seconds, 0.0))
                continue
            attempts += 1
            try:
                status, body = cfg.transport.get(url, params, self._headers())
            except NetworkFailure:
                if attempts > cfg.retry_max:
                    raise
                self._backoff(attempts)
                continue
            if status == 200:
                return body
            if status == 404:
                raise NotFound(url)
            if status in TRANSIENT_STATUSES:
                if attempts > cfg.retry_max:
                    raise NetworkFailure(f"gave up after {attempts} attempts (status {status})")
                self._backoff(attempts)
                continue
            raise SourceRejection(status)

    def _backoff(self, attempt: int) -> None:
        cfg = self.config
        delay = cfg.backoff_base * (2 ** (attempt - 1))
        cfg.sleep(delay * (0.5 + cfg.rng.random() / 2))

    # -- operations ------------------------------------------------------

    def search_cves(self, keyword: str) -> list[CveId]:
        """All CVE ids matching a keyword: paginated, de-duplicated, sorted."""
        keyword = keyword.strip()
        if not keyword:
            raise EmptyKeyword("search keyword is empty")
        seen: set[CveId] = set()
        start = 0
        while True:
            body = self._request(
                self.config.search_endpoint,
                {"keyword": keyword, "startIndex": start, "resultsPerPage": PAGE_SIZE},
            )
            items = body.get("items", [])
            for raw in items:
                seen.add(parse_cve_id(raw))
            total = int(body.get("totalResults", len(items)))
            start += len(items)
            if start >= total or not items:
                break
        return sorted(seen)

    def fetch_cve_detail(self, cve_id: CveId) -> CveRecord:
        """Per-CVE weakness lookup; sentinel weaknesses preserved as unmapped."""
        body = self._request(self.config.detail_endpoint, {"cveId": str(cve_id)})
        weaknesses = []
        for raw in body.get("weaknesses", []):
            try:
                weaknesses.append(parse_cwe_id(raw))
            except MalformedIdentifier:
                # Treat unparseable feed noise like an explicit sentinel.
                weaknesses.append(UnmappedWeakness())
        # Collapse duplicates, preserving first-seen order.
        deduped = tuple(dict.fromkeys(weaknesses))
        published = body.get("published")
        return CveRecord(
            id=cve_id,
            description=body.get("description", ""),
            weakness_ids=deduped,
            published=(
                datetime.fromisoformat(published)
                if published
                else datetime.now(timezone.utc)
            ),
            severity=body.get("severity"),
        )

    def fetch_pairs_for_keyword(self, keyword: str) -> tuple[list[CveCwePair], int]:
        """search → detail composition: (pairs, count of CVEs with no mapped CWE).

        A CVE with k distinct mapped CWEs contributes k pairs; a CVE whose
        weaknesses are all sentinels contributes none and bumps the
        unmapped count. On error mid-run, the progress made so far rides
        along in PartialFetch so an update can resume.
        """
        pairs: list[CveCwePair] = []
        unmapped = 0
        try:
            ids = self.search_cves(keyword)
            for cve_id in ids:
                record = self.fetch_cve_detail(cve_id)
                derived = CveCwePair.from_record(record)
                if derived:
                    pairs.extend(derived)
                else:
                    unmapped += 1
        except (NetworkFailure, SourceRejection) as exc:
            raise PartialFetch(exc, pairs, unmapped) from exc
        return pairs, unmapped
