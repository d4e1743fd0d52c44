"""Rolling-window rate limiter shared by all outbound source requests.

The window is rolling, not bucketed: at most `max_requests` permits are
granted in any half-open interval of length `window_seconds`, regardless
of where the interval starts. The limiter is clock-agnostic; callers pass
a monotonic `now`, which keeps the property tests deterministic and fast.
"""
from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Union

from .model import RateLimitPolicy


@dataclass(frozen=True)
class Permit:
    granted_at: float


@dataclass(frozen=True)
class Wait:
    """Minimal duration after which a grant becomes possible."""

    seconds: float


class RollingWindowLimiter:
    """Tracks grant instants in a deque; thread-safe for concurrent callers."""

    def __init__(self, policy: RateLimitPolicy):
        self.policy = policy
        self._grants: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self, now: float) -> Union[Permit, Wait]:
        """Grant immediately if the window has room, else report the exact wait.

        The wait is minimal: granting exactly at now + wait never violates
        the bound, and granting any earlier would.
        """
        with self._lock:
            self._evict(now)
            if len(self._grants) < self.policy.max_requests:
                self._grants.append(now)
                return Permit(granted_at=now)
            # Window is full; room opens when the oldest grant ages out.
            oldest = self._grants[0]
            return Wait(seconds=oldest + self.policy.window_seconds - now)

    def acquire_blocking(
        self,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> Permit:
        """Loop acquire/sleep until a permit is granted."""
        while True:
            outcome = self.acquire(clock())
            if isinstance(outcome, Permit):
                return outcome
            sleep(max(outcome.seconds, 0.0))

    def _evict(self, now: float) -> None:
        # Half-open window: a grant exactly W old has left it. The condition
        # uses the same float expression as the wait computation so a
        # reported wait is always strictly positive.
        window = self.policy.window_seconds
        while self._grants and self._grants[0] + window <= now:
            self._grants.popleft()
