"""Per-host request spacing shared by every worker of a crawl."""

from __future__ import annotations

import threading
import time
from contextlib import contextmanager
from typing import Callable, Iterator, Optional


class HostGate:
    """Grants request slots so that grants for one host are >= min_delay apart.

    Hosts are independent of each other. ``acquire_slot`` is the pure
    bookkeeping; ``wait`` and ``slot`` block on a real clock.
    """

    def __init__(
        self,
        min_delay: float = 0.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.min_delay = min_delay
        self.last_grant: dict[str, float] = {}
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._host_locks: dict[str, threading.Lock] = {}

    def acquire_slot(self, host: str, now: float) -> float:
        """Reserve the next slot for ``host``; returns how long to wait."""
        with self._lock:
            last: Optional[float] = self.last_grant.get(host)
            grant = now if last is None else max(now, last + self.min_delay)
            self.last_grant[host] = grant
        return grant - now

    def _host_lock(self, host: str) -> threading.Lock:
        with self._lock:
            return self._host_locks.setdefault(host, threading.Lock())

    def _stamp(self, host: str) -> None:
        with self._lock:
            self.last_grant[host] = max(self.last_grant[host], self._clock())

    def _sleep_for_slot(self, host: str) -> float:
        delay = self.acquire_slot(host, self._clock())
        if delay > 0:
            self._sleep(delay)
        # re-stamp with the actual wake-up time: oversleeping never shortens the next gap
        self._stamp(host)
        return delay

    def wait(self, host: str) -> float:
        """Block until a request to ``host`` may start. Returns the time slept."""
        if self.min_delay <= 0:
            return 0.0
        with self._host_lock(host):
            return self._sleep_for_slot(host)

    @contextmanager
    def slot(self, host: str) -> Iterator[float]:
        """Hold ``host`` for the duration of one request.

        The grant is re-stamped when the block exits, i.e. once the response
        is in. The next request to the host therefore starts at least
        ``min_delay`` after the host saw this one, whatever the scheduling
        delay between waking up and the bytes reaching the wire.
        """
        if self.min_delay <= 0:
            yield 0.0
            return
        with self._host_lock(host):
            delay = self._sleep_for_slot(host)
            try:
                yield delay
            finally:
                self._stamp(host)


def acquire_slot(gate: HostGate, host: str, now: float) -> float:
    return gate.acquire_slot(host, now)
