"""Run several spiders over one crawl without overlap.

Every URL has exactly one owner worker, ``assign(url, n)``. Workers never
share a frontier; discovered links are posted to the owner's inbox and the
owner's visited set does the dedup. A global in-flight counter (incremented
per routed url, decremented when the url is dropped as a duplicate or fully
processed) detects quiescence.

``assign`` uses 64-bit FNV-1a over the UTF-8 rendered URL, so shard
choice is stable across processes and Python versions.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
from dataclasses import dataclass
from typing import Optional

from .parser import ExtractedPage
from .politeness import HostGate, acquire_slot  # noqa: F401  (re-exported)
from .spider import (
    CrawlConfig,
    CrawlError,
    CrawlResult,
    CrawlStats,
    ExternalBudget,
    Mode,
    RobotsCache,
    SeedUnreachable,
    Spider,
    admit,
)
from .store import make_record
from .urls import Frontier, NormalizedUrl, Scope, classify

log = logging.getLogger(__name__)

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

_POLL = 0.02  # seconds an idle worker blocks on its inbox


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV64_PRIME) & _MASK64
    return h


def assign(url: NormalizedUrl | str, n_workers: int) -> int:
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    text = url if isinstance(url, str) else url.render()
    return fnv1a_64(text.encode("utf-8")) % n_workers


class WorkerPanic(CrawlError):
    def __init__(self, worker_id: int, cause: BaseException, partial: CrawlResult):
        super().__init__(f"worker {worker_id} failed: {cause!r}")
        self.worker_id = worker_id
        self.cause = cause
        self.partial = partial


@dataclass
class BenchReport:
    mode: str
    pages_stored: int
    wall_time: float  # seconds
    per_page_mean: float  # seconds, wall_time / pages_stored
    requests_total: int

    @classmethod
    def from_result(cls, mode: str, result: CrawlResult, requests_total: int) -> BenchReport:
        n = result.stats.pages_stored
        wall = result.stats.wall_time
        return cls(mode, n, wall, wall / n if n else 0.0, requests_total)


class _InFlight:
    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()
        self.idle = threading.Event()

    def add(self, n: int = 1) -> None:
        with self._lock:
            self._count += n
            self.idle.clear()

    def done(self) -> None:
        with self._lock:
            self._count -= 1
            if self._count == 0:
                self.idle.set()


class _Run:
    """State shared by all workers of one managed crawl."""

    def __init__(self, config: CrawlConfig):
        self.config = config
        self.scope = config.scope
        self.gate = HostGate(config.min_delay_per_host)
        self.robots = RobotsCache()
        self.budget = ExternalBudget(config.external_page_budget)
        self.inflight = _InFlight()
        self.inboxes: list[queue.SimpleQueue[NormalizedUrl]] = [queue.SimpleQueue() for _ in range(config.workers)]
        self.stop = threading.Event()
        self.failure: Optional[tuple[int, BaseException]] = None
        self._lock = threading.Lock()
        self._stored = 0
        self._seq = 0

    def route(self, url: NormalizedUrl) -> int:
        owner = assign(url, self.config.workers)
        self.inflight.add()
        self.inboxes[owner].put(url)
        return owner

    def reserve_store(self) -> Optional[int]:
        """Global storage sequence number, or None once max_pages is reached."""
        with self._lock:
            if self._stored >= self.config.max_pages:
                return None
            self._stored += 1
            self._seq += 1
            if self._stored >= self.config.max_pages:
                self.stop.set()
            return self._seq

    @property
    def full(self) -> bool:
        with self._lock:
            return self._stored >= self.config.max_pages

    def fail(self, worker_id: int, exc: BaseException) -> None:
        with self._lock:
            if self.failure is None:
                self.failure = (worker_id, exc)
        self.stop.set()


class _Worker(threading.Thread):
    def __init__(self, worker_id: int, run: _Run):
        super().__init__(name=f"spider-{worker_id}", daemon=True)
        self.worker_id = worker_id
        self.run_state = run
        self.frontier = Frontier()
        self.inbox = run.inboxes[worker_id]
        self.spider = Spider(run.config, gate=run.gate, robots=run.robots)
        self.stored: list[tuple[int, int, ExtractedPage]] = []  # (seq, local page number, page)

    @property
    def stats(self) -> CrawlStats:
        return self.spider.stats

    def _accept(self, url: NormalizedUrl, claim_only: bool = False) -> bool:
        r = self.run_state
        accept = self.frontier.mark_visited if claim_only else self.frontier.enqueue
        return admit(url, r.config, r.scope, accept, r.budget, self.stats)

    def _claim_redirect(self, target: NormalizedUrl) -> bool:
        r = self.run_state
        if assign(target, r.config.workers) == self.worker_id:
            return self._accept(target, claim_only=True)
        r.route(target)
        return False

    def _drain(self) -> None:
        while True:
            try:
                url = self.inbox.get_nowait()
            except queue.Empty:
                return
            if not self._accept(url):
                self.run_state.inflight.done()

    def _process(self, url: NormalizedUrl) -> None:
        r = self.run_state
        if r.full:
            return
        page = self.spider.visit(url, self._claim_redirect, is_seed=url == r.config.seed)
        if page is None:
            return
        seq = r.reserve_store()
        if seq is None:
            return
        self.stored.append((seq, len(self.stored) + 1, page))
        for link in page.links:
            if classify(link, r.scope) is Scope.EXTERNAL:
                self.stats.external_links_seen += 1
                if r.config.mode is Mode.EXCLUSIVE:
                    continue
            r.route(link)

    def run(self) -> None:
        r = self.run_state
        try:
            while not r.stop.is_set():
                self._drain()
                url = self.frontier.dequeue()
                if url is None:
                    try:
                        url = self.inbox.get(timeout=_POLL)
                    except queue.Empty:
                        continue
                    if not self._accept(url):
                        r.inflight.done()
                    continue
                try:
                    self._process(url)
                finally:
                    r.inflight.done()
        except BaseException as exc:  # noqa: BLE001 - reported via WorkerPanic
            log.exception("worker %d failed", self.worker_id)
            r.fail(self.worker_id, exc)
        finally:
            self.spider.close()


def run_managed_crawl(config: CrawlConfig) -> CrawlResult:
    """Crawl with ``config.workers`` concurrent spiders sharded by url hash."""
    started = time.perf_counter()
    run = _Run(config)
    workers = [_Worker(i, run) for i in range(config.workers)]
    run.route(config.seed)
    for w in workers:
        w.start()

    while not run.stop.is_set():
        if run.inflight.idle.wait(timeout=_POLL):
            break
    run.stop.set()
    for w in workers:
        w.join()

    stats = CrawlStats()
    for w in workers:
        stats.absorb(w.stats)
    merged = sorted((seq, w.worker_id, local, page) for w in workers for seq, local, page in w.stored)
    records = [make_record(page, i, local) for i, (_, _, local, page) in enumerate(merged, 1)]
    stats.pages_stored = len(records)
    stats.wall_time = time.perf_counter() - started
    result = CrawlResult(records, stats)

    if run.failure is not None:
        worker_id, exc = run.failure
        if isinstance(exc, SeedUnreachable):
            raise exc
        result.complete = False
        raise WorkerPanic(worker_id, exc, result) from exc
    return result
