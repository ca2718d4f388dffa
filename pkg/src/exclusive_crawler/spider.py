"""The single-worker crawl loop: dequeue, fetch, parse, save, follow.

Exclusive mode stays on the seed's host and never looks at robots.txt.
Normal mode checks robots.txt (once per host) and may follow links to
other hosts while its external page budget lasts.
"""

from __future__ import annotations

import enum
import logging
import threading
import time
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable, Optional, Union

import requests

from .fetch import DEFAULT_TIMEOUT, DEFAULT_USER_AGENT, FetchResult, fetch_page, fetch_robots, new_session
from .parser import DEFAULT_TRUNCATION, ExtractedPage, as_fraction, extract_page
from .politeness import HostGate
from .robots import RobotsRules, check_robots
from .store import CrawlRecord, make_record
from .urls import Frontier, HostScope, NormalizedUrl, Scope, classify, normalize

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    EXCLUSIVE = "exclusive"
    NORMAL = "normal"


class CrawlError(Exception):
    pass


class SeedUnreachable(CrawlError):
    def __init__(self, url: NormalizedUrl, reason: str):
        super().__init__(f"seed {url} unreachable: {reason}")
        self.url = url
        self.reason = reason


@dataclass
class CrawlConfig:
    seed: Union[NormalizedUrl, str]
    mode: Mode = Mode.EXCLUSIVE
    max_pages: int = 1000
    timeout: float = DEFAULT_TIMEOUT  # seconds
    user_agent: str = DEFAULT_USER_AGENT
    truncation_fraction: Fraction = DEFAULT_TRUNCATION
    min_delay_per_host: float = 0.0  # seconds
    workers: int = 1
    external_page_budget: int = 0  # ignored in Exclusive mode

    def __post_init__(self):
        if isinstance(self.seed, str):
            self.seed = normalize(self.seed)
        self.mode = Mode(self.mode)
        self.truncation_fraction = as_fraction(self.truncation_fraction)
        if self.max_pages < 1:
            raise ValueError("max_pages must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 < self.truncation_fraction <= 1:
            raise ValueError("truncation_fraction must be in (0, 1]")
        if self.external_page_budget < 0:
            raise ValueError("external_page_budget must be >= 0")

    @property
    def scope(self) -> HostScope:
        return HostScope.of(self.seed)


@dataclass
class CrawlStats:
    pages_fetched: int = 0
    pages_stored: int = 0
    errors: int = 0
    robots_fetches: int = 0
    robots_blocked: int = 0
    external_links_seen: int = 0
    external_enqueued: int = 0
    wall_time: float = 0.0  # seconds
    fetch_time: float = 0.0  # seconds, sum over page fetches

    @property
    def per_page_mean(self) -> float:
        return self.fetch_time / self.pages_fetched if self.pages_fetched else 0.0

    def absorb(self, other: CrawlStats) -> None:
        for f in fields(self):
            if f.name != "wall_time":
                setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


@dataclass
class CrawlResult:
    records: list[CrawlRecord] = field(default_factory=list)
    stats: CrawlStats = field(default_factory=CrawlStats)
    complete: bool = True


class ExternalBudget:
    """Number of off-host pages a Normal crawl may still enqueue (thread-safe)."""

    def __init__(self, pages: int):
        self.remaining = pages
        self._lock = threading.Lock()

    def take(self) -> bool:
        with self._lock:
            if self.remaining <= 0:
                return False
            self.remaining -= 1
            return True

    def refund(self) -> None:
        with self._lock:
            self.remaining += 1


class RobotsCache:
    """robots.txt rules per host, fetched at most once per crawl."""

    def __init__(self):
        self._rules: dict[HostScope, Optional[RobotsRules]] = {}
        self._lock = threading.Lock()
        self._host_locks: dict[HostScope, threading.Lock] = {}

    def get(self, scope: HostScope, fetch: Callable[[HostScope], Optional[RobotsRules]]) -> tuple[Optional[RobotsRules], bool]:
        """Rules for ``scope`` and whether this call performed the fetch."""
        with self._lock:
            host_lock = self._host_locks.setdefault(scope, threading.Lock())
        with host_lock:
            if scope in self._rules:
                return self._rules[scope], False
            rules = fetch(scope)
            self._rules[scope] = rules
            return rules, True


def admit(
    url: NormalizedUrl,
    config: CrawlConfig,
    scope: HostScope,
    accept: Callable[[NormalizedUrl], bool],
    budget: ExternalBudget,
    stats: CrawlStats,
) -> bool:
    """Apply the follow rules to one url and hand it to ``accept`` if allowed.

    ``accept`` is the dedup step (frontier enqueue or mark_visited).
    """
    if classify(url, scope) is Scope.INTERNAL:
        return accept(url)
    if config.mode is Mode.EXCLUSIVE:
        return False
    if not budget.take():
        return False
    if accept(url):
        stats.external_enqueued += 1
        return True
    budget.refund()
    return False


def follower(
    page: ExtractedPage,
    config: CrawlConfig,
    frontier: Frontier,
    scope: HostScope,
    stats: Optional[CrawlStats] = None,
    budget: Optional[ExternalBudget] = None,
) -> int:
    """Enqueue the followable links of ``page``; returns how many were new.

    Pass the same ``budget`` for a whole crawl; a fresh one is created from
    ``config.external_page_budget`` otherwise.
    """
    stats = stats if stats is not None else CrawlStats()
    budget = budget if budget is not None else ExternalBudget(config.external_page_budget)
    enqueued = 0
    for link in page.links:
        if classify(link, scope) is Scope.EXTERNAL:
            stats.external_links_seen += 1
        if admit(link, config, scope, frontier.enqueue, budget, stats):
            enqueued += 1
    return enqueued


class Spider:
    """Fetch-and-parse machinery for one worker.

    ``gate`` and ``robots`` may be shared between spiders of one crawl.
    """

    def __init__(
        self,
        config: CrawlConfig,
        gate: Optional[HostGate] = None,
        robots: Optional[RobotsCache] = None,
        session: Optional[requests.Session] = None,
    ):
        self.config = config
        self.scope = config.scope
        self.gate = gate if gate is not None else HostGate(config.min_delay_per_host)
        self.robots = robots if robots is not None else RobotsCache()
        self.session = session if session is not None else new_session(config.user_agent)
        self.stats = CrawlStats()

    def close(self) -> None:
        self.session.close()

    def _fetch_robots(self, scope: HostScope) -> Optional[RobotsRules]:
        with self.gate.slot(str(scope)):
            return fetch_robots(scope, self.config.timeout, self.config.user_agent, self.session)

    def allowed(self, url: NormalizedUrl) -> bool:
        if self.config.mode is Mode.EXCLUSIVE:
            return True
        rules, fetched = self.robots.get(HostScope.of(url), self._fetch_robots)
        if fetched:
            self.stats.robots_fetches += 1
        return check_robots(rules, url, self.config.user_agent)

    def fetch(self, url: NormalizedUrl, claim: Optional[Callable[[NormalizedUrl], bool]] = None) -> FetchResult:
        result = fetch_page(
            url,
            self.config.timeout,
            self.config.user_agent,
            session=self.session,
            claim=claim,
            pace=self._pace,
        )
        self.stats.pages_fetched += 1
        self.stats.fetch_time += result.elapsed / 1000.0
        if result.error is not None or result.status >= 400:
            self.stats.errors += 1
            log.info("fetch %s: %s", url, result.error.value if result.error else result.status)
        return result

    def _pace(self, url: NormalizedUrl):
        return self.gate.slot(url.origin)

    def visit(
        self,
        url: NormalizedUrl,
        claim: Optional[Callable[[NormalizedUrl], bool]] = None,
        is_seed: bool = False,
    ) -> Optional[ExtractedPage]:
        """Robots check, fetch and parse one url. None if nothing to store."""
        if not self.allowed(url):
            self.stats.robots_blocked += 1
            log.info("robots.txt disallows %s", url)
            return None
        result = self.fetch(url, claim)
        if is_seed and not (result.ok or result.declined_redirect):
            reason = result.error.value if result.error else f"HTTP {result.status}"
            raise SeedUnreachable(url, reason)
        if not (result.ok and result.is_html):
            return None
        return extract_page(result.body, result.url, self.config.truncation_fraction)


def crawl_site(config: CrawlConfig) -> CrawlResult:
    """Crawl from ``config.seed`` with one sequential worker."""
    started = time.perf_counter()
    spider = Spider(config)
    scope = spider.scope
    stats = spider.stats
    budget = ExternalBudget(config.external_page_budget)
    frontier = Frontier()
    frontier.enqueue(config.seed)

    def claim_redirect(target: NormalizedUrl) -> bool:
        return admit(target, config, scope, frontier.mark_visited, budget, stats)

    records: list[CrawlRecord] = []
    first = True
    try:
        while len(records) < config.max_pages:
            url = frontier.dequeue()
            if url is None:
                break
            page = spider.visit(url, claim_redirect, is_seed=first)
            first = False
            if page is None:
                continue
            n = len(records) + 1
            records.append(make_record(page, n, n))
            follower(page, config, frontier, scope, stats, budget)
    finally:
        spider.close()
    stats.pages_stored = len(records)
    stats.wall_time = time.perf_counter() - started
    return CrawlResult(records, stats)
