"""HTTP retrieval of pages and robots.txt.

Every outcome of :func:`fetch_page` is returned as a :class:`FetchResult`;
timeouts, refused connections and redirect loops never raise.
"""

from __future__ import annotations

import enum
import logging
import time
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Callable, ContextManager, Optional

import requests

from .robots import RobotsRules, parse_robots
from .urls import HostScope, NormalizedUrl, UrlError, normalize

log = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "ExclusiveCrawler/1.0"
DEFAULT_TIMEOUT = 10.0
MAX_REDIRECTS = 5
_REDIRECT_CODES = {301, 302, 303, 307, 308}


class FetchError(str, enum.Enum):
    TIMEOUT = "timeout"
    CONNECTION_FAILED = "connection_failed"
    TOO_MANY_REDIRECTS = "too_many_redirects"
    BAD_REDIRECT = "bad_redirect"


@dataclass
class FetchResult:
    url: NormalizedUrl  # final url after redirects
    status: int  # 0 when no response was received
    content_type: str = ""
    body: bytes = b""
    elapsed: float = 0.0  # milliseconds, all hops included
    error: Optional[FetchError] = None
    requested: Optional[NormalizedUrl] = None
    redirects: list[NormalizedUrl] = field(default_factory=list)
    # set when a redirect target was declined by the caller's claim hook
    declined_redirect: Optional[NormalizedUrl] = None

    @property
    def ok(self) -> bool:
        return self.error is None and 200 <= self.status < 300

    @property
    def is_html(self) -> bool:
        return is_html(self.content_type)


def is_html(content_type: str) -> bool:
    return "text/html" in content_type.lower()


def new_session(user_agent: str = DEFAULT_USER_AGENT) -> requests.Session:
    session = requests.Session()
    # proxies from the environment must not intercept local fixture traffic
    session.trust_env = False
    session.headers["User-Agent"] = user_agent
    return session


def _get(session: requests.Session, url: str, timeout: float, user_agent: str) -> requests.Response:
    return session.get(
        url,
        timeout=timeout,
        allow_redirects=False,
        headers={"User-Agent": user_agent},
    )


def fetch_page(
    url: NormalizedUrl,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    session: Optional[requests.Session] = None,
    claim: Optional[Callable[[NormalizedUrl], bool]] = None,
    max_redirects: int = MAX_REDIRECTS,
    pace: Optional[Callable[[NormalizedUrl], ContextManager]] = None,
) -> FetchResult:
    """GET ``url``, following up to ``max_redirects`` redirects.

    The body is kept only for 2xx responses whose content type is HTML.
    ``claim`` is consulted before each redirect hop; returning False stops
    at the redirect response and records the target in ``declined_redirect``
    (the caller uses this to keep each URL fetched at most once).
    ``pace(url)``, when given, wraps every individual request (politeness).
    """
    own_session = session is None
    if own_session:
        session = new_session(user_agent)
    result = FetchResult(url=url, status=0, requested=url)
    current = url
    started = time.perf_counter()
    try:
        for hop in range(max_redirects + 1):
            try:
                with pace(current) if pace is not None else nullcontext():
                    resp = _get(session, current.render(), timeout, user_agent)
            except requests.Timeout:
                result.error = FetchError.TIMEOUT
                return result
            except requests.RequestException as exc:
                log.debug("fetch %s failed: %s", current, exc)
                result.error = FetchError.CONNECTION_FAILED
                return result

            result.url = current
            result.status = resp.status_code
            result.content_type = resp.headers.get("Content-Type", "")
            location = resp.headers.get("Location")
            if resp.status_code not in _REDIRECT_CODES or not location:
                if result.ok and result.is_html:
                    result.body = resp.content
                resp.close()
                return result
            resp.close()

            try:
                target = normalize(location, current)
            except UrlError:
                result.error = FetchError.BAD_REDIRECT
                return result
            if hop == max_redirects:
                break
            if claim is not None and not claim(target):
                result.declined_redirect = target
                return result
            result.redirects.append(target)
            current = target
        result.error = FetchError.TOO_MANY_REDIRECTS
        return result
    finally:
        result.elapsed = (time.perf_counter() - started) * 1000.0
        if own_session:
            session.close()


def fetch_robots(
    scope: HostScope,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    session: Optional[requests.Session] = None,
) -> Optional[RobotsRules]:
    """Fetch and parse ``/robots.txt`` for ``scope``; None means allow-all."""
    own_session = session is None
    if own_session:
        session = new_session(user_agent)
    try:
        resp = session.get(
            scope.url("/robots.txt").render(),
            timeout=timeout,
            headers={"User-Agent": user_agent},
        )
    except requests.RequestException as exc:
        log.debug("robots.txt for %s unavailable: %s", scope, exc)
        return None
    finally:
        if own_session:
            session.close()
    if not 200 <= resp.status_code < 300:
        return None
    return parse_robots(resp.content.decode("utf-8", errors="replace"))
