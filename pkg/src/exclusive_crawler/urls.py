"""URL normalization, host scoping and the FIFO crawl frontier.

A :class:`NormalizedUrl` is the identity key used for deduplication: two
raw URLs that point at the same resource under the rules below compare
equal and render to the same string.

Rules applied by :func:`normalize`:

* scheme and host are lowercased, only ``http`` and ``https`` are accepted
* default ports (80/443) are dropped from the textual form
* percent-escapes use uppercase hex; escaped unreserved characters are decoded
* dot-segments are removed from the path, an empty path becomes ``/``
* the query string is kept verbatim, the fragment is always dropped
"""

from __future__ import annotations

import enum
import re
import string
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional
from urllib.parse import urljoin, urlsplit

DEFAULT_PORTS = {"http": 80, "https": 443}

_UNRESERVED = frozenset(string.ascii_letters + string.digits + "-._~")
# Characters allowed to appear literally in a path (RFC 3986 pchar + "/").
_PATH_SAFE = _UNRESERVED | frozenset("!$&'()*+,;=:@/")
_HEX = frozenset(string.hexdigits)
_HOST_RE = re.compile(r"^(?:[a-z0-9._~!$&'()*+,;=%-]+|\[[0-9a-f:.]+\])$")


class UrlError(ValueError):
    """Base class for URL normalization failures."""


class MalformedUrl(UrlError):
    pass


class UnsupportedScheme(UrlError):
    pass


@dataclass(frozen=True, order=True)
class NormalizedUrl:
    scheme: str
    host: str
    port: int
    path: str
    query: str = ""

    def __str__(self) -> str:
        return self.render()

    def render(self) -> str:
        text = self.origin + self.path
        if self.query:
            text += "?" + self.query
        return text

    @property
    def origin(self) -> str:
        """``scheme://host[:port]`` without path."""
        host = f"[{self.host}]" if ":" in self.host else self.host
        if DEFAULT_PORTS[self.scheme] == self.port:
            return f"{self.scheme}://{host}"
        return f"{self.scheme}://{host}:{self.port}"


@dataclass(frozen=True)
class HostScope:
    """The (scheme, host, port) triple a crawl is confined to."""

    scheme: str
    host: str
    port: int

    @classmethod
    def of(cls, url: NormalizedUrl) -> HostScope:
        return cls(url.scheme, url.host, url.port)

    def url(self, path: str = "/") -> NormalizedUrl:
        return NormalizedUrl(self.scheme, self.host, self.port, path)

    def __str__(self) -> str:
        return self.url("/").origin


class Scope(enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


def _normalize_path(path: str) -> str:
    out = []
    i = 0
    while i < len(path):
        ch = path[i]
        if ch == "%" and i + 2 < len(path) and path[i + 1] in _HEX and path[i + 2] in _HEX:
            decoded = chr(int(path[i + 1 : i + 3], 16))
            out.append(decoded if decoded in _UNRESERVED else "%" + path[i + 1 : i + 3].upper())
            i += 3
            continue
        if ch in _PATH_SAFE:
            out.append(ch)
        else:
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8", "surrogatepass"))
        i += 1
    return remove_dot_segments("".join(out)) or "/"


def remove_dot_segments(path: str) -> str:
    """RFC 3986 section 5.2.4 dot-segment removal."""
    output: list[str] = []
    inp = path
    while inp:
        if inp.startswith("../"):
            inp = inp[3:]
        elif inp.startswith("./"):
            inp = inp[2:]
        elif inp.startswith("/./"):
            inp = inp[2:]
        elif inp == "/.":
            inp = "/"
        elif inp.startswith("/../"):
            inp = inp[3:]
            if output:
                output.pop()
        elif inp == "/..":
            inp = "/"
            if output:
                output.pop()
        elif inp in (".", ".."):
            inp = ""
        else:
            start = 1 if inp.startswith("/") else 0
            end = inp.find("/", start)
            if end == -1:
                end = len(inp)
            output.append(inp[:end])
            inp = inp[end:]
    return "".join(output)


def normalize(raw: str, base: Optional[NormalizedUrl | str] = None) -> NormalizedUrl:
    """Turn ``raw`` (absolute, or relative to ``base``) into a NormalizedUrl.

    Raises MalformedUrl for unparseable input and UnsupportedScheme for any
    scheme other than http/https.
    """
    if not isinstance(raw, str) or not raw.strip():
        raise MalformedUrl(f"empty url: {raw!r}")
    raw = raw.strip()
    try:
        if base is not None:
            raw = urljoin(str(base), raw)
        parts = urlsplit(raw)
    except ValueError as exc:
        raise MalformedUrl(f"{raw!r}: {exc}") from None

    scheme = parts.scheme.lower()
    if not scheme:
        raise MalformedUrl(f"relative url without base: {raw!r}")
    if scheme not in DEFAULT_PORTS:
        raise UnsupportedScheme(f"unsupported scheme {scheme!r} in {raw!r}")

    host = (parts.hostname or "").lower()
    if not host or not _HOST_RE.match(host if ":" not in host else f"[{host}]"):
        raise MalformedUrl(f"bad host in {raw!r}")
    try:
        port = parts.port
    except ValueError:
        raise MalformedUrl(f"bad port in {raw!r}") from None
    if port is None:
        port = DEFAULT_PORTS[scheme]

    return NormalizedUrl(scheme, host, port, _normalize_path(parts.path), parts.query)


def classify(url: NormalizedUrl, scope: HostScope) -> Scope:
    if (url.scheme, url.host, url.port) == (scope.scheme, scope.host, scope.port):
        return Scope.INTERNAL
    return Scope.EXTERNAL


class Frontier:
    """FIFO queue of URLs awaiting a fetch, plus an insert-only visited set.

    A URL is accepted at most once per frontier lifetime; dequeuing does not
    forget it.
    """

    def __init__(self) -> None:
        self._queue: deque[NormalizedUrl] = deque()
        self._visited: set[str] = set()

    def enqueue(self, url: NormalizedUrl) -> bool:
        key = url.render()
        if key in self._visited:
            return False
        self._visited.add(key)
        self._queue.append(url)
        return True

    def dequeue(self) -> Optional[NormalizedUrl]:
        return self._queue.popleft() if self._queue else None

    def mark_visited(self, url: NormalizedUrl) -> bool:
        """Record ``url`` as quested without queueing it. True if it was new."""
        key = url.render()
        if key in self._visited:
            return False
        self._visited.add(key)
        return True

    def seen(self, url: NormalizedUrl) -> bool:
        return url.render() in self._visited

    @property
    def visited(self) -> frozenset[str]:
        return frozenset(self._visited)

    def __len__(self) -> int:
        return len(self._queue)

    def __bool__(self) -> bool:
        return bool(self._queue)

    def __iter__(self) -> Iterator[NormalizedUrl]:
        return iter(list(self._queue))
