"""Deterministic fixture websites and a local server that logs every request.

A fixture is ``pages`` HTML files ``p1.html .. pN.html`` whose link graph
is connected from ``p1.html`` (a random spanning tree plus extra random
links), some links to a second "external" site and some dead links. The
``manifest.json`` written next to the pages records every anchor and is
the ground truth used by the test oracles.

External hrefs are written with the placeholder origin ``EXTERNAL_ORIGIN``;
:func:`serve_fixture` substitutes the real origin of the external server
at response time, so the files on disk do not depend on port numbers.
"""

from __future__ import annotations

import errno
import json
import logging
import mimetypes
import random
import threading
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from html import escape
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Union
from urllib.parse import unquote, urlsplit

log = logging.getLogger(__name__)

EXTERNAL_ORIGIN = "http://external.fixture.invalid"
MANIFEST_NAME = "manifest.json"
EXTERNAL_DIR = "external"

_WORDS = (
    "crawler spider index search engine database table page site link host "
    "robot queue manager parser saver follower keyword title description image "
    "webmaster update result query rank fresh archive content media network "
    "server request response protocol agent exclusive normal storage column"
).split()


class PortInUse(OSError):
    pass


@dataclass
class FixtureSpec:
    pages: int = 20
    links_per_page: int = 3
    external_fraction: Fraction = Fraction(0)
    dead_link_count: int = 0
    seed: int = 7
    latency: float = 0.0  # seconds, injected per response
    robots_body: Optional[str] = None
    private_pages: int = 0  # the last k pages live under /private/
    external_pages: int = 5

    def __post_init__(self):
        if isinstance(self.external_fraction, float):
            self.external_fraction = Fraction(repr(self.external_fraction))
        self.external_fraction = Fraction(self.external_fraction)
        if self.pages < 1:
            raise ValueError("pages must be >= 1")
        if self.links_per_page < 0 or self.dead_link_count < 0 or self.private_pages < 0:
            raise ValueError("counts must be non-negative")
        if not 0 <= self.external_fraction <= 1:
            raise ValueError("external_fraction must be in [0, 1]")
        if self.private_pages >= self.pages:
            raise ValueError("page 1 cannot be private")
        if self.external_pages < 1:
            raise ValueError("external_pages must be >= 1")

    def to_json(self) -> dict:
        d = asdict(self)
        d["external_fraction"] = str(self.external_fraction)
        return d


def page_path(spec: FixtureSpec, n: int) -> str:
    if n > spec.pages - spec.private_pages:
        return f"/private/p{n}.html"
    return f"/p{n}.html"


def _round_half_up(x: Fraction) -> int:
    return int(x + Fraction(1, 2)) if x >= 0 else -int(-x + Fraction(1, 2))


def _sentence(rng: random.Random, n: int) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(n))


def _render_page(title: str, description: str, keywords: list[str], body: str, images: list[str], links: list[str]) -> str:
    lines = [
        "<!DOCTYPE html>",
        "<html>",
        "<head>",
        f"<title>{escape(title)}</title>",
        f'<meta name="description" content="{escape(description)}">',
        f'<meta name="keywords" content="{escape(", ".join(keywords))}">',
        "</head>",
        "<body>",
        f"<h1>{escape(title)}</h1>",
        f"<p>{escape(body)}</p>",
    ]
    lines += [f'<img src="{escape(src)}" alt="image {i}">' for i, src in enumerate(images, 1)]
    lines += ["<ul>"] + [f'<li><a href="{escape(href)}">link {i}</a></li>' for i, href in enumerate(links, 1)] + ["</ul>"]
    lines += ["</body>", "</html>", ""]
    return "\n".join(lines)


def build_manifest(spec: FixtureSpec) -> dict:
    """Decide the whole link graph from ``spec`` alone (no I/O)."""
    rng = random.Random(spec.seed)
    n = spec.pages

    anchors: list[list[tuple[str, str]]] = [[] for _ in range(n + 1)]  # (kind, target)
    for child in range(2, n + 1):
        anchors[rng.randint(1, child - 1)].append(("internal", page_path(spec, child)))

    random_slots = n * spec.links_per_page
    total = (n - 1) + random_slots + spec.dead_link_count
    n_external = _round_half_up(spec.external_fraction * total)
    if n_external > random_slots:
        raise ValueError(
            f"external_fraction {spec.external_fraction} needs {n_external} external links "
            f"but only {random_slots} random link slots exist"
        )
    external_slots = set(rng.sample(range(random_slots), n_external))
    for slot in range(random_slots):
        page = slot // spec.links_per_page + 1
        if slot in external_slots:
            anchors[page].append(("external", f"/e{rng.randint(1, spec.external_pages)}.html"))
        else:
            anchors[page].append(("internal", page_path(spec, rng.randint(1, n))))
    for k in range(1, spec.dead_link_count + 1):
        anchors[rng.randint(1, n)].append(("dead", f"/dead{k}.html"))

    pages = []
    for i in range(1, n + 1):
        rng.shuffle(anchors[i])
        pages.append(
            {
                "id": i,
                "path": page_path(spec, i),
                "title": f"Page {i}: {_sentence(rng, 2)}",
                "description": _sentence(rng, 8),
                "keywords": sorted(set(rng.sample(_WORDS, 3))),
                "body": _sentence(rng, rng.randint(20, 60)),
                "images": [f"/img/p{i}-{k}.png" for k in range(1, rng.randint(0, 2) + 1)],
                "anchors": [{"kind": kind, "path": target} for kind, target in anchors[i]],
                "internal": [t for kind, t in anchors[i] if kind == "internal"],
                "external": [t for kind, t in anchors[i] if kind == "external"],
                "dead": [t for kind, t in anchors[i] if kind == "dead"],
            }
        )

    external = []
    for k in range(1, spec.external_pages + 1):
        nxt = k % spec.external_pages + 1
        external.append(
            {
                "path": f"/e{k}.html",
                "title": f"External {k}",
                "links": [f"/e{nxt}.html"] if spec.external_pages > 1 else [],
            }
        )

    return {"spec": spec.to_json(), "pages": pages, "external_pages": external}


def generate_fixture(spec: FixtureSpec, out_dir: Union[str, Path]) -> dict:
    """Write the fixture site and its manifest into ``out_dir``."""
    out = Path(out_dir)
    manifest = build_manifest(spec)
    for page in manifest["pages"]:
        hrefs = []
        for a in page["anchors"]:
            hrefs.append(EXTERNAL_ORIGIN + a["path"] if a["kind"] == "external" else a["path"])
        html = _render_page(page["title"], page["description"], page["keywords"], page["body"], page["images"], hrefs)
        _write(out / page["path"].lstrip("/"), html)
    for page in manifest["external_pages"]:
        html = _render_page(page["title"], "", [], page["title"], [], page["links"])
        _write(out / EXTERNAL_DIR / page["path"].lstrip("/"), html)
    if spec.robots_body is not None:
        _write(out / "robots.txt", spec.robots_body)
    _write(out / MANIFEST_NAME, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def load_manifest(fixture_dir: Union[str, Path]) -> dict:
    return json.loads((Path(fixture_dir) / MANIFEST_NAME).read_text(encoding="utf-8"))


def reachable_paths(manifest: dict) -> set[str]:
    """Paths of fixture pages reachable from page 1 over internal anchors (BFS)."""
    known = {p["path"]: p for p in manifest["pages"]}
    start = manifest["pages"][0]["path"]
    seen = {start}
    todo = [start]
    while todo:
        nxt = []
        for path in todo:
            for target in known[path]["internal"]:
                if target in known and target not in seen:
                    seen.add(target)
                    nxt.append(target)
        todo = nxt
    return seen


@dataclass(frozen=True)
class LogEntry:
    timestamp: float  # time.monotonic() when the request line was parsed
    method: str
    path: str
    status: int
    user_agent: str


class RequestLog:
    def __init__(self):
        self._entries: list[LogEntry] = []
        self._lock = threading.Lock()

    def append(self, entry: LogEntry) -> None:
        with self._lock:
            self._entries.append(entry)

    @property
    def entries(self) -> list[LogEntry]:
        with self._lock:
            return sorted(self._entries, key=lambda e: e.timestamp)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def paths(self) -> list[str]:
        return [e.path for e in self.entries]

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


class _Handler(BaseHTTPRequestHandler):
    server_version = "FixtureServer/1.0"
    root: Path
    latency: float
    robots_body: Optional[str]
    external_origin: str
    request_log: RequestLog

    def do_GET(self):
        stamp = time.monotonic()
        path = unquote(urlsplit(self.path).path)
        status, ctype, body = self._resolve(path)
        if self.latency > 0:
            time.sleep(self.latency)
        self.request_log.append(LogEntry(stamp, "GET", path, status, self.headers.get("User-Agent", "")))
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _resolve(self, path: str) -> tuple[int, str, bytes]:
        if path == "/robots.txt":
            if self.robots_body is None:
                return 404, "text/plain", b"not found\n"
            return 200, "text/plain; charset=utf-8", self.robots_body.encode("utf-8")
        target = (self.root / path.lstrip("/")).resolve()
        if self.root not in target.parents or not target.is_file() or target.name == MANIFEST_NAME:
            return 404, "text/html; charset=utf-8", b"<html><body>not found</body></html>"
        data = target.read_bytes()
        if target.suffix in (".html", ".htm"):
            data = data.replace(EXTERNAL_ORIGIN.encode(), self.external_origin.encode())
            return 200, "text/html; charset=utf-8", data
        return 200, mimetypes.guess_type(target.name)[0] or "application/octet-stream", data

    def log_message(self, format, *args):
        log.debug("%s - %s", self.address_string(), format % args)


class FixtureServer:
    """Handle for a running fixture server (also a context manager)."""

    def __init__(self, httpd: ThreadingHTTPServer, log_: RequestLog):
        self.httpd = httpd
        self.log = log_
        self._thread = threading.Thread(target=httpd.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True)
        self._thread.start()

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    @property
    def host(self) -> str:
        return self.httpd.server_address[0]

    @property
    def origin(self) -> str:
        return f"http://{self.host}:{self.port}"

    def url(self, path: str = "/p1.html") -> str:
        return self.origin + path

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        self._thread.join()

    def __enter__(self) -> FixtureServer:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def serve_fixture(
    directory: Union[str, Path],
    port: int = 0,
    latency: float = 0.0,
    robots_body: Optional[str] = None,
    host: str = "127.0.0.1",
    external_origin: str = EXTERNAL_ORIGIN,
) -> FixtureServer:
    """Serve ``directory`` over HTTP in a background thread; port 0 picks a free port."""
    root = Path(directory).resolve()
    if not root.is_dir():
        raise FileNotFoundError(root)
    request_log = RequestLog()
    handler = type(
        "FixtureHandler",
        (_Handler,),
        {
            "root": root,
            "latency": latency,
            "robots_body": robots_body,
            "external_origin": external_origin,
            "request_log": request_log,
        },
    )
    try:
        httpd = ThreadingHTTPServer((host, port), handler)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            raise PortInUse(exc.errno, f"port {port} in use") from None
        raise
    httpd.daemon_threads = True
    return FixtureServer(httpd, request_log)


@dataclass
class FixtureSite:
    """Main + external servers for one generated fixture."""

    directory: Path
    manifest: dict
    main: FixtureServer
    external: FixtureServer
    extra: dict = field(default_factory=dict)

    @property
    def seed_url(self) -> str:
        return self.main.url(self.manifest["pages"][0]["path"])

    def expected_urls(self) -> set[str]:
        return {self.main.origin + p for p in reachable_paths(self.manifest)}

    def clear_logs(self) -> None:
        self.main.log.clear()
        self.external.log.clear()

    def close(self) -> None:
        self.main.close()
        self.external.close()

    def __enter__(self) -> FixtureSite:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def start_site(spec: FixtureSpec, directory: Union[str, Path], external_host: str = "localhost") -> FixtureSite:
    """Generate ``spec`` into ``directory`` and serve it plus its external host.

    The external pages are served on ``external_host`` (a different host name
    than the main site's 127.0.0.1) so they are off-scope for the crawler.
    """
    directory = Path(directory)
    manifest = generate_fixture(spec, directory)
    external = serve_fixture(directory / EXTERNAL_DIR, latency=spec.latency, host=external_host)
    ext_origin = f"http://{external_host}:{external.port}"
    try:
        main = serve_fixture(directory, latency=spec.latency, robots_body=spec.robots_body, external_origin=ext_origin)
    except BaseException:
        external.close()
        raise
    return FixtureSite(directory, manifest, main, external)
