from __future__ import annotations

import pytest

from exclusive_crawler.fixture import FixtureSpec, serve_fixture, start_site

from .helpers import DictSite

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        previous = _criteria.get(n)
        # one criterion may span several tests; any failure wins
        if previous is None or previous[1] == "PASS":
            _criteria[n] = (text, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, status = _criteria[n]
        terminalreporter.write_line(f"criterion {n:>2} {status}: {text}")


@pytest.fixture
def make_site(tmp_path):
    """Factory: generate + serve a fixture site; closed at teardown."""
    sites = []

    def factory(spec: FixtureSpec | None = None, **kwargs):
        spec = spec or FixtureSpec(**kwargs)
        site = start_site(spec, tmp_path / f"site{len(sites)}")
        sites.append(site)
        return site

    yield factory
    for site in sites:
        site.close()


@pytest.fixture
def static_server(tmp_path):
    """Factory: serve a dict of {relative path: bytes} from a temp dir."""
    servers = []

    def factory(files: dict[str, bytes], **kwargs):
        root = tmp_path / f"static{len(servers)}"
        root.mkdir()
        for rel, data in files.items():
            path = root / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        server = serve_fixture(root, **kwargs)
        servers.append(server)
        return server

    yield factory
    for server in servers:
        server.close()


@pytest.fixture
def dict_site():
    sites = []

    def factory(routes):
        s = DictSite(routes)
        sites.append(s)
        return s

    yield factory
    for s in sites:
        s.close()
