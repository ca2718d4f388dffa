"""Exclusive vs. normal crawl speed on the same fixture site."""

from __future__ import annotations

import csv
import dataclasses
import logging
import tempfile
from pathlib import Path
from typing import Optional, Union

from .fixture import FixtureSite, FixtureSpec, start_site
from .manager import BenchReport, run_managed_crawl
from .spider import CrawlConfig, CrawlResult, Mode

log = logging.getLogger(__name__)

COMPARISON_HEADER = ("mode", "pages", "wall_ms", "per_page_ms", "requests")


def crawl_against(site: FixtureSite, config: CrawlConfig, mode: Mode) -> tuple[CrawlResult, int]:
    """Run one crawl of ``site`` in ``mode``; returns the result and request count."""
    site.clear_logs()
    cfg = dataclasses.replace(config, seed=site.seed_url, mode=mode)
    if mode is Mode.NORMAL and config.external_page_budget == 0:
        cfg.external_page_budget = len(site.manifest["external_pages"])
    result = run_managed_crawl(cfg)
    return result, len(site.main.log) + len(site.external.log)


def write_comparison(reports: list[BenchReport], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        for r in reports:
            writer.writerow(
                [r.mode, r.pages_stored, f"{r.wall_time * 1000:.3f}", f"{r.per_page_mean * 1000:.3f}", r.requests_total]
            )


def run_benchmark(
    spec: FixtureSpec,
    config: CrawlConfig,
    out: Optional[Union[str, Path]] = None,
    fixture_dir: Optional[Union[str, Path]] = None,
) -> tuple[BenchReport, BenchReport]:
    """Serve a fixture for ``spec`` and crawl it in both modes with ``config``.

    ``config.seed`` is replaced by the fixture's first page. In normal mode a
    zero ``external_page_budget`` means "every external fixture page". When
    ``out`` is given, the comparison CSV is written there.
    """
    with tempfile.TemporaryDirectory(prefix="excrawl-bench-") as tmp:
        directory = Path(fixture_dir) if fixture_dir is not None else Path(tmp)
        with start_site(spec, directory) as site:
            reports = []
            for mode in (Mode.EXCLUSIVE, Mode.NORMAL):
                result, requests_total = crawl_against(site, config, mode)
                report = BenchReport.from_result(mode.value, result, requests_total)
                log.info("%s: %d pages in %.1f ms", mode.value, report.pages_stored, report.wall_time * 1000)
                reports.append(report)
    if out is not None:
        write_comparison(reports, out)
    return reports[0], reports[1]
