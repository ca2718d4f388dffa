"""Command line entry point: ``excrawl crawl|fixture gen|fixture serve|bench``.

Exit status is 0 on success, 1 on a fatal crawl error and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from .bench import run_benchmark
from .fetch import DEFAULT_USER_AGENT
from .fixture import FixtureSpec, generate_fixture, serve_fixture
from .manager import run_managed_crawl
from .spider import CrawlConfig, CrawlError, Mode, crawl_site
from .store import write_csv, write_jsonl
from .urls import UrlError

log = logging.getLogger("exclusive_crawler")


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="excrawl", description="Site-scoped exclusive web crawler")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    crawl = sub.add_parser("crawl", help="crawl a site and store the records")
    crawl.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.EXCLUSIVE.value)
    crawl.add_argument("--seed-url", required=True)
    crawl.add_argument("--workers", type=_positive, default=1)
    crawl.add_argument("--max-pages", type=_positive, default=1000)
    crawl.add_argument("--timeout-ms", type=_positive, default=10_000)
    crawl.add_argument("--delay-ms", type=_non_negative, default=0)
    crawl.add_argument("--truncate", type=_fraction, default=Fraction(1, 3), metavar="FRACTION",
                       help="keep this fraction of each page's text (1 disables truncation)")
    crawl.add_argument("--external-budget", type=_non_negative, default=0)
    crawl.add_argument("--user-agent", default=DEFAULT_USER_AGENT)
    crawl.add_argument("--out", default="crawl", help="output path without extension")
    crawl.add_argument("--format", choices=["jsonl", "csv", "both"], default="jsonl")

    fixture = sub.add_parser("fixture", help="generate or serve a fixture site")
    fsub = fixture.add_subparsers(dest="fixture_command", required=True)
    gen = fsub.add_parser("gen", help="write a deterministic fixture site")
    _add_spec_args(gen)
    gen.add_argument("--out", required=True)
    serve = fsub.add_parser("serve", help="serve a directory with request logging")
    serve.add_argument("dir")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--latency-ms", type=_non_negative, default=0)
    serve.add_argument("--robots", help="robots.txt body file (default: DIR/robots.txt if present)")

    bench = sub.add_parser("bench", help="compare exclusive and normal crawl speed")
    _add_spec_args(bench)
    bench.add_argument("--workers", type=_positive, default=10)
    bench.add_argument("--out", default="bench.csv")
    return parser


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pages", type=_positive, default=20)
    p.add_argument("--links-per-page", type=_non_negative, default=3)
    p.add_argument("--external-fraction", type=_fraction, default=Fraction(1, 4))
    p.add_argument("--dead-links", type=_non_negative, default=0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--latency-ms", type=_non_negative, default=50)
    p.add_argument("--robots", default="User-agent: *\nDisallow: /private/\n", help="robots.txt body")


def _spec(args) -> FixtureSpec:
    return FixtureSpec(
        pages=args.pages,
        links_per_page=args.links_per_page,
        external_fraction=args.external_fraction,
        dead_link_count=args.dead_links,
        seed=args.seed,
        latency=args.latency_ms / 1000.0,
        robots_body=args.robots or None,
    )


def cmd_crawl(args) -> int:
    config = CrawlConfig(
        seed=args.seed_url,
        mode=Mode(args.mode),
        max_pages=args.max_pages,
        timeout=args.timeout_ms / 1000.0,
        user_agent=args.user_agent,
        truncation_fraction=args.truncate,
        min_delay_per_host=args.delay_ms / 1000.0,
        workers=args.workers,
        external_page_budget=args.external_budget,
    )
    result = crawl_site(config) if config.workers == 1 else run_managed_crawl(config)
    out = Path(args.out)
    if args.format in ("jsonl", "both"):
        write_jsonl(result.records, out.with_suffix(".jsonl"))
    if args.format in ("csv", "both"):
        write_csv(result.records, out.with_suffix(".csv"))
    s = result.stats
    print(
        f"stored {s.pages_stored} pages ({s.pages_fetched} fetched, {s.errors} errors) "
        f"in {s.wall_time * 1000:.0f} ms, {s.per_page_mean * 1000:.1f} ms/page"
    )
    return 0


def cmd_fixture(args) -> int:
    if args.fixture_command == "gen":
        manifest = generate_fixture(_spec(args), args.out)
        print(f"wrote {len(manifest['pages'])} pages to {args.out}")
        return 0
    robots = None
    if args.robots:
        robots = Path(args.robots).read_text(encoding="utf-8")
    elif (Path(args.dir) / "robots.txt").is_file():
        robots = (Path(args.dir) / "robots.txt").read_text(encoding="utf-8")
    server = serve_fixture(args.dir, port=args.port, latency=args.latency_ms / 1000.0, robots_body=robots, host=args.host)
    print(f"serving {args.dir} at {server.origin} (Ctrl-C to stop)")
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
        for e in server.log.entries:
            print(json.dumps({"t": round(e.timestamp, 6), "method": e.method, "path": e.path,
                              "status": e.status, "user_agent": e.user_agent}))
    return 0


def cmd_bench(args) -> int:
    config = CrawlConfig(seed="http://127.0.0.1/", workers=args.workers, max_pages=100_000)
    exclusive, normal = run_benchmark(_spec(args), config, out=args.out)
    print("mode,pages,wall_ms,per_page_ms,requests")
    for r in (exclusive, normal):
        print(f"{r.mode},{r.pages_stored},{r.wall_time * 1000:.1f},{r.per_page_mean * 1000:.1f},{r.requests_total}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "crawl":
            return cmd_crawl(args)
        if args.command == "fixture":
            return cmd_fixture(args)
        return cmd_bench(args)
    except (UrlError, ValueError) as exc:
        print(f"excrawl: error: {exc}", file=sys.stderr)
        return 2
    except (CrawlError, OSError) as exc:
        print(f"excrawl: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
