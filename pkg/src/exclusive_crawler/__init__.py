"""Site-scoped exclusive web crawler, a normal baseline crawler and a crawl manager."""

from .fetch import FetchResult, fetch_page, fetch_robots
from .manager import BenchReport, HostGate, WorkerPanic, acquire_slot, assign, run_managed_crawl
from .parser import ExtractedPage, extract_page, split_keywords, truncate_component
from .robots import RobotsRules, check_robots, parse_robots
from .spider import CrawlConfig, CrawlResult, CrawlStats, Mode, SeedUnreachable, crawl_site, follower
from .store import CrawlRecord, MalformedRecord, make_record, read_records, write_csv, write_jsonl
from .urls import Frontier, HostScope, MalformedUrl, NormalizedUrl, Scope, UnsupportedScheme, classify, normalize

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "CrawlConfig",
    "CrawlRecord",
    "CrawlResult",
    "CrawlStats",
    "ExtractedPage",
    "FetchResult",
    "Frontier",
    "HostGate",
    "HostScope",
    "MalformedRecord",
    "MalformedUrl",
    "Mode",
    "NormalizedUrl",
    "RobotsRules",
    "Scope",
    "SeedUnreachable",
    "UnsupportedScheme",
    "WorkerPanic",
    "acquire_slot",
    "assign",
    "check_robots",
    "classify",
    "crawl_site",
    "extract_page",
    "fetch_page",
    "fetch_robots",
    "follower",
    "make_record",
    "normalize",
    "parse_robots",
    "read_records",
    "run_managed_crawl",
    "split_keywords",
    "truncate_component",
    "write_csv",
    "write_jsonl",
]
