"""Crawl records and their on-disk formats.

JSON Lines is the lossless primary format. The CSV export mirrors the
crawl table layout (``ID, Page Number, Title, ...``) and joins list cells
with ``|``; it is a view, not something we read back.
"""

from __future__ import annotations

import contextlib
import csv
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .parser import ExtractedPage

Destination = Union[str, os.PathLike, IO[str]]

CSV_HEADER = (
    "ID",
    "Page Number",
    "Title",
    "Description",
    "Keyword",
    "Page Component",
    "Images",
    "Links to",
)
LIST_JOINER = "|"


class MalformedRecord(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


@dataclass
class CrawlRecord:
    id: int
    page_number: int
    url: str
    title: str = ""
    description: str = ""
    keywords: list[str] = field(default_factory=list)
    page_component: str = ""
    images: list[str] = field(default_factory=list)
    links_to: list[str] = field(default_factory=list)


_KEYS = tuple(f.name for f in fields(CrawlRecord))
_INT_KEYS = {"id", "page_number"}
_LIST_KEYS = {"keywords", "images", "links_to"}


def make_record(page: ExtractedPage, id: int, page_number: int) -> CrawlRecord:
    if id < 1 or page_number < 1:
        raise ValueError("id and page_number are 1-based")
    return CrawlRecord(
        id=id,
        page_number=page_number,
        url=page.url.render(),
        title=page.title,
        description=page.description,
        keywords=list(page.keywords),
        page_component=page.page_component,
        images=[u.render() for u in page.images],
        links_to=[u.render() for u in page.links],
    )


@contextlib.contextmanager
def _open(target: Destination, mode: str) -> Iterator[IO[str]]:
    if hasattr(target, "write") or hasattr(target, "read"):
        yield target  # type: ignore[misc]
        return
    path = Path(target)
    if "w" in mode:
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open(mode, encoding="utf-8", newline="") as fh:
        yield fh


def write_jsonl(records: Iterable[CrawlRecord], destination: Destination) -> int:
    count = 0
    with _open(destination, "w") as fh:
        for record in records:
            fh.write(json.dumps(asdict(record), ensure_ascii=False) + "\n")
            count += 1
    return count


def write_csv(records: Iterable[CrawlRecord], destination: Destination) -> int:
    count = 0
    with _open(destination, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.id,
                    r.page_number,
                    r.title,
                    r.description,
                    LIST_JOINER.join(r.keywords),
                    r.page_component,
                    LIST_JOINER.join(r.images),
                    LIST_JOINER.join(r.links_to),
                ]
            )
            count += 1
    return count


def _decode(lineno: int, line: str) -> CrawlRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise MalformedRecord(lineno, "not a JSON object")
    if set(obj) != set(_KEYS):
        raise MalformedRecord(lineno, f"keys {sorted(obj)} != {sorted(_KEYS)}")
    for key, value in obj.items():
        if key in _INT_KEYS:
            ok = isinstance(value, int) and not isinstance(value, bool)
        elif key in _LIST_KEYS:
            ok = isinstance(value, list) and all(isinstance(v, str) for v in value)
        else:
            ok = isinstance(value, str)
        if not ok:
            raise MalformedRecord(lineno, f"bad value for {key!r}")
    return CrawlRecord(**obj)


def read_records(source: Destination) -> list[CrawlRecord]:
    """Inverse of :func:`write_jsonl`."""
    with _open(source, "r") as fh:
        text = fh.read()
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [_decode(n, line) for n, line in enumerate(lines, 1)]
