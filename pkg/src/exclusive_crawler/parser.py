"""Extract title, meta tags, images, links and searchable text from HTML."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from bs4 import BeautifulSoup, NavigableString

from .urls import NormalizedUrl, UrlError, normalize

Rational = Union[Fraction, int, float, str]

DEFAULT_TRUNCATION = Fraction(1, 3)

_INVISIBLE = {"script", "style", "head", "title", "noscript", "template"}
_WS = re.compile(r"\s+")


@dataclass
class ExtractedPage:
    url: NormalizedUrl
    title: str = ""
    description: str = ""
    keywords: list[str] = field(default_factory=list)
    images: list[NormalizedUrl] = field(default_factory=list)
    links: list[NormalizedUrl] = field(default_factory=list)
    page_component: str = ""


def as_fraction(value: Rational) -> Fraction:
    """Exact rational for ``value``; floats are read by their decimal repr."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def truncate_component(text: str, fraction: Rational) -> str:
    """Keep the first ``ceil(len(text) * fraction)`` characters of ``text``."""
    frac = as_fraction(fraction)
    if not 0 < frac <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if frac == 1:
        return text
    return text[: math.ceil(len(text) * frac)]


def split_keywords(meta_value: str) -> list[str]:
    out: list[str] = []
    for part in meta_value.split(","):
        part = part.strip()
        if part and part not in out:
            out.append(part)
    return out


def _meta_content(soup: BeautifulSoup, name: str) -> str:
    for tag in soup.find_all("meta"):
        if str(tag.get("name", "")).strip().lower() == name:
            return str(tag.get("content", "")).strip()
    return ""


def _resolve(value, base: NormalizedUrl):
    if not value:
        return None
    try:
        return normalize(str(value), base)
    except UrlError:
        return None


def visible_text(soup: BeautifulSoup) -> str:
    chunks = []
    for node in soup.find_all(string=True):
        # skips Comment, Doctype, CData and other NavigableString subclasses
        if type(node) is not NavigableString:
            continue
        if any(parent.name in _INVISIBLE for parent in node.parents):
            continue
        chunks.append(str(node))
    return _WS.sub(" ", " ".join(chunks)).strip()


def extract_page(
    html: bytes,
    base: NormalizedUrl,
    truncation_fraction: Rational = DEFAULT_TRUNCATION,
) -> ExtractedPage:
    text = html.decode("utf-8", errors="replace") if isinstance(html, bytes) else html
    soup = BeautifulSoup(text, "html.parser")

    title_tag = soup.find("title")
    title = _WS.sub(" ", title_tag.get_text()).strip() if title_tag else ""

    images = [u for u in (_resolve(img.get("src"), base) for img in soup.find_all("img")) if u]

    links: list[NormalizedUrl] = []
    seen = set()
    for anchor in soup.find_all("a", href=True):
        url = _resolve(anchor["href"], base)
        if url is not None and url not in seen:
            seen.add(url)
            links.append(url)

    return ExtractedPage(
        url=base,
        title=title,
        description=_meta_content(soup, "description"),
        keywords=split_keywords(_meta_content(soup, "keywords")),
        images=images,
        links=links,
        page_component=truncate_component(visible_text(soup), truncation_fraction),
    )
