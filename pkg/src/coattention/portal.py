"""Parser for per-day event portal wikitext fixtures.

A fixture file holds one day of events: category header lines followed by
bullet items whose ``[[...]]`` links name the core articles.  Recognized
header forms are ``'''Category'''`` and ``== Category ==``.
"""

from __future__ import annotations

import datetime as dt
import logging
import re

from .records import PORTAL_CATEGORIES, EventRecord, ParseStats
from .redirects import RedirectMap
from .titles import normalize_title

log = logging.getLogger(__name__)

_LINK_RE = re.compile(r"\[\[([^\[\]|]+?)(?:\|([^\[\]]*))?\]\]")
_BOLD_HEADER_RE = re.compile(r"^'''(.+?)'''\s*$")
_EQ_HEADER_RE = re.compile(r"^==+\s*(.+?)\s*==+$")

# Link targets in these namespaces are never articles.
_SKIP_NAMESPACES = {
    "file", "image", "category", "template", "portal", "special", "help",
    "wikipedia", "user", "talk", "media", "wikt", "commons", "w", "s", "q",
}


def _is_article_link(target: str) -> bool:
    prefix, sep, _ = target.partition(":")
    if sep and prefix.strip().lower() in _SKIP_NAMESPACES:
        return False
    return bool(target.strip())


def extract_links(text: str) -> list[str]:
    """Article titles referenced by double-bracket links, in order.

    Section anchors are stripped and display text after a pipe is ignored.
    """
    titles = []
    for match in _LINK_RE.finditer(text):
        target = match.group(1).split("#", 1)[0]
        if _is_article_link(target):
            titles.append(normalize_title(target))
    return titles


def strip_markup(text: str) -> str:
    """Reduce one wikitext line to plain text for event descriptions."""

    def _link_repl(match: re.Match) -> str:
        display = match.group(2)
        if display is not None:
            return display
        return match.group(1).split("#", 1)[0]

    text = _LINK_RE.sub(_link_repl, text)
    text = text.replace("'''", "").replace("''", "")
    return text.strip()


def parse_event_records(
    wikitext: str,
    date: dt.date,
    redirects: RedirectMap | None = None,
    stats: ParseStats | None = None,
) -> list[EventRecord]:
    """Parse one day's portal wikitext into event records.

    Each bullet line under a recognized category header yields one record;
    items with no resolvable article links are dropped with a warning rather
    than aborting the file.
    """
    redirects = redirects or RedirectMap.identity()
    stats = stats if stats is not None else ParseStats()
    records: list[EventRecord] = []
    category: str | None = None
    item_index = 0

    for lineno, line in enumerate(wikitext.splitlines(), 1):
        line = line.rstrip()
        if not line:
            continue
        header = _BOLD_HEADER_RE.match(line) or _EQ_HEADER_RE.match(line)
        if header:
            name = header.group(1).strip()
            if name in PORTAL_CATEGORIES:
                category = name
            else:
                log.warning("%s: line %d: unknown category header %r", date, lineno, name)
                category = None
            continue
        if not line.lstrip().startswith("*"):
            continue
        item_index += 1
        if category is None:
            log.warning("%s: line %d: bullet outside a known category, skipped", date, lineno)
            stats.drop("no_category")
            continue
        body = line.lstrip("*").strip()
        try:
            links = extract_links(body)
        except re.error:  # pragma: no cover - regex is static
            stats.drop("malformed")
            continue
        core = frozenset(redirects.resolve(t) for t in links)
        if not core:
            log.warning("%s: line %d: event item has no article links, dropped", date, lineno)
            stats.drop("no_links")
            continue
        records.append(
            EventRecord(
                event_id=f"{date.isoformat()}-{item_index:02d}",
                date=date,
                category=category,
                description=strip_markup(body),
                core_articles=core,
            )
        )
        stats.kept += 1
    return records
