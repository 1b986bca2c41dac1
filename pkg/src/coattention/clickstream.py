"""Clickstream TSV parsing and the per-month navigation index."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator
from pathlib import Path

from .records import ClickRecord, ParseStats
from .redirects import RedirectMap
from .titles import normalize_title, title_to_dump_form

log = logging.getLogger(__name__)

MIN_MONTHLY_CLICKS = 10  # upstream inclusion threshold, re-validated here


def parse_clickstream(
    lines: Iterable[str],
    month: str,
    redirects: RedirectMap | None = None,
    stats: ParseStats | None = None,
) -> Iterator[ClickRecord]:
    """Stream ``prev<TAB>curr<TAB>type<TAB>n`` rows into click records.

    Keeps only article-to-article ``link`` rows: pseudo referrers
    (``other-*``), the main page, and malformed rows are dropped with
    diagnostics.
    """
    redirects = redirects or RedirectMap.identity()
    stats = stats if stats is not None else ParseStats()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            log.debug("clickstream %s line %d: truncated row", month, lineno)
            stats.drop("malformed")
            continue
        prev, curr, link_type, raw_count = parts
        if link_type != "link":
            stats.drop("type")
            continue
        if prev.startswith("other-"):
            stats.drop("pseudo_referrer")
            continue
        try:
            count = int(raw_count)
        except ValueError:
            log.debug("clickstream %s line %d: non-integer count %r", month, lineno, raw_count)
            stats.drop("malformed")
            continue
        source = redirects.resolve(normalize_title(prev))
        target = redirects.resolve(normalize_title(curr))
        if source == "Main Page":
            stats.drop("main_page")
            continue
        if count <= MIN_MONTHLY_CLICKS:
            stats.drop("low_count")
            continue
        if not source or not target:
            stats.drop("malformed")
            continue
        stats.kept += 1
        yield ClickRecord(source=source, target=target, month=month, count=count)


class ClickIndex:
    """In-memory directed navigation graph for one month of clicks."""

    def __init__(self, month: str):
        self.month = month
        self._out: dict[str, dict[str, int]] = {}
        self._in: dict[str, dict[str, int]] = {}

    def add(self, record: ClickRecord) -> None:
        self._out.setdefault(record.source, {})
        self._out[record.source][record.target] = (
            self._out[record.source].get(record.target, 0) + record.count
        )
        self._in.setdefault(record.target, {})
        self._in[record.target][record.source] = (
            self._in[record.target].get(record.source, 0) + record.count
        )

    @classmethod
    def from_records(cls, records: Iterable[ClickRecord], month: str) -> "ClickIndex":
        index = cls(month)
        for record in records:
            index.add(record)
        return index

    def neighbors(self, title: str) -> set[str]:
        """Union of in- and out-neighbors of ``title``."""
        found: set[str] = set()
        found.update(self._out.get(title, ()))
        found.update(self._in.get(title, ()))
        return found

    def count(self, source: str, target: str) -> int:
        return self._out.get(source, {}).get(target, 0)

    def pairs_among(self, nodes: set[str]) -> Iterator[tuple[str, str, int]]:
        """All directed (source, target, count) links inside ``nodes``."""
        for source in nodes:
            targets = self._out.get(source)
            if not targets:
                continue
            for target, count in targets.items():
                if target in nodes:
                    yield source, target, count


def load_month_tsv(
    path: str | Path,
    month: str,
    redirects: RedirectMap | None = None,
    stats: ParseStats | None = None,
) -> ClickIndex:
    with open(path, encoding="utf-8") as fh:
        return ClickIndex.from_records(parse_clickstream(fh, month, redirects, stats), month)


def write_month_tsv(path: str | Path, records: Iterable[ClickRecord]) -> None:
    """Write canonicalized records back out in the raw 4-column layout."""
    rows = sorted((r.source, r.target, r.count) for r in records)
    with open(path, "w", encoding="utf-8") as fh:
        for source, target, count in rows:
            fh.write(
                f"{title_to_dump_form(source)}\t{title_to_dump_form(target)}\tlink\t{count}\n"
            )
