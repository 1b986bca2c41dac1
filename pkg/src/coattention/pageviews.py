"""Hourly page-view dump aggregation and the on-disk daily series store.

The store is a directory of ``.npy`` chunk matrices (rows = titles, columns =
days of the corpus period) plus a plain-text ``index.tsv`` mapping each title
to its chunk and row, and a ``meta.json`` describing the period.  Missing
(title, day) lookups read as zero.
"""

from __future__ import annotations

import datetime as dt
import gzip
import json
import logging
import re
from collections.abc import Iterable, Iterator
from pathlib import Path

import numpy as np

from .records import ParseStats
from .redirects import RedirectMap
from .titles import normalize_title, title_to_dump_form

log = logging.getLogger(__name__)

DEFAULT_DOMAIN_PREFIXES = ("en.z", "en.m", "en.zero")
_CHUNK_SIZE = 1024
_DUMP_NAME_RE = re.compile(r"pageviews-(\d{8})-(\d{2})0000(?:\.txt|\.gz)?$")


def parse_dump_filename(name: str) -> dt.datetime:
    """Recover the UTC hour encoded in a dump file name."""
    match = _DUMP_NAME_RE.search(name)
    if not match:
        raise ValueError(f"not an hourly dump file name: {name!r}")
    day, hour = match.groups()
    return dt.datetime.strptime(day, "%Y%m%d").replace(hour=int(hour))


def open_dump(path: str | Path) -> Iterator[str]:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            yield from fh
    else:
        with open(path, encoding="utf-8") as fh:
            yield from fh


def iter_dump_files(directory: str | Path) -> Iterator[tuple[dt.datetime, Iterator[str]]]:
    """Yield (hour, line stream) for every dump file under ``directory``."""
    for path in sorted(Path(directory).iterdir()):
        try:
            stamp = parse_dump_filename(path.name)
        except ValueError:
            continue
        yield stamp, open_dump(path)


def aggregate_daily(
    sources: Iterable[tuple[dt.datetime, Iterable[str]]],
    period: tuple[dt.date, dt.date],
    domain_prefixes: Iterable[str] = DEFAULT_DOMAIN_PREFIXES,
    redirects: RedirectMap | None = None,
    stats: ParseStats | None = None,
) -> dict[str, np.ndarray]:
    """Sum hourly ``project title count bytes`` lines into daily series.

    Counts for every alias of a canonical title are merged, hours are summed
    to UTC days, and lines outside ``domain_prefixes`` or the period are
    skipped.  Returns {canonical title: int64 vector over period days}.
    """
    redirects = redirects or RedirectMap.identity()
    stats = stats if stats is not None else ParseStats()
    prefixes = set(domain_prefixes)
    start, end = period
    n_days = (end - start).days + 1
    if n_days <= 0:
        raise ValueError("empty aggregation period")
    series: dict[str, np.ndarray] = {}

    for stamp, lines in sources:
        day_index = (stamp.date() - start).days
        if day_index < 0 or day_index >= n_days:
            stats.drop("outside_period")
            continue
        for line in lines:
            parts = line.split()
            if len(parts) != 4:
                stats.drop("malformed")
                continue
            project, raw_title, raw_count, _bytes = parts
            if project not in prefixes:
                stats.drop("prefix")
                continue
            try:
                count = int(raw_count)
            except ValueError:
                stats.drop("malformed")
                continue
            if count < 0:
                stats.drop("malformed")
                continue
            title = redirects.resolve(normalize_title(raw_title))
            if not title:
                stats.drop("malformed")
                continue
            vec = series.get(title)
            if vec is None:
                vec = np.zeros(n_days, dtype=np.int64)
                series[title] = vec
            vec[day_index] += count
            stats.kept += 1
    return series


class DailySeriesStore:
    """Read side of the chunked on-disk daily page-view store."""

    def __init__(
        self,
        root: Path,
        start: dt.date,
        n_days: int,
        index: dict[str, tuple[int, int]],
        prefixes: tuple[str, ...],
    ):
        self.root = root
        self.start = start
        self.n_days = n_days
        self.prefixes = prefixes
        self._index = index
        self._chunks: dict[int, np.ndarray] = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def build(
        cls,
        root: str | Path,
        series: dict[str, np.ndarray],
        period: tuple[dt.date, dt.date],
        prefixes: Iterable[str] = DEFAULT_DOMAIN_PREFIXES,
        chunk_size: int = _CHUNK_SIZE,
    ) -> "DailySeriesStore":
        """Write a store directory from in-memory daily series (single writer)."""
        root = Path(root)
        (root / "chunks").mkdir(parents=True, exist_ok=True)
        start, end = period
        n_days = (end - start).days + 1
        titles = sorted(series)
        index: dict[str, tuple[int, int]] = {}
        for chunk_id, lo in enumerate(range(0, len(titles), chunk_size)):
            block = titles[lo : lo + chunk_size]
            matrix = np.zeros((len(block), n_days), dtype=np.int64)
            for row, title in enumerate(block):
                vec = series[title]
                if len(vec) != n_days:
                    raise ValueError(f"series for {title!r} has length {len(vec)} != {n_days}")
                matrix[row] = vec
                index[title] = (chunk_id, row)
            np.save(root / "chunks" / f"chunk-{chunk_id:05d}.npy", matrix)
        with open(root / "index.tsv", "w", encoding="utf-8") as fh:
            for title in titles:
                chunk_id, row = index[title]
                fh.write(f"{title}\t{chunk_id}\t{row}\n")
        meta = {
            "start": start.isoformat(),
            "n_days": n_days,
            "chunk_size": chunk_size,
            "dtype": "int64",
            "prefixes": sorted(prefixes),
            "version": 1,
        }
        with open(root / "meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return cls(root, start, n_days, index, tuple(sorted(prefixes)))

    @classmethod
    def open(cls, root: str | Path) -> "DailySeriesStore":
        root = Path(root)
        with open(root / "meta.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        index: dict[str, tuple[int, int]] = {}
        with open(root / "index.tsv", encoding="utf-8") as fh:
            for line in fh:
                title, chunk_id, row = line.rstrip("\n").split("\t")
                index[title] = (int(chunk_id), int(row))
        return cls(
            root,
            dt.date.fromisoformat(meta["start"]),
            int(meta["n_days"]),
            index,
            tuple(meta["prefixes"]),
        )

    # -- access ------------------------------------------------------------

    def _chunk(self, chunk_id: int) -> np.ndarray:
        matrix = self._chunks.get(chunk_id)
        if matrix is None:
            matrix = np.load(self.root / "chunks" / f"chunk-{chunk_id:05d}.npy", mmap_mode="r")
            self._chunks[chunk_id] = matrix
        return matrix

    def __contains__(self, title: str) -> bool:
        return title in self._index

    def titles(self) -> Iterable[str]:
        return self._index.keys()

    def get(self, title: str, day: dt.date) -> int:
        """Views for (title, day); absent keys read as 0."""
        loc = self._index.get(title)
        if loc is None:
            return 0
        offset = (day - self.start).days
        if offset < 0 or offset >= self.n_days:
            return 0
        chunk_id, row = loc
        return int(self._chunk(chunk_id)[row, offset])

    def series(self, title: str, start: dt.date, n_days: int) -> np.ndarray:
        """A daily window as int64, zero-filled outside stored coverage."""
        out = np.zeros(n_days, dtype=np.int64)
        loc = self._index.get(title)
        if loc is None:
            return out
        chunk_id, row = loc
        stored = self._chunk(chunk_id)[row]
        lo = (start - self.start).days
        src_lo = max(lo, 0)
        src_hi = min(lo + n_days, self.n_days)
        if src_lo < src_hi:
            out[src_lo - lo : src_hi - lo] = stored[src_lo:src_hi]
        return out

    def export_tsv(self, path: str | Path) -> None:
        """Debug export: one ``title<TAB>date<TAB>views`` row per nonzero day."""
        with open(path, "w", encoding="utf-8") as fh:
            for title in sorted(self._index):
                chunk_id, row = self._index[title]
                vec = self._chunk(chunk_id)[row]
                for offset in np.flatnonzero(vec):
                    day = self.start + dt.timedelta(days=int(offset))
                    fh.write(f"{title_to_dump_form(title)}\t{day.isoformat()}\t{int(vec[offset])}\n")
