"""Per-event article networks: click-weighted graph plus view series window."""

from __future__ import annotations

import datetime as dt
import json
import logging
from dataclasses import dataclass, field
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from .clickstream import ClickIndex
from .graph import WeightedGraph
from .pageviews import DailySeriesStore
from .records import EventRecord, month_of

log = logging.getLogger(__name__)

WINDOW_LENGTH = 61  # days, event date at index 30
EDGE_THRESHOLD = 100.0  # surviving edges must be strictly heavier


class DegenerateEventError(RuntimeError):
    """No edge survives thresholding; the event has no usable network."""


@dataclass
class EventNetwork:
    """The directed click graph and 61-day view series around one event."""

    event: EventRecord
    graph: WeightedGraph
    window_start: dt.date
    window_length: int = WINDOW_LENGTH
    series: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def event_day_index(self) -> int:
        return self.window_length // 2

    def window_days(self) -> list[dt.date]:
        return [self.window_start + dt.timedelta(days=i) for i in range(self.window_length)]

    def core_present(self) -> set[str]:
        return {a for a in self.event.core_articles if a in self.graph}


def window_month_weights(
    date: dt.date, window_length: int = WINDOW_LENGTH
) -> list[tuple[str, float]]:
    """Fraction of the event window falling in each calendar month.

    Fractions are day counts over the window length, sum to 1, and touch at
    most three months for the standard 61-day window.
    """
    half = window_length // 2
    start = date - dt.timedelta(days=half)
    counts: dict[str, int] = {}
    for offset in range(window_length):
        month = month_of(start + dt.timedelta(days=offset))
        counts[month] = counts.get(month, 0) + 1
    return [(month, counts[month] / window_length) for month in sorted(counts)]


def build_event_network(
    event: EventRecord,
    clicks: Mapping[str, ClickIndex],
    threshold: float = EDGE_THRESHOLD,
    window_length: int = WINDOW_LENGTH,
) -> EventNetwork:
    """Assemble the event's article graph from monthly click indexes.

    Nodes are the core articles plus every in/out click neighbor; each edge
    weight is the month-fraction-weighted average of monthly counts.  Edges
    at or below ``threshold`` are removed and isolated nodes dropped, which
    may delete core articles.  Raises :class:`DegenerateEventError` when
    nothing survives.
    """
    month_weights = window_month_weights(event.date, window_length)
    missing = [m for m, _ in month_weights if m not in clicks]
    if missing:
        raise KeyError(f"no click data for months: {', '.join(missing)}")

    nodes: set[str] = set(event.core_articles)
    for month, _ in month_weights:
        index = clicks[month]
        for core in event.core_articles:
            nodes.update(index.neighbors(core))

    weights: dict[tuple[str, str], float] = {}
    for month, fraction in month_weights:
        for source, target, count in clicks[month].pairs_among(nodes):
            key = (source, target)
            weights[key] = weights.get(key, 0.0) + fraction * count

    surviving = sorted(
        (u, v, w) for (u, v), w in weights.items() if w > threshold and u != v
    )
    if not surviving:
        raise DegenerateEventError(f"event {event.event_id}: no edge above {threshold}")
    graph = WeightedGraph(surviving, directed=True)
    start = event.date - dt.timedelta(days=window_length // 2)
    return EventNetwork(event=event, graph=graph, window_start=start, window_length=window_length)


def attach_series(network: EventNetwork, store: DailySeriesStore) -> EventNetwork:
    """Fill in the per-article daily view vectors over the event window.

    Articles absent from the store get all-zero vectors with a warning.
    """
    series: dict[str, np.ndarray] = {}
    for article in network.graph.nodes():
        vec = store.series(article, network.window_start, network.window_length)
        if article not in store:
            log.warning(
                "event %s: article %r has no stored page views, using zeros",
                network.event.event_id,
                article,
            )
        series[article] = vec
    network.series = series
    return network


# -- serialization ----------------------------------------------------------


def save_event_network(network: EventNetwork, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    network.graph.to_tsv(directory / "edges.tsv")
    with open(directory / "series.tsv", "w", encoding="utf-8") as fh:
        for article in sorted(network.series):
            values = "\t".join(str(int(v)) for v in network.series[article])
            fh.write(f"{article}\t{values}\n")
    manifest = {
        "event_id": network.event.event_id,
        "date": network.event.date.isoformat(),
        "category": network.event.category,
        "description": network.event.description,
        "core_articles": sorted(network.event.core_articles),
        "window_start": network.window_start.isoformat(),
        "window_length": network.window_length,
        "n_nodes": network.graph.n_nodes,
        "n_edges": network.graph.n_edges,
    }
    with open(directory / "event.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_event_network(directory: str | Path) -> EventNetwork:
    directory = Path(directory)
    with open(directory / "event.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    event = EventRecord(
        event_id=manifest["event_id"],
        date=dt.date.fromisoformat(manifest["date"]),
        category=manifest["category"],
        description=manifest["description"],
        core_articles=frozenset(manifest["core_articles"]),
    )
    graph = WeightedGraph.from_tsv(directory / "edges.tsv", directed=True)
    network = EventNetwork(
        event=event,
        graph=graph,
        window_start=dt.date.fromisoformat(manifest["window_start"]),
        window_length=int(manifest["window_length"]),
    )
    series: dict[str, np.ndarray] = {}
    with open(directory / "series.tsv", encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            series[parts[0]] = np.array([int(x) for x in parts[1:]], dtype=np.int64)
    network.series = series
    return network
