"""Event reactions: communities that hold a core article and overlap the
event day, plus the excess-view and structural-similarity measures used to
compare detection approaches.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from collections.abc import Iterable, Sequence

import numpy as np

from .community import Partition, leiden_cpm
from .correlation import FlatMultilayerGraph
from .eventnets import EventNetwork
from .graph import pagerank, weighted_jaccard

log = logging.getLogger(__name__)

STRUCTURAL_RESOLUTION = 0.030
NAVIGATIONAL_RESOLUTION = 54.6
SIMILARITY_GRID_BOUNDS = (1.23e-4, 1.0)
EXCESS_GATE = 3.0
EXCESS_DAYS = 7  # event day plus the following six


@dataclass
class EventReaction:
    """One temporal community projected onto its article set."""

    event_id: str
    reaction_id: str
    articles: frozenset[str]
    layer_span: tuple[int, int]
    pagerank_weights: dict[str, float]
    contains_core: bool
    structural_similarity: float | None = None


@dataclass(frozen=True)
class ComparisonResult:
    """Excess views captured by each detection approach on one event."""

    event_id: str
    excess_temporal: float
    excess_structural: float
    excess_navigational: float


def subgraph_pagerank(
    articles: Iterable[str],
    network: EventNetwork,
    weighted: bool = True,
    damping: float = 0.85,
) -> dict[str, float]:
    """PageRank over the induced click subgraph of the given articles.

    ``weighted=False`` drops the click counts and ranks on pure structure.
    """
    sub = network.graph.subgraph(articles)
    if not weighted:
        edges = sorted((u, v, 1.0) for u, v, _ in sub.edges())
        sub = type(sub)(edges, directed=True, nodes=sub.nodes())
    if sub.n_nodes == 0:
        return {}
    return pagerank(sub, damping=damping)


def extract_reactions(
    partition: Partition,
    n_layers: int,
    network: EventNetwork,
    pagerank_weighted: bool = True,
) -> list[EventReaction]:
    """Project temporal communities to article sets and keep the reactions.

    A community survives iff it contains at least one core article and some
    member copy sits in a layer whose window covers the event day.  An
    article belongs to the reaction if any of its copies does.
    """
    window = network.window_length - n_layers + 1
    overlap = set(
        FlatMultilayerGraph.layers_covering_day(
            network.event_day_index, n_layers, window
        )
    )
    members: dict[int, list[tuple[str, int]]] = {}
    for (article, layer), comm in partition.membership.items():
        members.setdefault(comm, []).append((article, layer))

    core = network.event.core_articles
    reactions: list[EventReaction] = []
    for comm in sorted(members):
        copies = members[comm]
        articles = frozenset(a for a, _ in copies)
        if not articles & core:
            continue
        layers = [layer for _, layer in copies]
        if not any(layer in overlap for layer in layers):
            continue
        reaction = EventReaction(
            event_id=network.event.event_id,
            reaction_id=f"{network.event.event_id}/r{len(reactions):03d}",
            articles=articles,
            layer_span=(min(layers), max(layers)),
            pagerank_weights=subgraph_pagerank(articles, network, pagerank_weighted),
            contains_core=True,
        )
        reactions.append(reaction)
    return reactions


def scaled_series(articles: Iterable[str], network: EventNetwork) -> np.ndarray:
    """Total member views, centred on the median and scaled to the IQR.

    A zero IQR (flat totals) yields the all-zero series by definition.
    """
    total = np.zeros(network.window_length, dtype=np.float64)
    for article in articles:
        series = network.series.get(article)
        if series is not None:
            total += series
    iqr = float(np.percentile(total, 75) - np.percentile(total, 25))
    if iqr == 0.0:
        return np.zeros_like(total)
    return (total - float(np.median(total))) / iqr


def excess_views(
    article_sets: Iterable[Iterable[str]],
    network: EventNetwork,
    gate: float = EXCESS_GATE,
) -> float:
    """Views above per-article medians over the event week, summed across
    communities whose scaled totals exceed the gate near the event day.
    """
    t0 = network.event_day_index
    total = 0.0
    for articles in article_sets:
        articles = list(articles)
        scaled = scaled_series(articles, network)
        lo = max(0, t0 - 1)
        if scaled[lo : t0 + 2].max(initial=-np.inf) <= gate:
            continue
        for article in articles:
            series = network.series.get(article)
            if series is None:
                continue
            week = series[t0 : t0 + EXCESS_DAYS].astype(np.float64)
            total += float(week.sum() - len(week) * np.median(series))
    return total


def static_partitions(
    network: EventNetwork,
    mode: str,
    resolution: float | None = None,
    seed: int = 0,
) -> Partition:
    """Leiden/CPM on the static undirected projection of the event graph.

    ``structural`` ignores click weights entirely; ``navigational`` uses the
    summed two-way click volume.  Default resolutions are the operating
    points selected by the stability sweeps.
    """
    if mode == "structural":
        graph = network.graph.undirected_projection("unit")
        resolution = STRUCTURAL_RESOLUTION if resolution is None else resolution
    elif mode == "navigational":
        graph = network.graph.undirected_projection("sum")
        resolution = NAVIGATIONAL_RESOLUTION if resolution is None else resolution
    else:
        raise ValueError(f"unknown static mode {mode!r}")
    return leiden_cpm(graph, resolution, seed)


def core_communities(partition: Partition, network: EventNetwork) -> list[frozenset[str]]:
    """Article sets of partition communities that contain a core article."""
    groups: dict[int, set[str]] = {}
    for article, comm in partition.membership.items():
        groups.setdefault(comm, set()).add(article)
    core = network.event.core_articles
    return [frozenset(g) for _, g in sorted(groups.items()) if g & core]


class StaticCommunityIndex:
    """Per-event cache of static partitions across the similarity grid.

    Building the grid of partitions and per-community PageRank vectors once
    lets every reaction of the event reuse them.
    """

    def __init__(
        self,
        network: EventNetwork,
        grid: Sequence[float],
        seed: int = 0,
        pagerank_weighted: bool = True,
    ):
        self.network = network
        self.grid = list(grid)
        self.seed = seed
        self.pagerank_weighted = pagerank_weighted
        self._vectors: list[dict[str, float]] | None = None

    def community_vectors(self) -> list[dict[str, float]]:
        if self._vectors is None:
            vectors: list[dict[str, float]] = []
            structural = self.network.graph.undirected_projection("unit")
            for k, resolution in enumerate(self.grid):
                partition = leiden_cpm(structural, resolution, seed=self.seed * 7919 + k)
                groups: dict[int, set[str]] = {}
                for article, comm in partition.membership.items():
                    groups.setdefault(comm, set()).add(article)
                for _, group in sorted(groups.items()):
                    vectors.append(
                        subgraph_pagerank(group, self.network, self.pagerank_weighted)
                    )
            self._vectors = vectors
        return self._vectors


def structural_similarity(
    reaction: EventReaction,
    static_index: StaticCommunityIndex,
) -> float:
    """Best PageRank-weighted Jaccard match against any static community
    across the whole resolution grid.
    """
    best = 0.0
    for vector in static_index.community_vectors():
        score = weighted_jaccard(reaction.pagerank_weights, vector)
        if score > best:
            best = score
    return best


def similarity_grid(points: int = 40) -> list[float]:
    from .community import geometric_grid

    low, high = SIMILARITY_GRID_BOUNDS
    return geometric_grid(low, high, points)


def score_reactions(
    reactions: Sequence[EventReaction],
    network: EventNetwork,
    grid: Sequence[float] | None = None,
    seed: int = 0,
    pagerank_weighted: bool = True,
) -> None:
    """Fill in structural similarity for every reaction of one event."""
    index = StaticCommunityIndex(
        network, grid if grid is not None else similarity_grid(), seed, pagerank_weighted
    )
    for reaction in reactions:
        reaction.structural_similarity = structural_similarity(reaction, index)


def compare_approaches(
    network: EventNetwork,
    temporal_reactions: Sequence[EventReaction],
    structural_resolution: float = STRUCTURAL_RESOLUTION,
    navigational_resolution: float = NAVIGATIONAL_RESOLUTION,
    gate: float = EXCESS_GATE,
    seed: int = 0,
) -> ComparisonResult:
    """Excess views captured by the temporal, structural, and navigational
    approaches on one event.
    """
    temporal = excess_views((r.articles for r in temporal_reactions), network, gate)
    struc_part = static_partitions(network, "structural", structural_resolution, seed)
    nav_part = static_partitions(network, "navigational", navigational_resolution, seed)
    structural = excess_views(core_communities(struc_part, network), network, gate)
    navigational = excess_views(core_communities(nav_part, network), network, gate)
    return ComparisonResult(
        event_id=network.event.event_id,
        excess_temporal=temporal,
        excess_structural=structural,
        excess_navigational=navigational,
    )
