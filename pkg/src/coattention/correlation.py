"""Rolling view-series correlations on linked article pairs, and the
flattened multilayer graph they induce.

Layer ``l`` covers window days ``l .. l + window - 1`` (a trailing window),
so a 61-day series with a 7-day window yields 55 layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eventnets import EventNetwork
from .graph import WeightedGraph

CORRELATION_WINDOW = 7
DEFAULT_TAU = 1.0

LayerNode = tuple[str, int]  # (article, layer)


@dataclass(frozen=True)
class TemporalEdgeWeights:
    """Per linked pair, the rolling Pearson correlation across layers.

    Pairs are unordered (correlation is symmetric; link direction is
    discarded) and stored under the sorted (u, v) key.
    """

    articles: list[str]
    values: dict[tuple[str, str], np.ndarray]
    window: int

    @property
    def n_layers(self) -> int:
        for vec in self.values.values():
            return len(vec)
        return 0

    def get(self, u: str, v: str) -> np.ndarray | None:
        return self.values.get((u, v) if u <= v else (v, u))


def rolling_correlations(
    network: EventNetwork, window: int = CORRELATION_WINDOW
) -> TemporalEdgeWeights:
    """Pearson correlations over a rolling window for hyperlink-adjacent pairs.

    Only pairs adjacent in either click direction are computed (the sparsity
    mask of the hyperlink structure).  A zero-variance window on either side
    yields the defined degenerate value 0.
    """
    length = network.window_length
    if window < 2 or window > length:
        raise ValueError(f"window {window} invalid for series length {length}")
    articles = network.graph.nodes()
    index = {a: i for i, a in enumerate(articles)}
    matrix = np.empty((len(articles), length), dtype=np.float64)
    for article, i in index.items():
        series = network.series.get(article)
        if series is None or len(series) != length:
            raise ValueError(f"article {article!r} lacks a {length}-day series")
        matrix[i] = series

    windows = np.lib.stride_tricks.sliding_window_view(matrix, window, axis=1)
    centered = windows - windows.mean(axis=2, keepdims=True)
    norms = np.sqrt((centered**2).sum(axis=2))

    values: dict[tuple[str, str], np.ndarray] = {}
    for u, v in network.graph.adjacent_pairs():
        i, j = index[u], index[v]
        cov = (centered[i] * centered[j]).sum(axis=1)
        denom = norms[i] * norms[j]
        with np.errstate(invalid="ignore", divide="ignore"):
            rho = np.where(denom > 0.0, cov / np.where(denom > 0.0, denom, 1.0), 0.0)
        rho = np.clip(rho, -1.0, 1.0)
        key = (u, v) if u <= v else (v, u)
        values[key] = rho
    return TemporalEdgeWeights(articles=articles, values=values, window=window)


@dataclass(frozen=True)
class FlatMultilayerGraph:
    """A multilayer correlation network flattened to one static graph.

    Node copies are (article, layer) tuples; intralayer edges carry the
    layer's correlation, and each article's consecutive copies are chained
    by interlayer edges of weight tau.
    """

    graph: WeightedGraph
    articles: list[str]
    n_layers: int
    tau: float

    @staticmethod
    def layers_covering_day(day_index: int, n_layers: int, window: int) -> range:
        """Layers whose trailing window contains the given window day."""
        lo = max(0, day_index - window + 1)
        hi = min(n_layers - 1, day_index)
        return range(lo, hi + 1)


def flatten_multilayer(
    weights: TemporalEdgeWeights, tau: float = DEFAULT_TAU
) -> FlatMultilayerGraph:
    """Build the static node-copy graph from rolling correlations.

    Every article appears once per layer; negative correlations pass through
    unchanged.  There are no cross-article interlayer edges.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    n_layers = weights.n_layers
    if n_layers == 0:
        raise ValueError("no correlation layers to flatten")
    articles = sorted(weights.articles)
    nodes: list[LayerNode] = [(a, layer) for layer in range(n_layers) for a in articles]
    edges: list[tuple[LayerNode, LayerNode, float]] = []
    for (u, v), rho in sorted(weights.values.items()):
        for layer in range(n_layers):
            edges.append(((u, layer), (v, layer), float(rho[layer])))
    for article in articles:
        for layer in range(n_layers - 1):
            edges.append(((article, layer), (article, layer + 1), tau))
    graph = WeightedGraph(edges, directed=False, nodes=nodes)
    return FlatMultilayerGraph(graph=graph, articles=articles, n_layers=n_layers, tau=tau)


def dump_temporal_weights(weights: TemporalEdgeWeights, path: str) -> None:
    """Debug export: one ``u<TAB>v<TAB>layer<TAB>rho`` row per pair-layer."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#articles\t" + "\t".join(weights.articles) + "\n")
        fh.write(f"#window\t{weights.window}\n")
        for (u, v), rho in sorted(weights.values.items()):
            for layer, value in enumerate(rho):
                fh.write(f"{u}\t{v}\t{layer}\t{float(value)!r}\n")


def load_temporal_weights(path: str) -> TemporalEdgeWeights:
    """Read back a :func:`dump_temporal_weights` file, losslessly."""
    articles: list[str] = []
    window = CORRELATION_WINDOW
    rows: dict[tuple[str, str], dict[int, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#articles\t"):
                articles = line.split("\t")[1:]
                continue
            if line.startswith("#window\t"):
                window = int(line.split("\t")[1])
                continue
            u, v, layer, value = line.split("\t")
            rows.setdefault((u, v), {})[int(layer)] = float(value)
    values = {}
    for key, layer_map in rows.items():
        vec = np.zeros(max(layer_map) + 1)
        for layer, value in layer_map.items():
            vec[layer] = value
        values[key] = vec
    return TemporalEdgeWeights(articles=articles, values=values, window=window)
