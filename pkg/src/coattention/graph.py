"""Weighted graph primitives: construction, PageRank, weighted Jaccard.

Graphs are immutable after construction and safe for concurrent readers.
Node order is the first-seen order of construction, which keeps every
derived artifact deterministic.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Iterator, Mapping
from pathlib import Path

import numpy as np

Node = Hashable


class PageRankConvergenceError(RuntimeError):
    """Power iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_iterate: dict[Node, float]):
        super().__init__(message)
        self.last_iterate = last_iterate


class WeightedGraph:
    """A finite weighted graph, directed or undirected.

    Self-loops are dropped at construction and duplicate edges are summed.
    Undirected graphs store each edge once (canonical node-order direction)
    but expose symmetric adjacency.
    """

    def __init__(
        self,
        edges: Iterable[tuple[Node, Node, float]] = (),
        *,
        directed: bool = False,
        nodes: Iterable[Node] = (),
    ):
        self.directed = directed
        self._index: dict[Node, int] = {}
        self._labels: list[Node] = []
        self._adj: list[dict[int, float]] = []  # out-adjacency (symmetric if undirected)
        self._in: list[dict[int, float]] | None = [] if directed else None
        self.self_loops_dropped = 0

        for node in nodes:
            self._intern(node)
        for u, v, w in edges:
            w = float(w)
            if not math.isfinite(w):
                raise ValueError(f"non-finite edge weight on ({u!r}, {v!r})")
            iu = self._intern(u)
            iv = self._intern(v)
            if iu == iv:
                self.self_loops_dropped += 1
                continue
            self._adj[iu][iv] = self._adj[iu].get(iv, 0.0) + w
            if self.directed:
                assert self._in is not None
                self._in[iv][iu] = self._in[iv].get(iu, 0.0) + w
            else:
                self._adj[iv][iu] = self._adj[iv].get(iu, 0.0) + w

    def _intern(self, node: Node) -> int:
        idx = self._index.get(node)
        if idx is None:
            idx = len(self._labels)
            self._index[node] = idx
            self._labels.append(node)
            self._adj.append({})
            if self._in is not None:
                self._in.append({})
        return idx

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self._labels)

    @property
    def n_edges(self) -> int:
        total = sum(len(nbrs) for nbrs in self._adj)
        return total if self.directed else total // 2

    def nodes(self) -> list[Node]:
        return list(self._labels)

    def __contains__(self, node: Node) -> bool:
        return node in self._index

    def has_edge(self, u: Node, v: Node) -> bool:
        iu = self._index.get(u)
        iv = self._index.get(v)
        return iu is not None and iv is not None and iv in self._adj[iu]

    def weight(self, u: Node, v: Node) -> float:
        iu = self._index.get(u)
        iv = self._index.get(v)
        if iu is None or iv is None:
            return 0.0
        return self._adj[iu].get(iv, 0.0)

    def out_neighbors(self, u: Node) -> dict[Node, float]:
        iu = self._index[u]
        return {self._labels[j]: w for j, w in self._adj[iu].items()}

    def degree(self, u: Node) -> int:
        return len(self._adj[self._index[u]])

    def edges(self) -> Iterator[tuple[Node, Node, float]]:
        """Each edge once, in deterministic index order."""
        for i, nbrs in enumerate(self._adj):
            for j in sorted(nbrs):
                if self.directed or i < j:
                    yield self._labels[i], self._labels[j], nbrs[j]

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())

    def adjacency_ints(self) -> tuple[list[Node], list[list[tuple[int, float]]]]:
        """Integer-indexed symmetric adjacency for optimizer hot loops."""
        adj = [sorted(nbrs.items()) for nbrs in self._adj]
        return list(self._labels), adj

    # -- derived graphs ------------------------------------------------------

    def subgraph(self, keep: Iterable[Node]) -> "WeightedGraph":
        """Induced subgraph, preserving directedness and relative node order."""
        keep_idx = {self._index[n] for n in keep if n in self._index}
        node_list = [self._labels[i] for i in sorted(keep_idx)]
        edges = (
            (self._labels[i], self._labels[j], w)
            for i in sorted(keep_idx)
            for j, w in sorted(self._adj[i].items())
            if j in keep_idx and (self.directed or i < j)
        )
        return WeightedGraph(edges, directed=self.directed, nodes=node_list)

    def undirected_projection(self, mode: str = "sum") -> "WeightedGraph":
        """Collapse edge directions.

        ``sum``: weight = sum of both directed weights (navigation volume).
        ``unit``: weight 1 wherever any directed edge exists (pure structure).
        """
        if mode not in ("sum", "unit"):
            raise ValueError(f"unknown projection mode {mode!r}")
        pair_weight: dict[tuple[int, int], float] = {}
        for i, nbrs in enumerate(self._adj):
            for j, w in nbrs.items():
                if not self.directed and i > j:
                    continue
                key = (i, j) if i < j else (j, i)
                pair_weight[key] = pair_weight.get(key, 0.0) + w
        edges = (
            (self._labels[i], self._labels[j], 1.0 if mode == "unit" else w)
            for (i, j), w in sorted(pair_weight.items())
        )
        return WeightedGraph(edges, directed=False, nodes=self._labels)

    def adjacent_pairs(self) -> list[tuple[Node, Node]]:
        """Unordered node pairs joined by an edge in either direction."""
        seen: set[tuple[int, int]] = set()
        for i, nbrs in enumerate(self._adj):
            for j in nbrs:
                seen.add((i, j) if i < j else (j, i))
        return [(self._labels[i], self._labels[j]) for i, j in sorted(seen)]

    # -- serialization -------------------------------------------------------

    def to_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for u, v, w in self.edges():
                fh.write(f"{u}\t{v}\t{w!r}\n")

    @classmethod
    def from_tsv(cls, path: str | Path, *, directed: bool) -> "WeightedGraph":
        def _iter() -> Iterator[tuple[str, str, float]]:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    u, v, w = line.split("\t")
                    yield u, v, float(w)

        return cls(_iter(), directed=directed)


def pagerank(
    graph: WeightedGraph,
    damping: float = 0.85,
    tolerance: float = 1e-9,
    max_iterations: int = 1000,
) -> dict[Node, float]:
    """PageRank by power iteration on the weight-normalized transition matrix.

    Dangling nodes redistribute their mass uniformly; the result sums to 1.
    Raises :class:`PageRankConvergenceError` (carrying the last iterate) if
    the L1 change never drops below ``tolerance``.
    """
    if graph.n_nodes == 0:
        raise ValueError("pagerank of an empty graph")
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {damping}")

    labels, adj = graph.adjacency_ints()
    n = len(labels)
    out_strength = np.zeros(n)
    sources: list[np.ndarray] = []
    targets: list[np.ndarray] = []
    weights: list[np.ndarray] = []
    for i, nbrs in enumerate(adj):
        for j, w in nbrs:
            if w < 0:
                raise ValueError("pagerank requires non-negative edge weights")
            out_strength[i] += w
        if nbrs:
            sources.append(np.full(len(nbrs), i))
            targets.append(np.array([j for j, _ in nbrs]))
            weights.append(np.array([w for _, w in nbrs]))
    src = np.concatenate(sources) if sources else np.zeros(0, dtype=int)
    dst = np.concatenate(targets) if targets else np.zeros(0, dtype=int)
    wgt = np.concatenate(weights) if weights else np.zeros(0)
    dangling = out_strength == 0
    norm = np.where(dangling, 1.0, out_strength)

    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iterations):
        flow = np.zeros(n)
        np.add.at(flow, dst, x[src] / norm[src] * wgt)
        dangling_mass = x[dangling].sum() / n
        x_next = damping * (flow + dangling_mass) + teleport
        if np.abs(x_next - x).sum() < tolerance:
            x = x_next
            break
        x = x_next
    else:
        raise PageRankConvergenceError(
            f"pagerank did not converge within {max_iterations} iterations",
            dict(zip(labels, (x / x.sum()).tolist())),
        )
    x = x / x.sum()
    return dict(zip(labels, x.tolist()))


def weighted_jaccard(a: Mapping[Node, float], b: Mapping[Node, float]) -> float:
    """Sum of elementwise minima over sum of maxima; absent keys read as 0.

    Returns 0.0 when both vectors are all-zero.  Negative weights are
    rejected because the similarity is undefined there.
    """
    min_sum = 0.0
    max_sum = 0.0
    # Sorted union keeps float accumulation order stable across processes.
    for key in sorted(a.keys() | b.keys()):
        wa = a.get(key, 0.0)
        wb = b.get(key, 0.0)
        if wa < 0 or wb < 0:
            raise ValueError(f"negative weight for {key!r}")
        if wa <= wb:
            min_sum += wa
            max_sum += wb
        else:
            min_sum += wb
            max_sum += wa
    if max_sum == 0.0:
        return 0.0
    return min_sum / max_sum
