"""Higher-level clustering of event reactions into topics of attention."""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np

from .community import leiden_cpm
from .eventnets import EventNetwork
from .graph import WeightedGraph, weighted_jaccard
from .reactions import EventReaction
from .records import EventRecord

HIGHER_RESOLUTION = 0.067
TOPIC_FEATURES = ("event_count", "prominence", "magnitude", "deviance")


@dataclass(frozen=True)
class ReactionSeries:
    """A reaction's PageRank-weighted view series, peak-centred on t=0.

    The shift is at most one day either way; edges are padded with the
    boundary value after shifting.
    """

    values: np.ndarray
    shift: int


@dataclass
class TopicOfAttention:
    """A cluster of event reactions with attention features."""

    topic_id: int
    reaction_ids: list[str]
    event_count: int = 0
    prominence: float = 0.0
    magnitude: float = 0.0
    deviance: float = 0.0
    zero_median_members: int = 0
    labels: dict[str, str] = field(default_factory=dict)


def reaction_series(reaction: EventReaction, network: EventNetwork) -> ReactionSeries:
    """Weighted sum of member views, re-centred so the peak within one day
    of the event date sits at the event index.
    """
    t0 = network.event_day_index
    length = network.window_length
    total = np.zeros(length, dtype=np.float64)
    for article, weight in reaction.pagerank_weights.items():
        series = network.series.get(article)
        if series is not None:
            total += weight * series
    lo = max(0, t0 - 1)
    hi = min(length, t0 + 2)
    peak = lo + int(np.argmax(total[lo:hi]))
    shift = t0 - peak
    if shift == 0:
        return ReactionSeries(values=total, shift=0)
    shifted = np.roll(total, shift)
    if shift > 0:
        shifted[:shift] = total[0]
    else:
        shifted[shift:] = total[-1]
    return ReactionSeries(values=shifted, shift=shift)


def build_higher_network(reactions: Sequence[EventReaction]) -> WeightedGraph:
    """The reaction-similarity network.

    Candidate pairs come from an inverted article index; pairs that share no
    article have weight exactly 0 and are omitted.  Edge weights are the
    weighted Jaccard similarity of the PageRank vectors.
    """
    by_id = {r.reaction_id: r for r in reactions}
    if len(by_id) != len(reactions):
        raise ValueError("duplicate reaction ids")
    inverted: dict[str, list[str]] = {}
    for reaction in reactions:
        for article in reaction.articles:
            inverted.setdefault(article, []).append(reaction.reaction_id)
    candidates: set[tuple[str, str]] = set()
    for ids in inverted.values():
        ids = sorted(ids)
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                candidates.add((a, b))
    edges = []
    for a, b in sorted(candidates):
        weight = weighted_jaccard(by_id[a].pagerank_weights, by_id[b].pagerank_weights)
        if weight > 0.0:
            edges.append((a, b, weight))
    return WeightedGraph(edges, directed=False, nodes=sorted(by_id))


def _components(graph: WeightedGraph) -> list[list[str]]:
    seen: set[str] = set()
    components: list[list[str]] = []
    for node in sorted(graph.nodes()):
        if node in seen:
            continue
        stack = [node]
        comp = []
        seen.add(node)
        while stack:
            current = stack.pop()
            comp.append(current)
            for nbr in graph.out_neighbors(current):
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        components.append(sorted(comp))
    return components


def _component_seed(ids: Sequence[str], seed: int) -> int:
    digest = hashlib.sha256("\x1f".join(ids).encode("utf-8")).digest()
    return (int.from_bytes(digest[:8], "big") ^ seed) & 0x7FFFFFFF


def detect_topics(
    higher: WeightedGraph,
    resolution: float = HIGHER_RESOLUTION,
    seed: int = 0,
) -> list[TopicOfAttention]:
    """Partition the reaction network into topics.

    Detection runs per connected component with a seed derived from the
    component's content, so edits in one component never disturb the topics
    found in another.
    """
    if higher.n_nodes == 0:
        return []
    communities: list[list[str]] = []
    for component in _components(higher):
        sub = higher.subgraph(component)
        partition = leiden_cpm(sub, resolution, seed=_component_seed(component, seed))
        groups: dict[int, list[str]] = {}
        for node, comm in partition.membership.items():
            groups.setdefault(comm, []).append(node)
        communities.extend(sorted(g) for g in groups.values())
    communities.sort(key=lambda ids: ids[0])
    return [
        TopicOfAttention(topic_id=i, reaction_ids=ids, event_count=len(ids))
        for i, ids in enumerate(communities)
    ]


def topic_features(
    topic: TopicOfAttention,
    series_by_reaction: Mapping[str, ReactionSeries],
    event_day_index: int = 30,
) -> TopicOfAttention:
    """Fill in prominence, magnitude, and deviance from member series.

    The pre-event median runs over days -30..0 inclusive.  Members whose
    median is zero are excluded from the deviance mean only and counted in
    ``zero_median_members``.
    """
    medians = []
    jumps = []
    ratios = []
    zero_medians = 0
    for reaction_id in topic.reaction_ids:
        series = series_by_reaction[reaction_id].values
        median = float(np.median(series[: event_day_index + 1]))
        jump = float(series[event_day_index]) - median
        medians.append(median)
        jumps.append(jump)
        if median > 0:
            ratios.append(jump / median)
        else:
            zero_medians += 1
    count = len(topic.reaction_ids)
    topic.event_count = count
    topic.prominence = sum(medians) / count
    topic.magnitude = sum(jumps) / count
    topic.deviance = sum(ratios) / len(ratios) if ratios else 0.0
    topic.zero_median_members = zero_medians
    return topic


def rank_topics(
    topics: Sequence[TopicOfAttention], feature: str, k: int
) -> list[TopicOfAttention]:
    """Top-k topics by a feature, descending, ties broken by topic id."""
    if feature not in TOPIC_FEATURES:
        raise ValueError(f"unknown feature {feature!r}; expected one of {TOPIC_FEATURES}")
    ordered = sorted(topics, key=lambda t: (-getattr(t, feature), t.topic_id))
    return ordered[:k]


def select_labeling_subset(
    topics: Sequence[TopicOfAttention], k: int = 20
) -> list[TopicOfAttention]:
    """Union of the top-k topics across all four features.

    Topics ranking highly on several features appear once, so the result
    can be smaller than 4k.
    """
    chosen: dict[int, TopicOfAttention] = {}
    for feature in TOPIC_FEATURES:
        for topic in rank_topics(topics, feature, k):
            chosen[topic.topic_id] = topic
    return [chosen[i] for i in sorted(chosen)]


def export_topics(
    topics: Sequence[TopicOfAttention],
    reactions_by_id: Mapping[str, EventReaction],
    events_by_id: Mapping[str, EventRecord],
    top_n: int = 10,
) -> dict:
    """Build the labeling-interface payload.

    Each card shows the most frequent core articles, the top articles by
    summed PageRank weight, and the member events (date plus description).
    """
    cards = []
    for topic in topics:
        core_counts: Counter[str] = Counter()
        article_weights: Counter[str] = Counter()
        events: dict[str, EventRecord] = {}
        for reaction_id in topic.reaction_ids:
            reaction = reactions_by_id[reaction_id]
            event = events_by_id[reaction.event_id]
            events[event.event_id] = event
            for article in reaction.articles & event.core_articles:
                core_counts[article] += 1
            for article, weight in reaction.pagerank_weights.items():
                article_weights[article] += weight
        sample = sorted(events.values(), key=lambda e: (e.date, e.event_id))
        cards.append(
            {
                "topic_id": topic.topic_id,
                "features": {
                    "event_count": topic.event_count,
                    "prominence": topic.prominence,
                    "magnitude": topic.magnitude,
                    "deviance": topic.deviance,
                },
                "top_core_articles": [
                    {"article": a, "count": c}
                    for a, c in sorted(core_counts.items(), key=lambda x: (-x[1], x[0]))[:top_n]
                ],
                "top_articles": [
                    {"article": a, "weight": w}
                    for a, w in sorted(article_weights.items(), key=lambda x: (-x[1], x[0]))[:top_n]
                ],
                "events": [
                    {"date": e.date.isoformat(), "description": e.description}
                    for e in sample
                ],
            }
        )
    return {"version": 1, "topics": cards}


def write_topic_export(payload: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
