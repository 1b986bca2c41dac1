"""Synthetic corpora with planted click structure and attention spikes.

The generator emits files in the exact raw-corpus formats (portal wikitext,
monthly clickstream TSVs, hourly page-view dumps, redirect map) plus a truth
file recording the planted grouping, so the whole pipeline can be exercised
and scored end to end.

Per event the article universe is a set of click-dense blocks.  One planted
community (the spike set, drawn from a topic pool so that events can share
it) receives a synchronized multiplicative spike on the event day; every
series rides a shared smooth base modulation with Poisson day-noise on top.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field, asdict
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np

from .community import ami, element_centric
from .eventnets import EventNetwork
from .reactions import ComparisonResult, EventReaction
from .records import PORTAL_CATEGORIES, month_of
from .titles import title_to_dump_form
from .topics import TopicOfAttention

SPIKE_LABEL_PREFIX = "spike-"


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for corpus generation; defaults are the benchmark operating point."""

    events: int = 20
    blocks_per_event: int = 4
    block_size: int = 25
    p_intra: float = 0.35
    p_inter: float = 0.02
    weight_low: int = 150
    weight_high: int = 900
    spike_members: int = 12
    spike_amplitude: float = 10.0
    spike_width: int = 4
    base_rate_low: float = 60.0
    base_rate_high: float = 140.0
    base_modulation: float = 0.35
    noise_level: float = 1.0
    topic_count: int | None = 5
    alias_fraction: float = 0.1
    start_date: dt.date = dt.date(2018, 3, 5)
    date_span: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_intra <= 1.0 or not 0.0 <= self.p_inter <= 1.0:
            raise ValueError("edge probabilities must be in [0, 1]")
        if self.spike_amplitude < 0:
            raise ValueError("spike amplitude must be >= 0")
        if self.spike_members > self.block_size:
            raise ValueError("spike set cannot exceed its block")


@dataclass
class PlantedEvent:
    event_id: str
    date: dt.date
    category: str
    spike_label: str
    spike_articles: list[str]
    blocks: list[list[str]]
    core_articles: list[str]


def _modulation(n_days: int, level: float, rng: np.random.Generator) -> np.ndarray:
    # The fast alternating term keeps every short window's variation well
    # above one rounding quantum, so flat-window degeneracies cannot occur.
    phase1, phase2, phase3 = rng.uniform(0, 2 * math.pi, size=3)
    t = np.arange(n_days)
    wave = (
        0.45 * np.sin(2 * math.pi * t / 7.0 + phase1)
        + 0.35 * np.sin(2 * math.pi * t / 16.7 + phase2)
        + 0.20 * np.cos(math.pi * t + phase3)
    )
    return np.exp(level * wave)


def _spike_factor(config: SynthConfig, day_offset: int) -> float:
    if 0 <= day_offset < config.spike_width:
        return 1.0 + config.spike_amplitude * 0.5**day_offset
    return 1.0


def generate_corpus(config: SynthConfig, corpus_dir: str | Path) -> dict:
    """Write a complete synthetic corpus; returns a generation summary."""
    corpus = Path(corpus_dir)
    (corpus / "events").mkdir(parents=True, exist_ok=True)
    (corpus / "clickstream").mkdir(exist_ok=True)
    (corpus / "pageviews").mkdir(exist_ok=True)
    rng = np.random.default_rng(config.seed)

    # -- article universe and planted structure per event --------------------
    pools: dict[int, list[str]] = {}
    if config.topic_count:
        for t in range(config.topic_count):
            pools[t] = [
                f"Topic {t:02d} Subject {j:02d}" for j in range(config.spike_members)
            ]

    events: list[PlantedEvent] = []
    per_day: dict[dt.date, list[PlantedEvent]] = {}
    for e in range(config.events):
        date = config.start_date + dt.timedelta(days=e % config.date_span)
        category = PORTAL_CATEGORIES[e % len(PORTAL_CATEGORIES)]
        if config.topic_count:
            topic = e % config.topic_count
            spike = list(pools[topic])
            spike_label = f"topic-{topic:02d}"
        else:
            spike = [f"Event {e:02d} Subject {j:02d}" for j in range(config.spike_members)]
            spike_label = f"{SPIKE_LABEL_PREFIX}{e:02d}"
        blocks: list[list[str]] = []
        for b in range(config.blocks_per_event):
            fill = config.block_size - (len(spike) if b == 0 else 0)
            block = [f"Event {e:02d} Block {b} Filler {j:02d}" for j in range(fill)]
            if b == 0:
                block = spike + block
            blocks.append(block)
        cores = [spike[0]]
        if config.blocks_per_event > 1:
            cores.append(blocks[1][0])
        planted = PlantedEvent(
            event_id="",  # assigned after per-day ordering below
            date=date,
            category=category,
            spike_label=spike_label,
            spike_articles=spike,
            blocks=blocks,
            core_articles=cores,
        )
        events.append(planted)
        per_day.setdefault(date, []).append(planted)

    # Portal ids are positional per day, so fix the per-day order first.
    for date, day_events in per_day.items():
        day_events.sort(key=lambda ev: (ev.category, ev.spike_label))
        for k, ev in enumerate(day_events, 1):
            ev.event_id = f"{date.isoformat()}-{k:02d}"

    # -- click structure ------------------------------------------------------
    edge_counts: dict[tuple[str, str], int] = {}

    def add_edge(u: str, v: str) -> None:
        if u == v:
            return
        key = (u, v)
        if key not in edge_counts:
            edge_counts[key] = int(rng.integers(config.weight_low, config.weight_high + 1))

    for ev in events:
        for block in ev.blocks:
            for i, u in enumerate(block):
                for v in block[i + 1 :]:
                    if rng.random() < config.p_intra:
                        if rng.random() < 0.5:
                            add_edge(u, v)
                        else:
                            add_edge(v, u)
        flat_blocks = ev.blocks
        for bi in range(len(flat_blocks)):
            for bj in range(bi + 1, len(flat_blocks)):
                for u in flat_blocks[bi]:
                    for v in flat_blocks[bj]:
                        if rng.random() < config.p_inter:
                            if rng.random() < 0.5:
                                add_edge(u, v)
                            else:
                                add_edge(v, u)
        # Core articles link out to their whole block, like hub pages do.
        for core, block in zip(ev.core_articles, ev.blocks):
            for member in block:
                add_edge(core, member)

    # -- period and months ----------------------------------------------------
    window_half = 30
    period_start = min(ev.date for ev in events) - dt.timedelta(days=window_half)
    period_end = max(ev.date for ev in events) + dt.timedelta(days=window_half)
    n_days = (period_end - period_start).days + 1
    months = sorted(
        {month_of(period_start + dt.timedelta(days=i)) for i in range(n_days)}
    )

    # -- page-view series -----------------------------------------------------
    articles = sorted({a for ev in events for block in ev.blocks for a in block})
    spikes_by_article: dict[str, list[dt.date]] = {}
    for ev in events:
        for article in ev.spike_articles:
            spikes_by_article.setdefault(article, []).append(ev.date)

    modulation = _modulation(n_days, config.base_modulation, rng)
    series: dict[str, np.ndarray] = {}
    for article in articles:
        lam = float(rng.uniform(config.base_rate_low, config.base_rate_high))
        expected = lam * modulation.copy()
        for spike_date in spikes_by_article.get(article, ()):
            base_index = (spike_date - period_start).days
            for offset in range(config.spike_width):
                idx = base_index + offset
                if 0 <= idx < n_days:
                    expected[idx] *= _spike_factor(config, offset)
        draws = rng.poisson(expected).astype(np.float64)
        values = expected + config.noise_level * (draws - expected)
        series[article] = np.maximum(np.rint(values), 0.0).astype(np.int64)

    aliased = [a for a in articles if rng.random() < config.alias_fraction]
    alias_of = {article: f"{article} (former name)" for article in aliased}

    # -- write the corpus files ----------------------------------------------
    for date in sorted(per_day):
        lines: list[str] = []
        current_category = None
        for ev in per_day[date]:
            if ev.category != current_category:
                lines.append(f"'''{ev.category}'''")
                current_category = ev.category
            links = " and ".join(f"[[{core}]]" for core in ev.core_articles)
            lines.append(f"* {links}: synthetic event coverage drawing attention.")
        (corpus / "events" / f"{date.isoformat()}.wiki").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )

    for month in months:
        rows = sorted(
            (title_to_dump_form(u), title_to_dump_form(v), c)
            for (u, v), c in edge_counts.items()
        )
        with open(corpus / "clickstream" / f"clickstream-{month}.tsv", "w", encoding="utf-8") as fh:
            for u, v, count in rows:
                fh.write(f"{u}\t{v}\tlink\t{count}\n")

    for i in range(n_days):
        day = period_start + dt.timedelta(days=i)
        name = f"pageviews-{day.strftime('%Y%m%d')}-000000.txt"
        with open(corpus / "pageviews" / name, "w", encoding="utf-8") as fh:
            fh.write("de.z Decoy_Article 5 0\n")
            for article in articles:
                total = int(series[article][i])
                alias = alias_of.get(article)
                alias_share = (total * 3) // 10 if alias else 0
                desktop = (total - alias_share) * 6 // 10
                mobile = total - alias_share - desktop
                dump_title = title_to_dump_form(article)
                if desktop:
                    fh.write(f"en.z {dump_title} {desktop} 0\n")
                if mobile:
                    fh.write(f"en.m {dump_title} {mobile} 0\n")
                if alias and alias_share:
                    fh.write(f"en.z {title_to_dump_form(alias)} {alias_share} 0\n")

    with open(corpus / "redirects.tsv", "w", encoding="utf-8") as fh:
        for article in sorted(alias_of):
            fh.write(f"{alias_of[article]}\t{article}\n")

    with open(corpus / "truth.tsv", "w", encoding="utf-8") as fh:
        for ev in sorted(events, key=lambda ev: ev.event_id):
            spike = set(ev.spike_articles)
            for b, block in enumerate(ev.blocks):
                for article in block:
                    label = ev.spike_label if article in spike else f"block-{b}"
                    fh.write(f"{ev.event_id}\t{article}\t{label}\n")

    summary = {
        "events": len(events),
        "articles": len(articles),
        "months": months,
        "period": [period_start.isoformat(), period_end.isoformat()],
        "config": {
            k: (v.isoformat() if isinstance(v, dt.date) else v)
            for k, v in asdict(config).items()
        },
    }
    with open(corpus / "generation.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# -- planted truth ------------------------------------------------------------


@dataclass
class PlantedTruth:
    """Per-event article labels; exactly one label per event is the spike."""

    labels: dict[str, dict[str, str]]  # event_id -> article -> label

    @classmethod
    def load(cls, path: str | Path) -> "PlantedTruth":
        labels: dict[str, dict[str, str]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                event_id, article, label = line.split("\t")
                labels.setdefault(event_id, {})[article] = label
        return cls(labels)

    def spike_articles(self, event_id: str) -> set[str]:
        found = set()
        for article, label in self.labels.get(event_id, {}).items():
            if label.startswith("topic-") or label.startswith(SPIKE_LABEL_PREFIX):
                found.add(article)
        return found

    def spike_label(self, event_id: str) -> str | None:
        for label in self.labels.get(event_id, {}).values():
            if label.startswith("topic-") or label.startswith(SPIKE_LABEL_PREFIX):
                return label
        return None

    def groups(self, event_id: str) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for article, label in self.labels.get(event_id, {}).items():
            out.setdefault(label, set()).add(article)
        return out


# -- recovery scoring ----------------------------------------------------------


@dataclass
class RecoveryScores:
    """How well detection recovered the planted structure."""

    reaction_ec_mean: float
    reaction_exact_rate: float
    topic_ec: float
    topic_ami: float
    structural_win_rate: float
    navigational_win_rate: float
    ratio_structural_geomean: float
    ratio_navigational_geomean: float
    ratio_structural_median: float
    ratio_navigational_median: float
    events_scored: int
    details: dict = field(default_factory=dict)

    def to_json(self, path: str | Path) -> None:
        payload = asdict(self)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def _binary_ec(universe: Sequence[str], inside_a: set[str], inside_b: set[str]) -> float:
    pa = {article: (1 if article in inside_a else 0) for article in universe}
    pb = {article: (1 if article in inside_b else 0) for article in universe}
    return element_centric(pa, pb)


def evaluate_recovery(
    reactions_by_event: Mapping[str, Sequence[EventReaction]],
    topics: Sequence[TopicOfAttention],
    comparisons: Sequence[ComparisonResult],
    truth: PlantedTruth,
    networks: Mapping[str, EventNetwork],
) -> RecoveryScores:
    """Score detected reactions and topics against the planted truth.

    Reaction recovery compares, per event, the binary spike-versus-rest
    partition of the network's articles with the best-matching reaction's
    article set (element-centric similarity; exact recovery is set
    equality).  Topic recovery compares detected topic memberships with the
    planted labels of the best-matching group for each reaction.
    """
    ec_scores = []
    exact = 0
    spiked_events = []
    reaction_truth_label: dict[str, str] = {}

    for event_id in sorted(networks):
        network = networks[event_id]
        spike = truth.spike_articles(event_id)
        if not spike:
            continue
        universe = sorted(set(network.graph.nodes()) | spike)
        spiked_events.append(event_id)
        reactions = list(reactions_by_event.get(event_id, ()))
        groups = truth.groups(event_id)
        for reaction in reactions:
            best_label = max(
                sorted(groups),
                key=lambda label: _jaccard(set(reaction.articles), groups[label]),
            )
            if not label_overlaps(reaction.articles, groups[best_label]):
                best_label = f"{event_id}:background"
            elif not (
                best_label.startswith("topic-") or best_label.startswith(SPIKE_LABEL_PREFIX)
            ):
                best_label = f"{event_id}:{best_label}"
            reaction_truth_label[reaction.reaction_id] = best_label
        if not reactions:
            ec_scores.append(0.0)
            continue
        best = max(reactions, key=lambda r: _jaccard(set(r.articles), spike))
        detected = set(best.articles)
        ec_scores.append(_binary_ec(universe, spike, detected))
        if detected == spike:
            exact += 1

    topic_ec = 1.0
    topic_ami = 1.0
    if topics and reaction_truth_label:
        detected_map = {}
        for topic in topics:
            for reaction_id in topic.reaction_ids:
                detected_map[reaction_id] = topic.topic_id
        common = sorted(set(detected_map) & set(reaction_truth_label))
        if common:
            det = {r: detected_map[r] for r in common}
            tru = {r: reaction_truth_label[r] for r in common}
            tru_ids = {label: i for i, label in enumerate(sorted(set(tru.values())))}
            tru_int = {r: tru_ids[label] for r, label in tru.items()}
            topic_ec = element_centric(det, tru_int)
            topic_ami = ami(det, tru_int)

    struct_wins = []
    nav_wins = []
    struct_ratios = []
    nav_ratios = []
    for comp in comparisons:
        struct_wins.append(comp.excess_temporal >= comp.excess_structural)
        nav_wins.append(comp.excess_temporal >= comp.excess_navigational)
        if comp.excess_temporal > 0 and comp.excess_structural > 0:
            struct_ratios.append(comp.excess_temporal / comp.excess_structural)
        if comp.excess_temporal > 0 and comp.excess_navigational > 0:
            nav_ratios.append(comp.excess_temporal / comp.excess_navigational)

    def _geomean(values: Sequence[float]) -> float:
        if not values:
            return float("nan")
        return float(np.exp(np.mean(np.log(values))))

    def _median(values: Sequence[float]) -> float:
        return float(np.median(values)) if values else float("nan")

    return RecoveryScores(
        reaction_ec_mean=float(np.mean(ec_scores)) if ec_scores else 0.0,
        reaction_exact_rate=exact / len(spiked_events) if spiked_events else 0.0,
        topic_ec=topic_ec,
        topic_ami=topic_ami,
        structural_win_rate=float(np.mean(struct_wins)) if struct_wins else 0.0,
        navigational_win_rate=float(np.mean(nav_wins)) if nav_wins else 0.0,
        ratio_structural_geomean=_geomean(struct_ratios),
        ratio_navigational_geomean=_geomean(nav_ratios),
        ratio_structural_median=_median(struct_ratios),
        ratio_navigational_median=_median(nav_ratios),
        events_scored=len(spiked_events),
        details={"events": spiked_events},
    )


def label_overlaps(articles: Sequence[str] | frozenset[str], group: set[str]) -> bool:
    return bool(set(articles) & group)
