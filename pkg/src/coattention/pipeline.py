"""Stage runner: orchestrates the pipeline with manifest-based caching.

Stages run in a fixed order (ingest, networks, correlate, detect, reactions,
topics, export).  Each stage records a manifest of configuration, input
hashes, and output hashes; a rerun whose manifest still matches is a no-op.
All artifacts are deterministic functions of (inputs, config, seed).
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
import logging
import shutil
from dataclasses import dataclass
from pathlib import Path

from .clickstream import ClickIndex, load_month_tsv, parse_clickstream, write_month_tsv
from .community import Partition, geometric_grid, leiden_cpm, partition_to_tsv
from .config import PipelineConfig
from .correlation import (
    dump_temporal_weights,
    flatten_multilayer,
    load_temporal_weights,
    rolling_correlations,
)
from .eventnets import (
    DegenerateEventError,
    EventNetwork,
    attach_series,
    build_event_network,
    load_event_network,
    save_event_network,
    window_month_weights,
)
from .pageviews import DailySeriesStore, aggregate_daily, iter_dump_files
from .portal import parse_event_records
from .reactions import (
    ComparisonResult,
    EventReaction,
    compare_approaches,
    extract_reactions,
    score_reactions,
)
from .records import EventRecord, ParseStats
from .redirects import RedirectMap
from .topics import (
    TopicOfAttention,
    build_higher_network,
    detect_topics,
    export_topics,
    reaction_series,
    select_labeling_subset,
    topic_features,
    write_topic_export,
)

log = logging.getLogger(__name__)

STAGES = ("ingest", "networks", "correlate", "detect", "reactions", "topics", "export")


class MissingArtifactError(RuntimeError):
    """An upstream artifact is absent; names the stage to run first."""

    def __init__(self, artifact: str, stage: str):
        super().__init__(f"missing artifact {artifact!r}; run stage {stage!r} first")
        self.stage = stage


@dataclass(frozen=True)
class StageResult:
    stage: str
    skipped: bool
    outputs: list[str]


def derive_seed(*parts: object) -> int:
    """A stable positive seed from arbitrary labeled parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFFFFFF


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _encode_copy(node: tuple[str, int]) -> str:
    article, layer = node
    return f"{article}|{layer}"  # '|' cannot occur in article titles


def _decode_copy(text: str) -> tuple[str, int]:
    article, _, layer = text.rpartition("|")
    return article, int(layer)


class Pipeline:
    """Runs pipeline stages over a corpus directory into a work directory."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.corpus = Path(config.corpus_dir)
        self.work = Path(config.work_dir)

    # -- well-known locations ------------------------------------------------

    @property
    def events_path(self) -> Path:
        return self.work / "events.jsonl"

    @property
    def clicks_dir(self) -> Path:
        return self.work / "clicks"

    @property
    def series_dir(self) -> Path:
        return self.work / "series"

    @property
    def networks_dir(self) -> Path:
        return self.work / "networks"

    @property
    def correlations_dir(self) -> Path:
        return self.work / "correlations"

    @property
    def partitions_dir(self) -> Path:
        return self.work / "partitions"

    @property
    def reactions_dir(self) -> Path:
        return self.work / "reactions"

    @property
    def topics_dir(self) -> Path:
        return self.work / "topics"

    @property
    def export_path(self) -> Path:
        return self.work / "export" / "topics_export.json"

    # -- manifest machinery ----------------------------------------------------

    def _manifest_path(self, stage: str) -> Path:
        return self.work / "manifests" / f"{stage}.json"

    def _relative(self, path: Path) -> str:
        for root, tag in ((self.work, "work"), (self.corpus, "corpus")):
            try:
                return f"{tag}:{path.relative_to(root).as_posix()}"
            except ValueError:
                continue
        return path.as_posix()

    def _hash_files(self, paths: list[Path]) -> dict[str, str]:
        return {self._relative(p): _sha256(p) for p in sorted(paths)}

    def _stage_inputs(self, stage: str) -> list[Path]:
        def tree(root: Path) -> list[Path]:
            return [p for p in root.rglob("*") if p.is_file()] if root.exists() else []

        if stage == "ingest":
            paths = tree(self.corpus / "events") + tree(self.corpus / "clickstream")
            paths += tree(self.corpus / "pageviews")
            redirect = self.corpus / "redirects.tsv"
            if redirect.exists():
                paths.append(redirect)
            return paths
        if stage == "networks":
            return [self.events_path] + tree(self.clicks_dir) + tree(self.series_dir)
        if stage == "correlate":
            return tree(self.networks_dir)
        if stage == "detect":
            return tree(self.correlations_dir) + tree(self.networks_dir)
        if stage == "reactions":
            return tree(self.partitions_dir) + tree(self.networks_dir)
        if stage == "topics":
            return tree(self.reactions_dir) + tree(self.networks_dir) + [self.events_path]
        if stage == "export":
            return tree(self.topics_dir) + tree(self.reactions_dir) + [self.events_path]
        raise ValueError(f"unknown stage {stage!r}")

    _UPSTREAM = {
        "networks": ("ingest", "events.jsonl"),
        "correlate": ("networks", "networks/"),
        "detect": ("correlate", "correlations/"),
        "reactions": ("detect", "partitions/"),
        "topics": ("reactions", "reactions/reactions.jsonl"),
        "export": ("topics", "topics/topics.json"),
    }

    def _check_upstream(self, stage: str) -> None:
        if stage == "ingest":
            if not self.corpus.exists():
                raise FileNotFoundError(f"corpus directory {self.corpus} does not exist")
            return
        upstream, artifact = self._UPSTREAM[stage]
        if not (self.work / artifact).exists():
            raise MissingArtifactError(artifact, upstream)

    def run(self, stage: str) -> StageResult:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}; expected one of {STAGES}")
        self._check_upstream(stage)
        self.work.mkdir(parents=True, exist_ok=True)
        manifest_path = self._manifest_path(stage)
        config_dict = self.config.to_dict(include_paths=False)
        inputs = self._hash_files(self._stage_inputs(stage))

        if manifest_path.exists():
            with open(manifest_path, encoding="utf-8") as fh:
                manifest = json.load(fh)
            if manifest.get("config") == config_dict and manifest.get("inputs") == inputs:
                outputs_ok = all(
                    (self.work / rel.split(":", 1)[1]).exists()
                    and _sha256(self.work / rel.split(":", 1)[1]) == digest
                    for rel, digest in manifest.get("outputs", {}).items()
                )
                if outputs_ok:
                    log.info("stage %s: inputs unchanged, skipping", stage)
                    return StageResult(stage, True, sorted(manifest["outputs"]))

        produced = getattr(self, f"_stage_{stage}")()
        outputs = self._hash_files(produced)
        manifest = {
            "stage": stage,
            "seed": self.config.seed,
            "config": config_dict,
            "inputs": inputs,
            "outputs": outputs,
        }
        manifest_path.parent.mkdir(parents=True, exist_ok=True)
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return StageResult(stage, False, sorted(outputs))

    def run_all(self) -> list[StageResult]:
        return [self.run(stage) for stage in STAGES]

    # -- shared loading --------------------------------------------------------

    def load_events(self) -> dict[str, EventRecord]:
        events: dict[str, EventRecord] = {}
        with open(self.events_path, encoding="utf-8") as fh:
            for line in fh:
                row = json.loads(line)
                record = EventRecord(
                    event_id=row["event_id"],
                    date=dt.date.fromisoformat(row["date"]),
                    category=row["category"],
                    description=row["description"],
                    core_articles=frozenset(row["core_articles"]),
                )
                events[record.event_id] = record
        return events

    def event_ids(self) -> list[str]:
        if not self.networks_dir.exists():
            return []
        return sorted(p.name for p in self.networks_dir.iterdir() if p.is_dir())

    def load_networks(self) -> dict[str, EventNetwork]:
        return {eid: load_event_network(self.networks_dir / eid) for eid in self.event_ids()}

    def n_layers(self) -> int:
        return self.config.window_length - self.config.correlation_window + 1

    # -- stage implementations ---------------------------------------------------

    def _stage_ingest(self) -> list[Path]:
        redirect_path = self.corpus / "redirects.tsv"
        redirects = (
            RedirectMap.from_tsv(redirect_path) if redirect_path.exists() else RedirectMap.identity()
        )

        events: list[EventRecord] = []
        stats = ParseStats()
        event_files = sorted((self.corpus / "events").glob("*.wiki"))
        if not event_files:
            raise FileNotFoundError(f"no event files under {self.corpus / 'events'}")
        for path in event_files:
            date = dt.date.fromisoformat(path.stem)
            events.extend(parse_event_records(path.read_text("utf-8"), date, redirects, stats))
        events.sort(key=lambda e: e.event_id)

        self.events_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.events_path, "w", encoding="utf-8") as fh:
            for event in events:
                fh.write(
                    json.dumps(
                        {
                            "event_id": event.event_id,
                            "date": event.date.isoformat(),
                            "category": event.category,
                            "description": event.description,
                            "core_articles": sorted(event.core_articles),
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )

        if self.clicks_dir.exists():
            shutil.rmtree(self.clicks_dir)
        self.clicks_dir.mkdir(parents=True)
        click_stats: dict[str, ParseStats] = {}
        produced = [self.events_path]
        for path in sorted((self.corpus / "clickstream").glob("clickstream-*.tsv")):
            month = path.stem.replace("clickstream-", "")
            month_stats = ParseStats()
            with open(path, encoding="utf-8") as fh:
                records = list(parse_clickstream(fh, month, redirects, month_stats))
            out = self.clicks_dir / path.name
            write_month_tsv(out, records)
            click_stats[month] = month_stats
            produced.append(out)

        half = self.config.window_length // 2
        period = (
            min(e.date for e in events) - dt.timedelta(days=half),
            max(e.date for e in events) + dt.timedelta(days=half),
        )
        view_stats = ParseStats()
        daily = aggregate_daily(
            iter_dump_files(self.corpus / "pageviews"),
            period,
            redirects=redirects,
            stats=view_stats,
        )
        if self.series_dir.exists():
            shutil.rmtree(self.series_dir)
        store = DailySeriesStore.build(self.series_dir, daily, period)
        produced += [p for p in self.series_dir.rglob("*") if p.is_file()]

        report = {
            "events": len(events),
            "event_items_dropped": stats.dropped,
            "period": [period[0].isoformat(), period[1].isoformat()],
            "click_months": {
                month: {"kept": s.kept, "dropped": s.dropped}
                for month, s in sorted(click_stats.items())
            },
            "pageview_rows_kept": view_stats.kept,
            "pageview_rows_dropped": view_stats.dropped,
            "store_titles": len(list(store.titles())),
        }
        report_path = self.work / "ingest.json"
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        produced.append(report_path)
        return produced

    def _load_click_indexes(self, months: list[str]) -> dict[str, ClickIndex]:
        indexes: dict[str, ClickIndex] = {}
        for month in months:
            path = self.clicks_dir / f"clickstream-{month}.tsv"
            if not path.exists():
                raise MissingArtifactError(f"clicks/clickstream-{month}.tsv", "ingest")
            indexes[month] = load_month_tsv(path, month)
        return indexes

    def _stage_networks(self) -> list[Path]:
        events = self.load_events()
        months = sorted(
            {
                month
                for event in events.values()
                for month, _ in window_month_weights(event.date, self.config.window_length)
            }
        )
        clicks = self._load_click_indexes(months)
        store = DailySeriesStore.open(self.series_dir)

        if self.networks_dir.exists():
            shutil.rmtree(self.networks_dir)
        self.networks_dir.mkdir(parents=True)
        degenerate: list[str] = []
        produced: list[Path] = []
        for event_id in sorted(events):
            event = events[event_id]
            try:
                network = build_event_network(
                    event, clicks, self.config.edge_threshold, self.config.window_length
                )
            except DegenerateEventError:
                log.warning("event %s: degenerate network, excluded downstream", event_id)
                degenerate.append(event_id)
                continue
            attach_series(network, store)
            directory = self.networks_dir / event_id
            save_event_network(network, directory)
            produced += [p for p in directory.iterdir()]
        degenerate_path = self.networks_dir / "degenerate.json"
        with open(degenerate_path, "w", encoding="utf-8") as fh:
            json.dump({"degenerate": degenerate}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        produced.append(degenerate_path)
        return produced

    def _stage_correlate(self) -> list[Path]:
        if self.correlations_dir.exists():
            shutil.rmtree(self.correlations_dir)
        self.correlations_dir.mkdir(parents=True)
        produced = []
        for event_id in self.event_ids():
            network = load_event_network(self.networks_dir / event_id)
            weights = rolling_correlations(network, self.config.correlation_window)
            out = self.correlations_dir / f"{event_id}.tsv"
            dump_temporal_weights(weights, str(out))
            produced.append(out)
        return produced

    def _stage_detect(self) -> list[Path]:
        if self.partitions_dir.exists():
            shutil.rmtree(self.partitions_dir)
        self.partitions_dir.mkdir(parents=True)
        produced = []
        for event_id in self.event_ids():
            weights = load_temporal_weights(str(self.correlations_dir / f"{event_id}.tsv"))
            flat = flatten_multilayer(weights, self.config.tau)
            seed = derive_seed(self.config.seed, "temporal", event_id)
            partition = leiden_cpm(flat.graph, self.config.temporal_resolution, seed)
            tsv = self.partitions_dir / f"{event_id}.tsv"
            partition_to_tsv(partition, tsv, encode=_encode_copy)
            meta = {
                "event_id": event_id,
                "quality": partition.quality,
                "resolution": partition.resolution,
                "seed": seed,
                "n_communities": partition.n_communities,
                "n_layers": flat.n_layers,
            }
            meta_path = self.partitions_dir / f"{event_id}.json"
            with open(meta_path, "w", encoding="utf-8") as fh:
                json.dump(meta, fh, indent=2, sort_keys=True)
                fh.write("\n")
            produced += [tsv, meta_path]
        return produced

    def _stage_reactions(self) -> list[Path]:
        if self.reactions_dir.exists():
            shutil.rmtree(self.reactions_dir)
        self.reactions_dir.mkdir(parents=True)
        grid = geometric_grid(
            self.config.similarity_low, self.config.similarity_high, self.config.grid_points
        )
        reactions_path = self.reactions_dir / "reactions.jsonl"
        comparisons_path = self.reactions_dir / "comparisons.jsonl"
        with open(reactions_path, "w", encoding="utf-8") as rfh, open(
            comparisons_path, "w", encoding="utf-8"
        ) as cfh:
            for event_id in self.event_ids():
                network = load_event_network(self.networks_dir / event_id)
                membership: dict[tuple[str, int], int] = {}
                with open(self.partitions_dir / f"{event_id}.tsv", encoding="utf-8") as fh:
                    for line in fh:
                        node, _, comm = line.rstrip("\n").rpartition("\t")
                        membership[_decode_copy(node)] = int(comm)
                partition = Partition(
                    membership, float("nan"), self.config.temporal_resolution, 0
                )
                reactions = extract_reactions(
                    partition, self.n_layers(), network, self.config.pagerank_weighted
                )
                seed = derive_seed(self.config.seed, "similarity", event_id)
                score_reactions(reactions, network, grid, seed, self.config.pagerank_weighted)
                for reaction in reactions:
                    rfh.write(
                        json.dumps(
                            {
                                "event_id": reaction.event_id,
                                "reaction_id": reaction.reaction_id,
                                "articles": sorted(reaction.articles),
                                "layer_span": list(reaction.layer_span),
                                "weights": reaction.pagerank_weights,
                                "contains_core": reaction.contains_core,
                                "structural_similarity": reaction.structural_similarity,
                            },
                            sort_keys=True,
                        )
                        + "\n"
                    )
                comparison = compare_approaches(
                    network,
                    reactions,
                    self.config.structural_resolution,
                    self.config.navigational_resolution,
                    self.config.excess_gate,
                    derive_seed(self.config.seed, "static", event_id),
                )
                cfh.write(
                    json.dumps(
                        {
                            "event_id": comparison.event_id,
                            "excess_temporal": comparison.excess_temporal,
                            "excess_structural": comparison.excess_structural,
                            "excess_navigational": comparison.excess_navigational,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        return [reactions_path, comparisons_path]

    def load_reactions(self) -> dict[str, list[EventReaction]]:
        by_event: dict[str, list[EventReaction]] = {}
        with open(self.reactions_dir / "reactions.jsonl", encoding="utf-8") as fh:
            for line in fh:
                row = json.loads(line)
                reaction = EventReaction(
                    event_id=row["event_id"],
                    reaction_id=row["reaction_id"],
                    articles=frozenset(row["articles"]),
                    layer_span=tuple(row["layer_span"]),
                    pagerank_weights=row["weights"],
                    contains_core=row["contains_core"],
                    structural_similarity=row["structural_similarity"],
                )
                by_event.setdefault(reaction.event_id, []).append(reaction)
        return by_event

    def load_comparisons(self) -> list[ComparisonResult]:
        comparisons = []
        with open(self.reactions_dir / "comparisons.jsonl", encoding="utf-8") as fh:
            for line in fh:
                row = json.loads(line)
                comparisons.append(
                    ComparisonResult(
                        event_id=row["event_id"],
                        excess_temporal=row["excess_temporal"],
                        excess_structural=row["excess_structural"],
                        excess_navigational=row["excess_navigational"],
                    )
                )
        return comparisons

    def _stage_topics(self) -> list[Path]:
        reactions_by_event = self.load_reactions()
        all_reactions = [r for rs in reactions_by_event.values() for r in rs]
        higher = build_higher_network(all_reactions)
        topics = detect_topics(higher, self.config.higher_resolution, self.config.seed)

        networks: dict[str, EventNetwork] = {}
        series_map = {}
        for reaction in all_reactions:
            if reaction.event_id not in networks:
                networks[reaction.event_id] = load_event_network(
                    self.networks_dir / reaction.event_id
                )
            series_map[reaction.reaction_id] = reaction_series(
                reaction, networks[reaction.event_id]
            )
        for topic in topics:
            topic_features(topic, series_map, self.config.window_length // 2)

        if self.topics_dir.exists():
            shutil.rmtree(self.topics_dir)
        self.topics_dir.mkdir(parents=True)
        edges_path = self.topics_dir / "higher_edges.tsv"
        higher.to_tsv(edges_path)
        topics_path = self.topics_dir / "topics.json"
        payload = {
            "resolution": self.config.higher_resolution,
            "topics": [
                {
                    "topic_id": t.topic_id,
                    "reaction_ids": t.reaction_ids,
                    "event_count": t.event_count,
                    "prominence": t.prominence,
                    "magnitude": t.magnitude,
                    "deviance": t.deviance,
                    "zero_median_members": t.zero_median_members,
                }
                for t in topics
            ],
        }
        with open(topics_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return [edges_path, topics_path]

    def load_topics(self) -> list[TopicOfAttention]:
        with open(self.topics_dir / "topics.json", encoding="utf-8") as fh:
            payload = json.load(fh)
        topics = []
        for row in payload["topics"]:
            topics.append(
                TopicOfAttention(
                    topic_id=row["topic_id"],
                    reaction_ids=row["reaction_ids"],
                    event_count=row["event_count"],
                    prominence=row["prominence"],
                    magnitude=row["magnitude"],
                    deviance=row["deviance"],
                    zero_median_members=row["zero_median_members"],
                )
            )
        return topics

    def _stage_export(self) -> list[Path]:
        topics = self.load_topics()
        subset = select_labeling_subset(topics, self.config.label_top_k)
        reactions_by_event = self.load_reactions()
        reactions_by_id = {
            r.reaction_id: r for rs in reactions_by_event.values() for r in rs
        }
        events = self.load_events()
        payload = export_topics(subset, reactions_by_id, events)
        self.export_path.parent.mkdir(parents=True, exist_ok=True)
        write_topic_export(payload, self.export_path)
        return [self.export_path]

    # -- sweeps (exploratory verb, not part of the cached chain) -----------------

    def run_sweep(self, kind: str, low: float, high: float, points: int, sample: int) -> Path:
        from .community import resolution_sweep

        grid = geometric_grid(low, high, points)
        event_ids = self.event_ids()[:sample]
        if kind in ("structural", "navigational"):
            mode = "unit" if kind == "structural" else "sum"
            graphs = [
                load_event_network(self.networks_dir / eid).graph.undirected_projection(mode)
                for eid in event_ids
            ]
        elif kind == "temporal":
            graphs = []
            for eid in event_ids:
                weights = load_temporal_weights(str(self.correlations_dir / f"{eid}.tsv"))
                graphs.append(flatten_multilayer(weights, self.config.tau).graph)
        elif kind == "higher":
            reactions = [r for rs in self.load_reactions().values() for r in rs]
            graphs = [build_higher_network(reactions)]
        else:
            raise ValueError(f"unknown sweep kind {kind!r}")
        if not graphs:
            raise MissingArtifactError("networks/", "networks")
        result = resolution_sweep(graphs, grid, seed=derive_seed(self.config.seed, "sweep", kind))
        out_dir = self.work / "sweeps"
        out_dir.mkdir(parents=True, exist_ok=True)
        out = out_dir / f"{kind}.json"
        result.to_json(out)
        return out


def run_benchmark(
    synth_config,
    out_dir: str | Path,
    base_config: PipelineConfig | None = None,
):
    """Generate a synthetic corpus, run the full pipeline, score recovery."""
    from .synth import PlantedTruth, evaluate_recovery, generate_corpus

    out = Path(out_dir)
    corpus = out / "corpus"
    work = out / "work"
    generate_corpus(synth_config, corpus)
    config = dataclasses.replace(
        base_config or PipelineConfig(),
        corpus_dir=str(corpus),
        work_dir=str(work),
    )
    pipeline = Pipeline(config)
    pipeline.run_all()
    truth = PlantedTruth.load(corpus / "truth.tsv")
    scores = evaluate_recovery(
        pipeline.load_reactions(),
        pipeline.load_topics(),
        pipeline.load_comparisons(),
        truth,
        pipeline.load_networks(),
    )
    scores.to_json(out / "report.json")
    return scores
