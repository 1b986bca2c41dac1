"""Topic label records and the two-coder agreement summary."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from collections.abc import Iterable, Sequence

AGREEMENT_CATEGORIES = ("strong", "partial", "weak_none")
BUCKETS = ("unanimous_strong", "strong_partial", "unanimous_partial", "weak_none")


@dataclass(frozen=True)
class LabelRecord:
    """One coder's label for one topic, plus their agreement judgment."""

    topic_id: int
    coder_id: str
    label: str
    agreement: str | None = None

    def __post_init__(self) -> None:
        if self.agreement is not None and self.agreement not in AGREEMENT_CATEGORIES:
            raise ValueError(f"agreement must be one of {AGREEMENT_CATEGORIES}")


@dataclass
class AgreementSummary:
    """Percentage breakdown of label agreement over topics with two coders."""

    percentages: dict[str, float]
    counts: dict[str, int]
    topics_included: int
    excluded: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "percentages": self.percentages,
            "counts": self.counts,
            "topics_included": self.topics_included,
            "excluded": [{"topic_id": t, "reason": r} for t, r in self.excluded],
        }


def load_label_file(path: str | Path) -> list[LabelRecord]:
    """Read a coder's label file as written by the labeling interface."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    coder = payload["coder_id"]
    records = []
    for row in payload["labels"]:
        records.append(
            LabelRecord(
                topic_id=int(row["topic_id"]),
                coder_id=coder,
                label=row["label"],
                agreement=row.get("agreement"),
            )
        )
    return records


def save_label_file(path: str | Path, coder_id: str, records: Sequence[LabelRecord]) -> None:
    payload = {
        "coder_id": coder_id,
        "labels": [
            {"topic_id": r.topic_id, "label": r.label, "agreement": r.agreement}
            for r in sorted(records, key=lambda r: r.topic_id)
        ],
        "version": 1,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _bucket(a: str, b: str) -> str:
    pair = {a, b}
    if pair == {"strong"}:
        return "unanimous_strong"
    if pair == {"strong", "partial"}:
        return "strong_partial"
    if pair == {"partial"}:
        return "unanimous_partial"
    return "weak_none"


def agreement_summary(records: Iterable[LabelRecord]) -> AgreementSummary:
    """Tally the four agreement buckets across topics with exactly two coders.

    Topics with a different number of coder records, or records missing an
    agreement judgment, are excluded and reported rather than guessed at.
    """
    by_topic: dict[int, list[LabelRecord]] = {}
    for record in records:
        by_topic.setdefault(record.topic_id, []).append(record)

    counts = {bucket: 0 for bucket in BUCKETS}
    excluded: list[tuple[int, str]] = []
    for topic_id in sorted(by_topic):
        rows = by_topic[topic_id]
        coders = {r.coder_id for r in rows}
        if len(rows) != 2 or len(coders) != 2:
            excluded.append((topic_id, f"expected 2 coders, got {len(rows)}"))
            continue
        if any(r.agreement is None for r in rows):
            excluded.append((topic_id, "missing agreement judgment"))
            continue
        counts[_bucket(rows[0].agreement, rows[1].agreement)] += 1

    included = sum(counts.values())
    percentages = {
        bucket: (100.0 * counts[bucket] / included if included else 0.0)
        for bucket in BUCKETS
    }
    return AgreementSummary(
        percentages=percentages,
        counts=counts,
        topics_included=included,
        excluded=excluded,
    )
