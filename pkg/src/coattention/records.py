"""Core record types for the ingestion layer, plus calendar-month helpers."""

from __future__ import annotations

import datetime as dt
from calendar import monthrange
from dataclasses import dataclass, field

#: The ten news categories used by the daily event portal.
PORTAL_CATEGORIES = (
    "Armed conflicts and attacks",
    "Arts and culture",
    "Business and economy",
    "Disasters and accidents",
    "Health and medicine",
    "International relations",
    "Law and crime",
    "Politics and elections",
    "Science and technology",
    "Sports",
)


@dataclass(frozen=True)
class EventRecord:
    """One dated, categorized news entry with its linked core articles."""

    event_id: str
    date: dt.date
    category: str
    description: str
    core_articles: frozenset[str]

    def __post_init__(self) -> None:
        if self.category not in PORTAL_CATEGORIES:
            raise ValueError(f"unknown event category: {self.category!r}")
        if not self.core_articles:
            raise ValueError(f"event {self.event_id}: no core articles")


@dataclass(frozen=True)
class ClickRecord:
    """A monthly (source, target) navigation count between two articles."""

    source: str
    target: str
    month: str  # "YYYY-MM"
    count: int


@dataclass
class ParseStats:
    """Per-file diagnostics accumulated while parsing raw inputs."""

    kept: int = 0
    dropped: dict[str, int] = field(default_factory=dict)

    def drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())


def month_of(day: dt.date) -> str:
    return f"{day.year:04d}-{day.month:02d}"


def parse_month(month: str) -> tuple[int, int]:
    year, _, mon = month.partition("-")
    return int(year), int(mon)


def days_in_month(month: str) -> int:
    year, mon = parse_month(month)
    return monthrange(year, mon)[1]
