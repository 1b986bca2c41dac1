"""Pipeline configuration: defaults are the published operating points."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

ENV_CORPUS = "COATTENTION_CORPUS"
ENV_WORK = "COATTENTION_WORK"

# Fields that name filesystem locations; excluded from manifests so that a
# relocated run still hashes identically, and overridable via environment.
PATH_FIELDS = ("corpus_dir", "work_dir")


@dataclass
class PipelineConfig:
    corpus_dir: str = "corpus"
    work_dir: str = "work"
    window_length: int = 61
    correlation_window: int = 7
    tau: float = 1.0
    temporal_resolution: float = 0.25
    structural_resolution: float = 0.030
    navigational_resolution: float = 54.6
    higher_resolution: float = 0.067
    excess_gate: float = 3.0
    edge_threshold: float = 100.0
    grid_points: int = 40
    similarity_low: float = 1.23e-4
    similarity_high: float = 1.0
    sweep_sample: int = 100
    pagerank_weighted: bool = True
    label_top_k: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if self.window_length % 2 == 0 or self.window_length < 3:
            raise ValueError("window_length must be odd and >= 3")
        if not 2 <= self.correlation_window <= self.window_length:
            raise ValueError("correlation_window out of range")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")

    # -- serialization -------------------------------------------------------

    def to_dict(self, include_paths: bool = True) -> dict:
        data = dataclasses.asdict(self)
        if not include_paths:
            for name in PATH_FIELDS:
                data.pop(name)
        return data

    def to_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def with_env_overrides(self) -> "PipelineConfig":
        """Environment variables override path fields only."""
        updates = {}
        if os.environ.get(ENV_CORPUS):
            updates["corpus_dir"] = os.environ[ENV_CORPUS]
        if os.environ.get(ENV_WORK):
            updates["work_dir"] = os.environ[ENV_WORK]
        return dataclasses.replace(self, **updates) if updates else self
