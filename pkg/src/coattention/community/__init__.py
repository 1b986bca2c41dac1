"""Community detection: CPM quality, Leiden optimizer, partition metrics."""

from .compare import ami, element_centric
from .leiden import (
    Partition,
    best_partition,
    cpm_quality,
    leiden_cpm,
    partition_from_tsv,
    partition_to_tsv,
)
from .sweep import SweepResult, geometric_grid, resolution_sweep

__all__ = [
    "Partition",
    "SweepResult",
    "ami",
    "best_partition",
    "cpm_quality",
    "element_centric",
    "geometric_grid",
    "leiden_cpm",
    "partition_from_tsv",
    "partition_to_tsv",
    "resolution_sweep",
]
