"""coattention: event reactions and topics of attention from click and
page-view logs on a hyperlinked knowledge base."""

from .community import (
    Partition,
    SweepResult,
    ami,
    best_partition,
    cpm_quality,
    element_centric,
    geometric_grid,
    leiden_cpm,
    resolution_sweep,
)
from .config import PipelineConfig
from .correlation import (
    FlatMultilayerGraph,
    TemporalEdgeWeights,
    flatten_multilayer,
    rolling_correlations,
)
from .eventnets import (
    DegenerateEventError,
    EventNetwork,
    attach_series,
    build_event_network,
    window_month_weights,
)
from .graph import (
    PageRankConvergenceError,
    WeightedGraph,
    pagerank,
    weighted_jaccard,
)
from .labels import AgreementSummary, LabelRecord, agreement_summary
from .pipeline import Pipeline, run_benchmark
from .reactions import (
    ComparisonResult,
    EventReaction,
    compare_approaches,
    excess_views,
    extract_reactions,
    scaled_series,
    static_partitions,
    structural_similarity,
)
from .records import PORTAL_CATEGORIES, ClickRecord, EventRecord
from .redirects import RedirectMap
from .synth import PlantedTruth, RecoveryScores, SynthConfig, evaluate_recovery, generate_corpus
from .topics import (
    ReactionSeries,
    TopicOfAttention,
    build_higher_network,
    detect_topics,
    rank_topics,
    reaction_series,
    select_labeling_subset,
    topic_features,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementSummary",
    "ClickRecord",
    "ComparisonResult",
    "DegenerateEventError",
    "EventNetwork",
    "EventReaction",
    "EventRecord",
    "FlatMultilayerGraph",
    "LabelRecord",
    "PORTAL_CATEGORIES",
    "PageRankConvergenceError",
    "Partition",
    "Pipeline",
    "PipelineConfig",
    "PlantedTruth",
    "ReactionSeries",
    "RecoveryScores",
    "RedirectMap",
    "SweepResult",
    "SynthConfig",
    "TemporalEdgeWeights",
    "TopicOfAttention",
    "WeightedGraph",
    "agreement_summary",
    "ami",
    "attach_series",
    "best_partition",
    "build_event_network",
    "build_higher_network",
    "compare_approaches",
    "cpm_quality",
    "detect_topics",
    "element_centric",
    "evaluate_recovery",
    "excess_views",
    "extract_reactions",
    "flatten_multilayer",
    "generate_corpus",
    "geometric_grid",
    "leiden_cpm",
    "pagerank",
    "rank_topics",
    "reaction_series",
    "resolution_sweep",
    "rolling_correlations",
    "run_benchmark",
    "scaled_series",
    "select_labeling_subset",
    "static_partitions",
    "structural_similarity",
    "topic_features",
    "weighted_jaccard",
    "window_month_weights",
]
