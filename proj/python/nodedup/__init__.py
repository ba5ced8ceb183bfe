"""Node duplication for cold-start link prediction."""

from ._core import (
    ConfigError,
    DataError,
    DataSplit,
    DivergenceError,
    Error,
    Graph,
    augment,
    auc,
    buckets,
    build_id,
    evaluate_heuristic,
    generate_synthetic,
    heuristic_score,
    hits_at_k,
    load_config,
    load_dataset,
    run,
    transductive_split,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DataSplit",
    "DivergenceError",
    "Error",
    "Graph",
    "augment",
    "auc",
    "buckets",
    "build_id",
    "evaluate_heuristic",
    "generate_synthetic",
    "heuristic_score",
    "hits_at_k",
    "load_config",
    "load_dataset",
    "run",
    "transductive_split",
]
