"""Multi-view fusion-regularized clustering with group sparsity."""

from .admm import SolverState, initialize, objective, run, solve
from .data import (
    ClusteringResult,
    HyperParams,
    MultiViewDataset,
    View,
    assemble_dataset,
    default_view_weights,
)
from .graph import FusionGraph, aggregate_gower, build_graph, gower_feature_distance
from .metrics import accuracy, ari, fmi, nmi

__all__ = [
    "ClusteringResult", "FusionGraph", "HyperParams", "MultiViewDataset", "SolverState", "View",
    "accuracy", "aggregate_gower", "ari", "assemble_dataset", "build_graph", "default_view_weights",
    "fmi", "gower_feature_distance", "initialize", "nmi", "objective", "run", "solve",
]

__version__ = "0.1.0"
