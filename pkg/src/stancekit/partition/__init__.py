"""Balanced bisection, ensemble polarity, modularity and Louvain."""

from .ensemble import (
    CONTROL,
    RIGHTS,
    UNKNOWN,
    AnchorError,
    PolarityScores,
    SideLabels,
    align_runs,
    ensemble_polarity,
    label_sides,
    optimize_balance,
)
from .modularity import Louvain, louvain, modularity
from .multilevel import BalancedBisection, PartitionAssignment, PartitionError, balance_band, bisect

__all__ = [
    "CONTROL",
    "RIGHTS",
    "UNKNOWN",
    "AnchorError",
    "BalancedBisection",
    "Louvain",
    "PartitionAssignment",
    "PartitionError",
    "PolarityScores",
    "SideLabels",
    "align_runs",
    "balance_band",
    "bisect",
    "ensemble_polarity",
    "label_sides",
    "louvain",
    "modularity",
    "optimize_balance",
]
