"""Ranking metrics and evaluation reports."""

from .ranking import ScoredSet, auc_recall_k, auroc, recall_at_k
from .report import EvalReport, SeedReport, aggregate, broadcast_scores, evaluate, evaluate_pools, subgroup_pool

__all__ = [
    "ScoredSet",
    "auroc",
    "recall_at_k",
    "auc_recall_k",
    "SeedReport",
    "EvalReport",
    "subgroup_pool",
    "broadcast_scores",
    "evaluate",
    "evaluate_pools",
    "aggregate",
]
