"""Ranking metrics: AUROC, Recall@k and AUC-Recall@k."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from ..errors import DimensionMismatchError, ValidationError


@dataclass(frozen=True)
class ScoredSet:
    """Parallel ids, scores (higher = more anomalous) and 0/1 labels."""

    ids: tuple[str, ...]
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if not (len(self.ids) == self.scores.shape[0] == self.labels.shape[0]):
            raise DimensionMismatchError(
                "ids, scores and labels must have equal lengths",
                (len(self.ids), self.scores.shape[0]),
                (self.labels.shape[0],),
            )
        if not np.all(np.isin(self.labels, (0, 1))):
            raise ValidationError("labels must be 0 or 1")

    @classmethod
    def build(cls, scores: Sequence[float], labels: Sequence[int], ids: Sequence[str] | None = None) -> "ScoredSet":
        scores_arr = np.asarray(scores, dtype=np.float64)
        labels_arr = np.asarray(labels, dtype=np.int64)
        if ids is None:
            ids = [str(i) for i in range(scores_arr.shape[0])]
        return cls(tuple(ids), scores_arr, labels_arr)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n_positive(self) -> int:
        return int(self.labels.sum())


def auroc(scored: ScoredSet) -> float:
    """Mann-Whitney AUROC; tied (anomalous, normal) pairs count one half."""
    n_pos = scored.n_positive
    n_neg = len(scored) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError(f"AUROC needs both classes, got {n_pos} positives and {n_neg} negatives")
    ranks = rankdata(scored.scores, method="average")
    u = float(ranks[scored.labels == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def _hits_by_rank(scored: ScoredSet) -> np.ndarray:
    """Cumulative count of anomalies among the top ``r`` items, r = 1..n."""
    order = np.argsort(-scored.scores, kind="stable")
    return np.cumsum(scored.labels[order])


def recall_at_k(scored: ScoredSet, k: int) -> float:
    """Fraction of anomalies ranked within the top ``k`` (stable descending order)."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    n_pos = scored.n_positive
    if n_pos == 0:
        raise ValidationError("Recall@k needs at least one anomaly")
    hits = _hits_by_rank(scored)
    return float(hits[min(k, len(hits)) - 1]) / n_pos


def auc_recall_k(scored: ScoredSet, k_min: int = 1, k_max: int = 100) -> float:
    """Mean Recall@k over ``k_min..k_max``; recall saturates past the set size."""
    if not 1 <= k_min <= k_max:
        raise ValidationError(f"invalid k range [{k_min}, {k_max}]")
    n_pos = scored.n_positive
    if n_pos == 0:
        raise ValidationError("AUC-Recall@k needs at least one anomaly")
    hits = _hits_by_rank(scored)
    ks = np.arange(k_min, k_max + 1)
    recalls = hits[np.minimum(ks, len(hits)) - 1] / n_pos
    return float(recalls.mean())
