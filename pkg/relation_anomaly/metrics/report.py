"""Per-seed evaluation over subgroups and aggregation across seeds."""

from __future__ import annotations

import logging
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import ValidationError
from ..graphdata.models import Dataset, Subgroup
from .ranking import ScoredSet, auc_recall_k, auroc

logger = logging.getLogger(__name__)

PoolScores = Mapping[str, Mapping[str, float]]


@dataclass
class SeedReport:
    """Metrics of one detector for one seed."""

    seed: int
    scene: str
    auroc: float
    auc_recall_k: float
    per_subgroup: dict[str, float] = field(default_factory=dict)
    skipped_subgroups: list[str] = field(default_factory=list)
    n_instances: int = 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "scene": self.scene,
            "auroc": self.auroc,
            "auc_recall_k": self.auc_recall_k,
            "per_subgroup": dict(self.per_subgroup),
            "skipped_subgroups": list(self.skipped_subgroups),
            "n_instances": self.n_instances,
        }


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return float("nan"), 0.0
    mean = statistics.mean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


@dataclass
class EvalReport:
    """Seed reports of one detector on one scene, with mean and sample std."""

    scene: str
    reports: list[SeedReport] = field(default_factory=list)

    @property
    def seeds(self) -> list[int]:
        return [r.seed for r in self.reports]

    @property
    def auroc_mean(self) -> float:
        return _mean_std([r.auroc for r in self.reports])[0]

    @property
    def auroc_std(self) -> float:
        return _mean_std([r.auroc for r in self.reports])[1]

    @property
    def auc_recall_k_mean(self) -> float:
        return _mean_std([r.auc_recall_k for r in self.reports])[0]

    @property
    def auc_recall_k_std(self) -> float:
        return _mean_std([r.auc_recall_k for r in self.reports])[1]

    def to_dict(self) -> dict:
        return {
            "scene": self.scene,
            "seeds": self.seeds,
            "auroc": {"mean": self.auroc_mean, "std": self.auroc_std},
            "auc_recall_k": {"mean": self.auc_recall_k_mean, "std": self.auc_recall_k_std},
            "per_seed": [r.to_dict() for r in self.reports],
        }


def subgroup_pool(dataset: Dataset, subgroup: Subgroup) -> list[tuple[str, int]]:
    """``(instance id, label)`` for every triplet of the subgroup's images."""
    pool = []
    for image_id in subgroup.member_ids:
        graph = dataset.graph(image_id)
        for i, triplet in enumerate(graph.triplets):
            pool.append((graph.instance_id(i), 1 if triplet.anomaly_label else 0))
    return pool


def broadcast_scores(scores: Mapping[str, float], dataset: Dataset, subgroups: Sequence[Subgroup]) -> dict[str, dict[str, float]]:
    """Per-subgroup view of subgroup-independent scores."""
    pools: dict[str, dict[str, float]] = {}
    for subgroup in subgroups:
        pool = {}
        for instance_id, _ in subgroup_pool(dataset, subgroup):
            if instance_id not in scores:
                raise ValidationError(f"triplet '{instance_id}' has no score")
            pool[instance_id] = scores[instance_id]
        pools[subgroup.anomalous_id] = pool
    return pools


def _pooled_score(values: list[float]) -> float:
    first = values[0]
    if all(v == first for v in values):
        return first
    return statistics.fmean(values)


def evaluate_pools(
    pool_scores: PoolScores,
    dataset: Dataset,
    subgroups: Sequence[Subgroup],
    seed: int = 0,
    k_min: int = 1,
    k_max: int = 100,
) -> SeedReport:
    """Evaluate scores that may depend on the subgroup a triplet is ranked in.

    AUC-Recall@k is computed inside each subgroup pool and averaged. AUROC is
    computed once over all subgroup triplets, de-duplicated by instance id; an
    instance scored in several pools contributes the mean of its scores.

    Raises:
        ValidationError: a pool triplet has no score, or the pooled set lacks
            one of the two classes.
    """
    if not subgroups:
        raise ValidationError("evaluation needs at least one subgroup")
    per_subgroup: dict[str, float] = {}
    skipped: list[str] = []
    pooled: dict[str, list[float]] = defaultdict(list)
    labels: dict[str, int] = {}

    for subgroup in subgroups:
        scores = pool_scores.get(subgroup.anomalous_id)
        if scores is None:
            raise ValidationError(f"subgroup '{subgroup.anomalous_id}' has no scores")
        pool = subgroup_pool(dataset, subgroup)
        ids, values, ys = [], [], []
        for instance_id, label in pool:
            if instance_id not in scores:
                raise ValidationError(f"triplet '{instance_id}' has no score")
            ids.append(instance_id)
            values.append(scores[instance_id])
            ys.append(label)
            pooled[instance_id].append(scores[instance_id])
            labels[instance_id] = label
        scored = ScoredSet.build(values, ys, ids)
        if scored.n_positive == 0:
            skipped.append(subgroup.anomalous_id)
            continue
        per_subgroup[subgroup.anomalous_id] = auc_recall_k(scored, k_min, k_max)

    if skipped:
        logger.warning("skipped %d subgroups without a labelled anomaly", len(skipped))
    if not per_subgroup:
        raise ValidationError("no subgroup contains a labelled anomaly")

    ids = list(pooled)
    pooled_set = ScoredSet.build([_pooled_score(pooled[i]) for i in ids], [labels[i] for i in ids], ids)
    return SeedReport(
        seed=seed,
        scene=dataset.scene,
        auroc=auroc(pooled_set),
        auc_recall_k=statistics.mean(per_subgroup.values()),
        per_subgroup=per_subgroup,
        skipped_subgroups=skipped,
        n_instances=len(ids),
    )


def evaluate(
    scores: Mapping[str, float],
    dataset: Dataset,
    subgroups: Sequence[Subgroup],
    seed: int = 0,
    k_min: int = 1,
    k_max: int = 100,
) -> SeedReport:
    """Evaluate one score per triplet instance (``"<image_id>#<index>"``)."""
    return evaluate_pools(broadcast_scores(scores, dataset, subgroups), dataset, subgroups, seed, k_min, k_max)


def aggregate(reports: Sequence[SeedReport]) -> EvalReport:
    if not reports:
        raise ValidationError("nothing to aggregate")
    scenes = {r.scene for r in reports}
    if len(scenes) != 1:
        raise ValidationError(f"cannot aggregate reports of different scenes: {sorted(scenes)}")
    return EvalReport(scene=reports[0].scene, reports=sorted(reports, key=lambda r: r.seed))
