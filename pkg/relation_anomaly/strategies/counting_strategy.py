"""Counting baseline as a detector strategy."""

from __future__ import annotations

from ..baseline.counting import count_scores, soft_count_scores
from ..graphdata.models import Dataset, Subgroup
from ..metrics.report import PoolScores
from .base import BaseStrategy, SeedContext


class CountingStrategy(BaseStrategy):
    """Scores each triplet by its rarity inside the subgroup it is ranked in.

    Nothing is learned; a normal image shared by two subgroups can get two
    different scores.
    """

    def __init__(self, soft: bool = False):
        super().__init__("soft_counting" if soft else "counting", needs_training=False)
        self.soft = soft

    def score_pools(
        self, dataset: Dataset, subgroups: list[Subgroup], ctx: SeedContext, extra_train: list[Dataset] | None = None
    ) -> PoolScores:
        scorer = soft_count_scores if self.soft else count_scores
        pools: dict[str, dict[str, float]] = {}
        with ctx.stage("score"):
            for subgroup in subgroups:
                ids, triplets = [], []
                for image_id in subgroup.member_ids:
                    graph = dataset.graph(image_id)
                    ids.extend(graph.instance_ids())
                    triplets.extend(graph.triplets)
                pools[subgroup.anomalous_id] = dict(zip(ids, (float(s) for s in scorer(triplets))))
        return pools
