"""Base class for anomaly detectors."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from typing import Callable, ContextManager

import numpy as np

from ..graphdata.models import Dataset, Subgroup
from ..metrics.report import PoolScores


def _no_stage(name: str) -> ContextManager:
    return contextlib.nullcontext()


@dataclass
class SeedContext:
    """Everything a detector needs from the seed it runs under.

    ``rng(stage)`` hands out the generator reserved for a pipeline stage and
    ``stage(name)`` wraps a block for timing and error tagging.
    """

    seed: int
    rng: Callable[[str], np.random.Generator]
    stage: Callable[[str], ContextManager] = field(default=_no_stage)
    checkpoint_dir: str | None = None


class BaseStrategy:
    """Base class for detectors.

    All detectors inherit from this class and implement ``score_pools``,
    returning for every subgroup a score per triplet instance of its pool.
    """

    def __init__(self, name: str, needs_training: bool):
        """Initialize the strategy.

        Args:
            name: Unique identifier used in reports and file names
            needs_training: Whether the detector learns from the train split
        """
        self.name = name
        self.needs_training = needs_training

    def score_pools(
        self, dataset: Dataset, subgroups: list[Subgroup], ctx: SeedContext, extra_train: list[Dataset] | None = None
    ) -> PoolScores:
        """Score every triplet of every subgroup pool.

        Args:
            dataset: Preprocessed dataset with its train/test split
            subgroups: Evaluation subgroups built from ``dataset``
            ctx: Seed context
            extra_train: Preprocessed datasets whose train side joins the training data

        Returns:
            ``{anomalous image id: {instance id: score}}``
        """
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
