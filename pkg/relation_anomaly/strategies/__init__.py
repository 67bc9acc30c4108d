"""Detector strategies.

Every detector implements :class:`BaseStrategy` so the harness can evaluate
the flow and the counting baselines on identical subgroups.
"""

from __future__ import annotations

from ..embed import EmbeddingTable
from .base import BaseStrategy, SeedContext
from .counting_strategy import CountingStrategy
from .flow_strategy import FitSummary, FlowSettings, FlowStrategy


def create_default_strategies(table: EmbeddingTable, settings: FlowSettings | None = None) -> dict[str, BaseStrategy]:
    """Create the default set of detectors for comparison."""
    return {
        "flow": FlowStrategy(table, settings),
        "counting": CountingStrategy(),
        "soft_counting": CountingStrategy(soft=True),
    }


__all__ = [
    "BaseStrategy",
    "SeedContext",
    "CountingStrategy",
    "FlowStrategy",
    "FlowSettings",
    "FitSummary",
    "create_default_strategies",
]
