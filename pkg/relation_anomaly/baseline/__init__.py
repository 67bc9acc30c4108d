"""Counting baselines."""

from .counting import INJECTED_MASS, CountTable, build_count_table, count_scores, soft_count_scores

__all__ = ["INJECTED_MASS", "CountTable", "build_count_table", "count_scores", "soft_count_scores"]
