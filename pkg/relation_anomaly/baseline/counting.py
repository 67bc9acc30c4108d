"""Rarity-by-counting detector evaluated inside each subgroup pool."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import ValidationError
from ..graphdata.models import Triplet, TripletKey

# Ground-truth triplets added during correction were never ranked by the
# generator; they weigh as one full occurrence.
INJECTED_MASS = 1.0
_MIN_MASS = 1e-6


@dataclass
class CountTable:
    """Occurrence weight per ``(subject, predicate, object)`` key of one pool."""

    weights: dict[TripletKey, float] = field(default_factory=dict)

    def weight(self, key: TripletKey) -> float:
        return self.weights.get(key, 0.0)

    def __len__(self) -> int:
        return len(self.weights)


def _mass(triplet: Triplet) -> float:
    if not 0.0 <= triplet.confidence <= 1.0:
        raise ValidationError(f"confidence of {triplet} outside [0, 1]")
    return INJECTED_MASS if triplet.injected else triplet.confidence


def build_count_table(triplets: Iterable[Triplet], soft: bool = False) -> CountTable:
    """Unit counts per key, or summed confidence mass per key when ``soft``."""
    table: dict[TripletKey, float] = defaultdict(float)
    for t in triplets:
        table[t.key] += _mass(t) if soft else 1.0
    return CountTable(dict(table))


def _inverse(table: CountTable, triplets: Sequence[Triplet]) -> np.ndarray:
    if not triplets:
        raise ValidationError("counting needs a non-empty triplet pool")
    return np.array([1.0 / max(table.weight(t.key), _MIN_MASS) for t in triplets])


def count_scores(triplets: Sequence[Triplet]) -> np.ndarray:
    """``1 / count`` of each triplet's exact key within the pool."""
    return _inverse(build_count_table(triplets), triplets)


def soft_count_scores(triplets: Sequence[Triplet]) -> np.ndarray:
    """``1 / accumulated confidence`` of each triplet's key within the pool."""
    return _inverse(build_count_table(triplets, soft=True), triplets)
