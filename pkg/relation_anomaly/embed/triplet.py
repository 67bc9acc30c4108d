"""Triplet vectors: aggregation of subject, predicate and object embeddings."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from ..errors import ValidationError
from ..graphdata.models import Triplet
from ..numerics.matrix import DTYPE, Matrix
from .table import EmbeddingTable, embed_phrase

logger = logging.getLogger(__name__)

Mode = Literal["concat", "sum", "mult", "node_only", "template"]
MODES: tuple[str, ...] = ("concat", "sum", "mult", "node_only", "template")

TEMPLATE = "in a {scene} {subject} {predicate} {object}"


def vector_width(dim: int, mode: str) -> int:
    if mode == "concat":
        return 3 * dim
    if mode == "node_only":
        return 2 * dim
    if mode in ("sum", "mult", "template"):
        return dim
    raise ValidationError(f"unknown aggregation mode '{mode}', expected one of {MODES}")


@dataclass(frozen=True)
class TripletVector:
    values: np.ndarray
    mode: str
    triplet_id: str = ""

    def __post_init__(self):
        if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
            raise ValidationError(f"triplet vector '{self.triplet_id}' must be a finite 1-D array")

    def __len__(self) -> int:
        return self.values.shape[0]


def _aggregate(table: EmbeddingTable, triplet: Triplet, mode: str, scene: str) -> np.ndarray:
    if mode == "template":
        sentence = TEMPLATE.format(
            scene=scene.replace("_", " "),
            subject=triplet.subject,
            predicate=triplet.predicate,
            object=triplet.object,
        )
        return embed_phrase(table, sentence).values

    v_s = embed_phrase(table, triplet.subject).values
    v_o = embed_phrase(table, triplet.object).values
    if mode == "node_only":
        return np.concatenate([v_s, v_o])
    v_p = embed_phrase(table, triplet.predicate).values
    if mode == "concat":
        # predicate, subject, object; checkpoints depend on this order
        return np.concatenate([v_p, v_s, v_o])
    if mode == "sum":
        return v_p + v_s + v_o
    if mode == "mult":
        return v_p * v_s * v_o
    raise ValidationError(f"unknown aggregation mode '{mode}', expected one of {MODES}")


def embed_triplet(
    table: EmbeddingTable, triplet: Triplet, mode: str = "concat", triplet_id: str = "", scene: str = ""
) -> TripletVector:
    """Embed one triplet.

    ``scene`` is only read by the ``template`` mode, which averages the word
    vectors of the sentence "in a <scene> <subject> <predicate> <object>".
    """
    vector_width(table.dim, mode)
    return TripletVector(_aggregate(table, triplet, mode, scene), mode, triplet_id)


def embed_triplets(
    table: EmbeddingTable, triplets: Iterable[Triplet], mode: str = "concat", scene: str = ""
) -> Matrix:
    """Row-stacked vectors for a triplet sequence; equal keys share one computation."""
    width = vector_width(table.dim, mode)
    cache: dict[tuple[str, str, str], np.ndarray] = {}
    rows = []
    for triplet in triplets:
        vec = cache.get(triplet.key)
        if vec is None:
            vec = _aggregate(table, triplet, mode, scene)
            cache[triplet.key] = vec
        rows.append(vec)
    if not rows:
        return np.zeros((0, width), dtype=DTYPE)
    return np.vstack(rows)


def add_noise(vec: TripletVector, sigma: float, seed: int | np.random.Generator) -> TripletVector:
    """Perturb every component with independent ``N(0, sigma^2)`` noise."""
    noisy = add_noise_batch(vec.values.reshape(1, -1), sigma, seed)[0]
    return TripletVector(noisy, vec.mode, vec.triplet_id)


def add_noise_batch(batch: Matrix, sigma: float, seed: int | np.random.Generator) -> Matrix:
    if sigma < 0:
        raise ValidationError(f"noise sigma must be >= 0, got {sigma}")
    batch = np.asarray(batch, dtype=DTYPE)
    if sigma == 0:
        return batch.copy()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return batch + rng.normal(0.0, sigma, size=batch.shape)
