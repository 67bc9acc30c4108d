"""Synthetic long-tail scene-graph datasets with known anomalies.

Normal images sample triplets from a ranked vocabulary with Zipf weights
``w_i ∝ (i + 1) ** -exponent``. Every anomalous image swaps one of its slots
for a triplet whose (subject, object) pairing never occurs in the normal
vocabulary, so its density under the training data is zero.
"""

from __future__ import annotations

import itertools
import logging

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ConfigError
from ..serializers import read_json
from .models import Dataset, Descriptor, SceneGraph, Triplet, TripletKey

logger = logging.getLogger(__name__)


class SyntheticConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scene: str = "synthetic"
    normal_triplets: list[tuple[str, str, str]] = Field(min_length=1, description="Most frequent triplets, by rank")
    tail_objects: list[str] = Field(default_factory=list)
    tail_predicates: list[str] = Field(default_factory=list)
    n_normal_types: int | None = Field(default=None, ge=1, description="Vocabulary size including the random tail")
    vocabulary_seed: int = 0
    zipf_exponent: float = Field(default=1.0, gt=0)
    anomalous_triplets: list[tuple[str, str, str]] = Field(default_factory=list)
    inverse_predicates: dict[str, str] = Field(default_factory=dict)
    n_normal: int = Field(default=60, ge=0)
    n_anomalous: int = Field(default=30, ge=0)
    triplets_per_image: int = Field(default=30, ge=1)
    confidence_low: float = Field(default=0.3, ge=0, le=1)
    confidence_high: float = Field(default=1.0, ge=0, le=1)


def load_synthetic_config(path: str) -> SyntheticConfig:
    try:
        return SyntheticConfig.model_validate(read_json(path))
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"{path}: field '{'.'.join(map(str, first['loc']))}': {first['msg']}") from e


def zipf_weights(n: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    w = ranks**-exponent
    return w / w.sum()


def _pairings(keys: list[TripletKey]) -> set[tuple[str, str]]:
    return {(s, o) for s, _, o in keys}


def normal_vocabulary(config: SyntheticConfig) -> list[TripletKey]:
    """Ranked normal triplet types: the configured head, then a seeded random tail."""
    vocab: list[TripletKey] = list(dict.fromkeys(tuple(t) for t in config.normal_triplets))
    target = config.n_normal_types or len(vocab)
    if target <= len(vocab):
        return vocab[:target]
    if not config.tail_objects or not config.tail_predicates:
        raise ConfigError("n_normal_types exceeds normal_triplets but no tail vocabulary is configured")

    forbidden = _pairings([tuple(t) for t in config.anomalous_triplets])
    taken = set(vocab)
    candidates = [
        (s, p, o)
        for s, o in itertools.permutations(config.tail_objects, 2)
        if (s, o) not in forbidden
        for p in config.tail_predicates
        if (s, p, o) not in taken
    ]
    needed = target - len(vocab)
    if needed > len(candidates):
        raise ConfigError(f"tail vocabulary yields {len(candidates)} triplet types, {needed} requested")
    rng = np.random.default_rng(config.vocabulary_seed)
    picks = rng.choice(len(candidates), size=needed, replace=False)
    vocab.extend(candidates[i] for i in picks)
    return vocab


def _check(config: SyntheticConfig, vocab: list[TripletKey]) -> None:
    if config.confidence_low > config.confidence_high:
        raise ConfigError(f"confidence_low {config.confidence_low} exceeds confidence_high {config.confidence_high}")
    if config.n_anomalous > 0 and not config.anomalous_triplets:
        raise ConfigError("anomalous images requested but no anomalous_triplets configured")
    overlap = _pairings([tuple(t) for t in config.anomalous_triplets]) & _pairings(vocab)
    if overlap:
        pairs = ", ".join(f"{s}/{o}" for s, o in sorted(overlap))
        raise ConfigError(f"anomalous pairings overlap the normal vocabulary: {pairs}")


def _descriptors(key: TripletKey, inverse_predicates: dict[str, str]) -> tuple[Descriptor, ...]:
    s, p, o = key
    out = [Descriptor(subject=s, predicate=p, object=o)]
    if p in inverse_predicates:
        out.append(Descriptor(subject=o, predicate=inverse_predicates[p], object=s))
    return tuple(out)


def gen_synthetic(config: SyntheticConfig, seed: int) -> Dataset:
    """Generate a deterministic dataset from ``config``.

    Raises:
        ConfigError: an anomalous pairing also occurs in the normal vocabulary.
    """
    vocab = normal_vocabulary(config)
    _check(config, vocab)
    weights = zipf_weights(len(vocab), config.zipf_exponent)
    rng = np.random.default_rng(seed)
    lo, hi = config.confidence_low, config.confidence_high

    def sample_normal(count: int) -> list[Triplet]:
        idx = rng.choice(len(vocab), size=count, p=weights)
        conf = rng.uniform(lo, hi, size=count)
        return [
            Triplet(subject=vocab[i][0], predicate=vocab[i][1], object=vocab[i][2], confidence=float(c))
            for i, c in zip(idx, conf)
        ]

    graphs: list[SceneGraph] = []
    for n in range(config.n_normal):
        graphs.append(
            SceneGraph(
                image_id=f"{config.scene}_normal_{n:03d}",
                scene_tag=config.scene,
                triplets=tuple(sample_normal(config.triplets_per_image)),
                image_label="normal",
            )
        )

    for n in range(config.n_anomalous):
        triplets = sample_normal(config.triplets_per_image - 1)
        key = tuple(config.anomalous_triplets[int(rng.integers(len(config.anomalous_triplets)))])
        anomaly = Triplet(subject=key[0], predicate=key[1], object=key[2], confidence=float(rng.uniform(lo, hi)))
        triplets.insert(int(rng.integers(len(triplets) + 1)), anomaly)
        graphs.append(
            SceneGraph(
                image_id=f"{config.scene}_anomalous_{n:03d}",
                scene_tag=config.scene,
                triplets=tuple(triplets),
                image_label="anomalous",
                ground_truth=_descriptors(key, config.inverse_predicates),
            )
        )

    logger.info(
        "generated %d normal + %d anomalous images over %d normal triplet types (seed %d)",
        config.n_normal,
        config.n_anomalous,
        len(vocab),
        seed,
    )
    return Dataset(scene=config.scene, graphs=tuple(graphs))
