"""Synonym substitution for robustness sweeps."""

from __future__ import annotations

import itertools
import logging

import numpy as np

from ..errors import ValidationError
from .models import SLOTS, Dataset, Descriptor, SceneGraph, SynonymMap, Triplet

logger = logging.getLogger(__name__)


def _substitute_slot(text: str, synonyms: SynonymMap, rate: float, rng: np.random.Generator) -> tuple[str, int, int]:
    """Replace mapped words of one slot; returns ``(text, eligible, replaced)``."""
    words = text.split(" ")
    eligible = replaced = 0
    for i, word in enumerate(words):
        if word in synonyms:
            eligible += 1
            if rng.random() < rate:
                words[i] = synonyms[word]
                replaced += 1
    return " ".join(words), eligible, replaced


def _slot_variants(text: str, synonyms: SynonymMap) -> list[str]:
    options = [[w, synonyms[w]] if w in synonyms else [w] for w in text.split(" ")]
    return [" ".join(combo) for combo in itertools.product(*options)]


def synonym_variants(descriptor: Descriptor, synonyms: SynonymMap) -> list[Descriptor]:
    """Every phrasing reachable by substituting any subset of mapped words."""
    per_slot = [_slot_variants(getattr(descriptor, slot), synonyms) for slot in SLOTS]
    return [Descriptor(subject=s, predicate=p, object=o) for s, p, o in itertools.product(*per_slot)]


def _extend_ground_truth(graph: SceneGraph, synonyms: SynonymMap) -> tuple[Descriptor, ...]:
    seen = {d.key for d in graph.ground_truth}
    extended = list(graph.ground_truth)
    for descriptor in graph.ground_truth:
        for variant in synonym_variants(descriptor, synonyms):
            if variant.key not in seen:
                seen.add(variant.key)
                extended.append(variant)
    return tuple(extended)


def apply_synonyms(dataset: Dataset, synonyms: SynonymMap, rate: float, seed: int | np.random.Generator) -> Dataset:
    """Replace each mapped word occurrence independently with probability ``rate``.

    Occurrences are visited in file order (graph, triplet, slot, word), so a
    given seed always touches the same occurrences. Ground-truth lists of
    anomalous images gain every synonym-substituted phrasing when ``rate > 0``.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValidationError(f"synonym rate must lie in [0, 1], got {rate}")
    if rate == 0.0 or len(synonyms) == 0:
        return dataset

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    eligible = replaced = 0
    graphs = []
    for graph in dataset.graphs:
        triplets = []
        for triplet in graph.triplets:
            update: dict[str, str] = {}
            for slot in SLOTS:
                text, n_eligible, n_replaced = _substitute_slot(getattr(triplet, slot), synonyms, rate, rng)
                eligible += n_eligible
                replaced += n_replaced
                if n_replaced:
                    update[slot] = text
            triplets.append(triplet.model_copy(update=update) if update else triplet)
        changes: dict[str, object] = {"triplets": tuple(triplets)}
        if graph.is_anomalous:
            changes["ground_truth"] = _extend_ground_truth(graph, synonyms)
        graphs.append(graph.model_copy(update=changes))

    logger.info("synonym rate %.2f: replaced %d of %d eligible word occurrences", rate, replaced, eligible)
    return dataset.with_graphs(graphs)


def count_mapped_occurrences(triplets: list[Triplet], synonyms: SynonymMap) -> int:
    return sum(
        1 for t in triplets for slot in SLOTS for word in getattr(t, slot).split(" ") if word in synonyms
    )
