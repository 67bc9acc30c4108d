"""Per-image preprocessing, train/test splitting and subgroup construction."""

from __future__ import annotations

import logging
import math
from typing import Iterable

import numpy as np

from ..errors import ContractError, ValidationError
from .models import Dataset, SceneGraph, Subgroup, Triplet

logger = logging.getLogger(__name__)

# Confidence recorded for ground-truth triplets the generator never produced.
INJECTED_CONFIDENCE = 0.0


def select_top_k(graph: SceneGraph, k: int) -> list[Triplet]:
    """The ``k`` most confident triplets, descending; ties keep file order."""
    if k < 1:
        raise ValidationError(f"top-k needs k >= 1, got {k}")
    # sorted() is stable, so equal confidences stay in file order.
    ranked = sorted(graph.triplets, key=lambda t: -t.confidence)
    return ranked[:k]


def filter_minor_objects(triplets: Iterable[Triplet], stoplist: Iterable[str]) -> list[Triplet]:
    stop = frozenset(stoplist)
    if not stop:
        return list(triplets)
    return [t for t in triplets if t.subject not in stop and t.object not in stop]


def label_ground_truth(graph: SceneGraph) -> SceneGraph:
    """Mark each triplet matching a ground-truth descriptor; nothing is added."""
    keys = {d.key for d in graph.ground_truth}
    labelled = tuple(t.model_copy(update={"anomaly_label": t.key in keys}) for t in graph.triplets)
    return graph.model_copy(update={"triplets": labelled})


def inject_ground_truth(graph: SceneGraph) -> SceneGraph:
    """Label matching triplets and append the first descriptor when none matched.

    Raises:
        ContractError: ``graph`` is a normal image.
        ValidationError: the anomalous image has no ground-truth descriptor.
    """
    if not graph.is_anomalous:
        raise ContractError(f"image '{graph.image_id}' is normal; only anomalous images get ground truth")
    if not graph.ground_truth:
        raise ValidationError(f"image '{graph.image_id}': anomalous image without ground truth")

    labelled = label_ground_truth(graph)
    if any(t.anomaly_label for t in labelled.triplets):
        return labelled

    first = graph.ground_truth[0]
    injected = Triplet(
        subject=first.subject,
        predicate=first.predicate,
        object=first.object,
        confidence=INJECTED_CONFIDENCE,
        anomaly_label=True,
        injected=True,
    )
    logger.debug("image %s: injected ground truth %s", graph.image_id, injected)
    return labelled.model_copy(update={"triplets": labelled.triplets + (injected,)})


def preprocess_graph(graph: SceneGraph, top_k: int, stoplist: Iterable[str], corrected: bool = True) -> SceneGraph:
    """Top-k selection, minor-object filtering and ground-truth labelling."""
    kept = filter_minor_objects(select_top_k(graph, top_k), stoplist)
    graph = graph.model_copy(update={"triplets": tuple(kept)})
    if graph.is_anomalous and corrected:
        return inject_ground_truth(graph)
    return label_ground_truth(graph)


def preprocess_dataset(dataset: Dataset, top_k: int, stoplist: Iterable[str], corrected: bool = True) -> Dataset:
    stop = frozenset(stoplist)
    graphs = [preprocess_graph(g, top_k, stop, corrected) for g in dataset.graphs]
    if not corrected:
        missing = [g.image_id for g in graphs if g.is_anomalous and not any(t.anomaly_label for t in g.triplets)]
        if missing:
            logger.warning(
                "%d of %d anomalous images keep no ground-truth triplet after preprocessing",
                len(missing),
                len(dataset.anomalous_graphs),
            )
    return dataset.with_graphs(graphs)


def split_dataset(dataset: Dataset, train_fraction: float, seed: int | np.random.Generator) -> Dataset:
    """Assign normal images to train/test; anomalous images are always test.

    The train side is ``floor(fraction * n_normal)``, lowered if needed so at
    least one normal image remains for testing.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    normals = dataset.normal_graphs
    if not normals:
        raise ValidationError(f"dataset '{dataset.scene}' has no normal images to train on")

    n_train = math.floor(train_fraction * len(normals) + 1e-9)
    n_train = min(n_train, len(normals) - 1)
    if n_train < 1:
        raise ValidationError(
            f"train_fraction {train_fraction} leaves no training image among {len(normals)} normal images"
        )

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    order = rng.permutation(len(normals))
    train_ids = {normals[i].image_id for i in order[:n_train]}
    split = {g.image_id: ("train" if g.image_id in train_ids else "test") for g in dataset.graphs}
    return Dataset(scene=dataset.scene, graphs=dataset.graphs, split=split)


def as_training_set(dataset: Dataset, exclude_ids: Iterable[str] = ()) -> Dataset:
    """Normal images of a train-only dataset, all assigned to train.

    Anomalous images and every image id in ``exclude_ids`` are dropped, so a
    file that is also evaluated contributes through its own split only.
    """
    excluded = frozenset(exclude_ids)
    graphs = [g for g in dataset.normal_graphs if g.image_id not in excluded]
    dropped = len(dataset.normal_graphs) - len(graphs)
    if dropped:
        logger.info("train-only dataset '%s': %d images already evaluated, left out", dataset.scene, dropped)
    return Dataset(scene=dataset.scene, graphs=tuple(graphs), split={g.image_id: "train" for g in graphs})


def build_subgroups(dataset: Dataset, size: int, seed: int | np.random.Generator) -> list[Subgroup]:
    """One subgroup per anomalous image with ``size - 1`` test-side normal companions.

    Companions are drawn without replacement inside a subgroup; a normal image
    may be reused by several subgroups.
    """
    if size < 2:
        raise ValidationError(f"subgroup size must be >= 2, got {size}")
    pool = dataset.test_normal_graphs
    if size - 1 > len(pool):
        raise ValidationError(
            f"subgroup size {size} needs {size - 1} normal test images, only {len(pool)} available"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    subgroups = []
    for graph in dataset.anomalous_graphs:
        picks = rng.choice(len(pool), size=size - 1, replace=False)
        subgroups.append(Subgroup(anomalous_id=graph.image_id, normal_ids=tuple(pool[i].image_id for i in picks)))
    return subgroups
