"""Builders for small hand-made scene graphs and datasets used across the suite."""

from __future__ import annotations

import os
from typing import Sequence

from relation_anomaly.graphdata import Dataset, Descriptor, SceneGraph, Triplet

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
TOY_EMBEDDINGS = os.path.join(DATA_DIR, "toy_embeddings.txt")
SYNTHETIC_SPEC = os.path.join(DATA_DIR, "synthetic_dining.json")
SYNTHETIC_CONFIG = os.path.join(DATA_DIR, "synthetic.cfg")
STOPLIST = os.path.join(DATA_DIR, "stoplist.txt")
SYNONYMS = os.path.join(DATA_DIR, "synonyms.tsv")


def triplet(text: str, confidence: float = 0.9) -> Triplet:
    """``"cup on table"`` or ``"person sitting on|chair"`` style shorthand.

    Three whitespace tokens split into subject, predicate and object; a ``|``
    separates a multi-word predicate from the object.
    """
    if "|" in text:
        head, obj = text.split("|")
        subject, predicate = head.split(" ", 1)
    else:
        subject, predicate, obj = text.split()
    return Triplet(subject=subject, predicate=predicate, object=obj, confidence=confidence)


def normal_graph(image_id: str, texts: Sequence[str], scene: str = "dining") -> SceneGraph:
    triplets = tuple(triplet(t, confidence=1.0 - 0.01 * i) for i, t in enumerate(texts))
    return SceneGraph(image_id=image_id, scene_tag=scene, triplets=triplets, image_label="normal")


def anomalous_graph(
    image_id: str, texts: Sequence[str], ground_truth: Sequence[str], scene: str = "dining"
) -> SceneGraph:
    triplets = tuple(triplet(t, confidence=1.0 - 0.01 * i) for i, t in enumerate(texts))
    gt = tuple(Descriptor(subject=s, predicate=p, object=o) for s, p, o in (g.split() for g in ground_truth))
    return SceneGraph(
        image_id=image_id, scene_tag=scene, triplets=triplets, image_label="anomalous", ground_truth=gt
    )


def tiny_dataset(n_normal: int = 10, n_anomalous: int = 2) -> Dataset:
    """Normal images share a fixed head; anomalous images add a shoe on the table."""
    base = ["cup on table", "plate on table", "chair near table", "fork near plate"]
    graphs = [normal_graph(f"n{i}", base) for i in range(n_normal)]
    graphs += [
        anomalous_graph(f"a{i}", base[:3] + ["shoe on table"], ["shoe on table"]) for i in range(n_anomalous)
    ]
    return Dataset(scene="dining", graphs=tuple(graphs))
