"""Scene graphs rendered as DOT with normalized anomaly scores on their edges."""

from __future__ import annotations

import logging
import os
from typing import Mapping, Sequence

import numpy as np

from ..errors import ValidationError
from ..graphdata.models import SceneGraph
from ..serializers import serialize_dot

logger = logging.getLogger(__name__)

TOP_FLAGGED = 2
FLAG_COLOR = "red"


def normalize_scores(values: Sequence[float]) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant vector maps to all zeros."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return arr
    low, high = float(arr.min()), float(arr.max())
    if high == low:
        return np.zeros_like(arr)
    return (arr - low) / (high - low)


def scored_graph_dot(graph: SceneGraph, scores: Mapping[str, float], top: int = TOP_FLAGGED) -> str:
    """DOT text for one graph; ``scores`` is keyed by triplet instance id.

    Raises:
        ValidationError: a triplet of the graph has no score
    """
    raw = []
    for i in range(len(graph.triplets)):
        instance_id = graph.instance_id(i)
        if instance_id not in scores:
            raise ValidationError(f"triplet '{instance_id}' has no score")
        raw.append(scores[instance_id])
    normalized = normalize_scores(raw)
    flagged = set(np.argsort(-np.asarray(raw, dtype=np.float64), kind="stable")[:top].tolist())

    edges = []
    for i, triplet in enumerate(graph.triplets):
        attrs = {"score": f"{normalized[i]:.4f}"}
        if i in flagged:
            attrs.update(color=FLAG_COLOR, penwidth="2.5", flagged="true")
        label = f"{triplet.predicate} ({normalized[i]:.2f})"
        edges.append((triplet.subject, triplet.object, label, attrs))

    graph_attrs = {"label": f"{graph.image_id} [{graph.image_label}]", "labelloc": "t"}
    return serialize_dot(graph.image_id, edges, graph_attrs)


def export_scored_graph(graph: SceneGraph, scores: Mapping[str, float], path: str) -> str:
    text = scored_graph_dot(graph, scores)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    logger.info("exported %s (%d edges) to %s", graph.image_id, len(graph.triplets), path)
    return path
