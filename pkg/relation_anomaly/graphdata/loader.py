"""Read and write scene-graph datasets, stoplists and synonym maps."""

from __future__ import annotations

import json
import logging
from typing import Any

import pydantic

from ..errors import ValidationError
from ..serializers import write_json
from .models import Dataset, SceneGraph, SynonymMap

logger = logging.getLogger(__name__)


def _format_pydantic_error(image_id: str, err: pydantic.ValidationError) -> str:
    first = err.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<record>"
    return f"image '{image_id}': field '{location}': {first['msg']}"


def dataset_from_dict(doc: dict[str, Any], source: str = "<memory>") -> Dataset:
    """Validate a dataset document (``{"scene": ..., "images": [...]}``)."""
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: top level must be an object")
    scene = doc.get("scene", "")
    if not isinstance(scene, str):
        raise ValidationError(f"{source}: field 'scene' must be a string")
    images = doc.get("images", [])
    if not isinstance(images, list):
        raise ValidationError(f"{source}: field 'images' must be a list")

    graphs = []
    for position, record in enumerate(images):
        if not isinstance(record, dict):
            raise ValidationError(f"{source}: image #{position} is not an object")
        image_id = str(record.get("id", f"#{position}"))
        try:
            graph = SceneGraph.model_validate(
                {
                    "image_id": record.get("id"),
                    "scene_tag": record.get("scene", scene),
                    "image_label": record.get("label"),
                    "triplets": record.get("triplets", []),
                    "ground_truth": record.get("ground_truth", []),
                }
            )
        except pydantic.ValidationError as e:
            raise ValidationError(f"{source}: {_format_pydantic_error(image_id, e)}") from e
        graphs.append(graph)

    try:
        return Dataset(scene=scene, graphs=tuple(graphs))
    except pydantic.ValidationError as e:
        raise ValidationError(f"{source}: {e.errors()[0]['msg']}") from e


def dataset_to_dict(dataset: Dataset) -> dict[str, Any]:
    """Inverse of :func:`dataset_from_dict` (the split is not part of the file format)."""
    return {
        "scene": dataset.scene,
        "images": [
            {
                "id": g.image_id,
                "label": g.image_label,
                "triplets": [
                    {"subject": t.subject, "predicate": t.predicate, "object": t.object, "confidence": t.confidence}
                    for t in g.triplets
                ],
                "ground_truth": [
                    {"subject": d.subject, "predicate": d.predicate, "object": d.object} for d in g.ground_truth
                ],
            }
            for g in dataset.graphs
        ],
    }


def load_dataset(path: str) -> Dataset:
    """Load a scene-graph dataset file.

    Raises:
        ValidationError: unreadable JSON or a malformed record; the message
            names the image id and the offending field.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    dataset = dataset_from_dict(doc, source=path)
    n_anomalous = len(dataset.anomalous_graphs)
    logger.info(
        "loaded %s: scene=%s, %d normal / %d anomalous images",
        path,
        dataset.scene,
        len(dataset.graphs) - n_anomalous,
        n_anomalous,
    )
    return dataset


def save_dataset(path: str, dataset: Dataset) -> str:
    return write_json(path, dataset_to_dict(dataset))


def load_stoplist(path: str) -> frozenset[str]:
    """One token per line; blank lines and ``#`` comments are ignored."""
    tokens = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            token = line.split("#", 1)[0].strip()
            if token:
                tokens.add(token)
    return frozenset(tokens)


def load_synonyms(path: str) -> SynonymMap:
    """``original<TAB>replacement`` per line."""
    mapping: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise ValidationError(f"{path}:{lineno}: expected 'original<TAB>replacement'")
            original, replacement = parts[0].strip(), parts[1].strip()
            if original in mapping and mapping[original] != replacement:
                raise ValidationError(f"{path}:{lineno}: '{original}' already maps to '{mapping[original]}'")
            mapping[original] = replacement
    try:
        return SynonymMap(mapping=mapping)
    except pydantic.ValidationError as e:
        raise ValidationError(f"{path}: {e.errors()[0]['msg']}") from e
