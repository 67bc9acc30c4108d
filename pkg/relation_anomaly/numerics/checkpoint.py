"""Portable text documents for MLP parameters."""

from __future__ import annotations

from typing import Any

import numpy as np

from ..errors import ValidationError
from .matrix import DTYPE, as_matrix
from .mlp import DenseLayer, MlpParams


def params_to_dict(params: MlpParams) -> dict[str, Any]:
    """Row-major values; floats keep full ``repr`` precision when dumped as JSON."""
    return {
        "dims": params.dims,
        "activations": params.activations,
        "layers": [
            {
                "weight": {
                    "rows": layer.in_dim,
                    "cols": layer.out_dim,
                    "values": [float(v) for v in layer.weight.ravel()],
                },
                "bias": [float(v) for v in layer.bias],
            }
            for layer in params.layers
        ],
    }


def params_from_dict(doc: dict[str, Any]) -> MlpParams:
    try:
        activations = doc["activations"]
        layers = []
        for i, entry in enumerate(doc["layers"]):
            w = entry["weight"]
            weight = as_matrix(w["values"], rows=w["rows"], cols=w["cols"])
            bias = np.asarray(entry["bias"], dtype=DTYPE)
            layers.append(DenseLayer(weight, bias, activations[i]))
    except (KeyError, IndexError, TypeError) as e:
        raise ValidationError(f"malformed parameter document: {e}") from e
    params = MlpParams(tuple(layers))
    if params.dims != list(doc["dims"]):
        raise ValidationError(f"declared dims {doc['dims']} do not match layers {params.dims}")
    return params
