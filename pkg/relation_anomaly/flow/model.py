"""RealNVP flow model, anomaly scores and the training objective."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..errors import DimensionMismatchError, NonFiniteError, ValidationError
from ..numerics import params_from_dict, params_to_dict
from ..numerics.matrix import DTYPE, Matrix, as_batch
from ..serializers import read_json, write_json
from .coupling import CouplingLayer, backward_batch, forward_batch, init_coupling, inverse_batch, make_mask

logger = logging.getLogger(__name__)

DEFAULT_MASKS = ("alternating", "alternating_shifted", "half")
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class FlowModel:
    layers: tuple[CouplingLayer, ...]
    base: str = "standard_normal"

    def __post_init__(self):
        if not self.layers:
            raise ValidationError("a flow needs at least one coupling layer")
        widths = {layer.d_z for layer in self.layers}
        if len(widths) != 1:
            raise DimensionMismatchError("coupling layers disagree on d_z", tuple(sorted(widths)))
        if self.base != "standard_normal":
            raise ValidationError(f"unsupported base distribution '{self.base}'")

    @property
    def d_z(self) -> int:
        return self.layers[0].d_z

    def arrays(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for layer in self.layers:
            out.extend(layer.arrays())
        return out

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> "FlowModel":
        layers, offset = [], 0
        for layer in self.layers:
            k = len(layer.arrays())
            layers.append(layer.with_arrays(list(arrays[offset : offset + k])))
            offset += k
        if offset != len(arrays):
            raise DimensionMismatchError("flow parameter list length", (offset,), (len(arrays),))
        return FlowModel(tuple(layers), self.base)

    def frozen(self) -> "FlowModel":
        arrays = [a.copy() for a in self.arrays()]
        for a in arrays:
            a.setflags(write=False)
        return self.with_arrays(arrays)


def init_flow(
    d_z: int,
    seed: int | np.random.Generator,
    n_layers: int = 3,
    hidden: int = 128,
    masks: Sequence[str] | None = None,
    clamp: float | None = 4.0,
) -> FlowModel:
    """Coupling stack with zero-initialised final s/t layers, i.e. the identity map."""
    masks = list(masks) if masks else [DEFAULT_MASKS[i % len(DEFAULT_MASKS)] for i in range(n_layers)]
    if len(masks) != n_layers:
        raise ValidationError(f"expected {n_layers} mask patterns, got {len(masks)}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return FlowModel(tuple(init_coupling(d_z, m, rng, hidden=hidden, clamp=clamp) for m in masks))


def forward_with_cache(model: FlowModel, z: Matrix, check_finite: bool = True):
    if z.shape[1] != model.d_z:
        raise DimensionMismatchError("flow input width", (model.d_z,), z.shape)
    h = z
    total = np.zeros(z.shape[0], dtype=DTYPE)
    caches = []
    for i, layer in enumerate(model.layers):
        h, logdet, cache = forward_batch(layer, h, layer_index=i, check_finite=check_finite)
        total = total + logdet
        caches.append(cache)
    return h, total, caches


def flow_forward(model: FlowModel, z: np.ndarray):
    """``(u, total_logdet)``; scalar logdet for a single vector."""
    batch, single = as_batch(z)
    u, total, _ = forward_with_cache(model, batch)
    if single:
        return u[0], float(total[0])
    return u, total


def flow_inverse(model: FlowModel, u: np.ndarray) -> np.ndarray:
    batch, single = as_batch(u)
    if batch.shape[1] != model.d_z:
        raise DimensionMismatchError("flow input width", (model.d_z,), batch.shape)
    h = batch
    for i in range(len(model.layers) - 1, -1, -1):
        h = inverse_batch(model.layers[i], h, layer_index=i)
    return h[0] if single else h


def anomaly_score(u: np.ndarray, total_logdet, d_z: int):
    """Negative log-density ``0.5 * ||u||^2 + (d_z / 2) ln(2 pi) - logdet``.

    Works on a single ``u`` or a row batch; non-finite inputs yield non-finite
    scores instead of raising.
    """
    u = np.asarray(u, dtype=DTYPE)
    with np.errstate(over="ignore", invalid="ignore"):
        sq = 0.5 * np.sum(u * u, axis=-1)
        score = sq + 0.5 * d_z * LOG_2PI - total_logdet
    return float(score) if np.ndim(score) == 0 else score


@dataclass(frozen=True)
class ScoreResult:
    triplet_id: str
    score: float
    logdet: float
    valid: bool = True


def replace_non_finite(raw: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Swap non-finite scores for the largest finite one; returns ``(scores, valid)``."""
    raw = np.asarray(raw, dtype=DTYPE)
    if raw.size == 0:
        raise ValidationError("cannot score an empty batch")
    valid = np.isfinite(raw)
    if not valid.any():
        raise NonFiniteError("every score in the batch is non-finite")
    scores = np.where(valid, raw, raw[valid].max())
    return scores, valid


def score_batch(model: FlowModel, latents: np.ndarray, ids: Sequence[str] | None = None) -> list[ScoreResult]:
    """Score latents; invalid (non-finite) scores are replaced by the batch maximum."""
    batch, _ = as_batch(latents)
    if batch.shape[0] == 0:
        raise ValidationError("cannot score an empty batch")
    if ids is None:
        ids = [str(i) for i in range(batch.shape[0])]
    if len(ids) != batch.shape[0]:
        raise DimensionMismatchError("ids vs latents", (len(ids),), (batch.shape[0],))
    u, logdet, _ = forward_with_cache(model, batch, check_finite=False)
    scores, valid = replace_non_finite(anomaly_score(u, logdet, model.d_z))
    if not valid.all():
        logger.warning("%d of %d scores were non-finite and replaced by the batch maximum", int((~valid).sum()), len(valid))
    return [
        ScoreResult(triplet_id=str(i), score=float(s), logdet=float(ld), valid=bool(v))
        for i, s, ld, v in zip(ids, scores, logdet, valid)
    ]


def flow_loss(u: np.ndarray, logdet: np.ndarray) -> float:
    """Batch mean of ``0.5 * ||u||^2 - logdet`` (minimised during training)."""
    u, _ = as_batch(u)
    logdet = np.atleast_1d(np.asarray(logdet, dtype=DTYPE))
    if logdet.shape != (u.shape[0],):
        raise DimensionMismatchError("logdet vs batch", (u.shape[0],), logdet.shape)
    return float(np.mean(0.5 * np.sum(u * u, axis=1) - logdet))


def flow_loss_and_grads(model: FlowModel, z: Matrix) -> tuple[float, list[np.ndarray]]:
    """Training loss on a batch and its gradient for every flow array."""
    z = np.asarray(z, dtype=DTYPE)
    u, logdet, caches = forward_with_cache(model, z)
    loss = flow_loss(u, logdet)
    n = z.shape[0]
    d_h = u / n
    d_logdet = np.full(n, -1.0 / n)
    grads: list[list[np.ndarray]] = [None] * len(model.layers)  # type: ignore[list-item]
    for i in range(len(model.layers) - 1, -1, -1):
        d_h, grads[i] = backward_batch(model.layers[i], caches[i], d_h, d_logdet)
    return loss, [g for layer_grads in grads for g in layer_grads]


def flow_to_dict(model: FlowModel, seed: int | None = None, **metadata: Any) -> dict[str, Any]:
    return {
        "d_z": model.d_z,
        "n_layers": len(model.layers),
        "base": model.base,
        "layers": [
            {
                "mask_pattern": layer.pattern,
                "mask": [int(v) for v in layer.mask],
                "clamp": layer.clamp,
                "s_net": params_to_dict(layer.s_net),
                "t_net": params_to_dict(layer.t_net),
            }
            for layer in model.layers
        ],
        "seed": seed,
        "training": metadata,
    }


def flow_from_dict(doc: dict[str, Any]) -> FlowModel:
    try:
        layers = []
        for entry in doc["layers"]:
            mask = np.asarray(entry["mask"], dtype=np.int8)
            if entry.get("mask_pattern") and not np.array_equal(mask, make_mask(mask.size, entry["mask_pattern"])):
                raise ValidationError(f"mask does not match pattern '{entry['mask_pattern']}'")
            layers.append(
                CouplingLayer(
                    mask,
                    params_from_dict(entry["s_net"]),
                    params_from_dict(entry["t_net"]),
                    entry.get("clamp"),
                    entry.get("mask_pattern", ""),
                )
            )
        model = FlowModel(tuple(layers), doc.get("base", "standard_normal"))
    except KeyError as e:
        raise ValidationError(f"flow checkpoint is missing {e}") from e
    if model.d_z != doc.get("d_z", model.d_z):
        raise ValidationError("flow checkpoint d_z does not match its layers")
    return model.frozen()


def save_flow(path: str, model: FlowModel, seed: int | None = None, **metadata: Any) -> str:
    return write_json(path, flow_to_dict(model, seed=seed, **metadata))


def load_flow(path: str) -> FlowModel:
    return flow_from_dict(read_json(path))
