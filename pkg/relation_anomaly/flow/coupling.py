"""Affine coupling layers.

A layer copies the pass-through coordinates ``x1`` (mask = 1) and maps the
rest as ``y2 = x2 * exp(s(x1)) + t(x1)``. The raw scale output goes through
``c * tanh(raw / c)`` when a clamp bound ``c`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import DimensionMismatchError, NonFiniteError, ValidationError
from ..numerics import MlpCache, MlpParams, init_params, mlp_backward, mlp_forward
from ..numerics.matrix import DTYPE, Matrix, as_batch

MASK_PATTERNS = ("alternating", "alternating_shifted", "half")


def make_mask(d_z: int, pattern: str) -> np.ndarray:
    """Binary mask, 1 marking pass-through coordinates."""
    if d_z < 2:
        raise ValidationError(f"a coupling mask needs d_z >= 2, got {d_z}")
    idx = np.arange(d_z)
    if pattern == "alternating":
        mask = (idx % 2 == 0)
    elif pattern == "alternating_shifted":
        mask = (idx % 2 == 1)
    elif pattern == "half":
        mask = idx < math.ceil(d_z / 2)
    else:
        raise ValidationError(f"unknown mask pattern '{pattern}', expected one of {MASK_PATTERNS}")
    return mask.astype(np.int8)


@dataclass(frozen=True)
class CouplingLayer:
    mask: np.ndarray
    s_net: MlpParams
    t_net: MlpParams
    clamp: float | None = 4.0
    pattern: str = ""

    def __post_init__(self):
        mask = np.asarray(self.mask)
        if mask.ndim != 1 or not np.all((mask == 0) | (mask == 1)):
            raise ValidationError("coupling mask must be a binary vector")
        n_pass = int(mask.sum())
        if n_pass == 0 or n_pass == mask.size:
            raise ValidationError("coupling mask needs at least one pass-through and one transformed coordinate")
        n_trans = mask.size - n_pass
        for name, net in (("s_net", self.s_net), ("t_net", self.t_net)):
            if net.in_dim != n_pass or net.out_dim != n_trans:
                raise DimensionMismatchError(f"{name} must map {n_pass} -> {n_trans}", (n_pass, n_trans), (net.in_dim, net.out_dim))
        if self.clamp is not None and not self.clamp > 0:
            raise ValidationError(f"clamp bound must be > 0, got {self.clamp}")

    @property
    def d_z(self) -> int:
        return int(self.mask.size)

    @property
    def pass_idx(self) -> np.ndarray:
        return np.flatnonzero(self.mask == 1)

    @property
    def trans_idx(self) -> np.ndarray:
        return np.flatnonzero(self.mask == 0)

    def arrays(self) -> list[np.ndarray]:
        return self.s_net.arrays() + self.t_net.arrays()

    def with_arrays(self, arrays: list[np.ndarray]) -> "CouplingLayer":
        k = len(self.s_net.arrays())
        return CouplingLayer(
            self.mask, self.s_net.with_arrays(arrays[:k]), self.t_net.with_arrays(arrays[k:]), self.clamp, self.pattern
        )


def init_coupling(
    d_z: int, pattern: str, seed: int | np.random.Generator, hidden: int = 128, clamp: float | None = 4.0
) -> CouplingLayer:
    """s/t nets ``n_pass -> hidden -> hidden -> n_trans`` with a zero final layer (identity start)."""
    mask = make_mask(d_z, pattern)
    n_pass = int(mask.sum())
    n_trans = d_z - n_pass
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dims = [n_pass, hidden, hidden, n_trans]
    s_net = init_params(rng, dims, zero_last=True)
    t_net = init_params(rng, dims, zero_last=True)
    return CouplingLayer(mask, s_net, t_net, clamp, pattern)


class CouplingCache(NamedTuple):
    x2: Matrix
    raw: Matrix
    exp_s: Matrix
    s_cache: MlpCache
    t_cache: MlpCache


def _scale(layer: CouplingLayer, raw: Matrix) -> Matrix:
    if layer.clamp is None:
        return raw
    return layer.clamp * np.tanh(raw / layer.clamp)


def forward_batch(
    layer: CouplingLayer, z: Matrix, layer_index: int = 0, check_finite: bool = True
) -> tuple[Matrix, np.ndarray, CouplingCache]:
    """Forward map on a row batch; returns ``(out, logdet per row, cache)``."""
    if z.shape[1] != layer.d_z:
        raise DimensionMismatchError("coupling input width", (layer.d_z,), z.shape)
    p, q = layer.pass_idx, layer.trans_idx
    x1, x2 = z[:, p], z[:, q]
    try:
        raw, s_cache = mlp_forward(layer.s_net, x1, check_finite=check_finite)
        t, t_cache = mlp_forward(layer.t_net, x1, check_finite=check_finite)
    except NonFiniteError as e:
        raise NonFiniteError(f"coupling sub-network: {e}", layer_index=layer_index) from e
    s = _scale(layer, raw)
    with np.errstate(over="ignore", invalid="ignore"):
        exp_s = np.exp(s)
        y2 = x2 * exp_s + t
    if check_finite and not (np.all(np.isfinite(exp_s)) and np.all(np.isfinite(y2))):
        raise NonFiniteError("exp(s) overflowed in coupling forward", layer_index=layer_index)
    out = z.copy()
    out[:, q] = y2
    return out, s.sum(axis=1), CouplingCache(x2, raw, exp_s, s_cache, t_cache)


def backward_batch(
    layer: CouplingLayer, cache: CouplingCache, d_out: Matrix, d_logdet: np.ndarray
) -> tuple[Matrix, list[np.ndarray]]:
    """Cotangents of the layer input and of ``s_net + t_net`` arrays."""
    p, q = layer.pass_idx, layer.trans_idx
    dy1, dy2 = d_out[:, p], d_out[:, q]
    dx2 = dy2 * cache.exp_s
    ds = dy2 * cache.x2 * cache.exp_s + d_logdet[:, None]
    if layer.clamp is not None:
        ds = ds * (1.0 - np.tanh(cache.raw / layer.clamp) ** 2)
    dx1_s, g_s = mlp_backward(layer.s_net, cache.s_cache, ds)
    dx1_t, g_t = mlp_backward(layer.t_net, cache.t_cache, dy2)
    dx = np.empty_like(d_out)
    dx[:, p] = dy1 + dx1_s + dx1_t
    dx[:, q] = dx2
    return dx, g_s.arrays() + g_t.arrays()


def inverse_batch(layer: CouplingLayer, y: Matrix, layer_index: int = 0) -> Matrix:
    if y.shape[1] != layer.d_z:
        raise DimensionMismatchError("coupling input width", (layer.d_z,), y.shape)
    p, q = layer.pass_idx, layer.trans_idx
    x1 = y[:, p]
    try:
        raw, _ = mlp_forward(layer.s_net, x1)
        t, _ = mlp_forward(layer.t_net, x1)
    except NonFiniteError as e:
        raise NonFiniteError(f"coupling sub-network: {e}", layer_index=layer_index) from e
    with np.errstate(over="ignore", invalid="ignore"):
        x2 = (y[:, q] - t) * np.exp(-_scale(layer, raw))
    if not np.all(np.isfinite(x2)):
        raise NonFiniteError("non-finite value in coupling inverse", layer_index=layer_index)
    z = y.copy()
    z[:, q] = x2
    return z


def coupling_forward(layer: CouplingLayer, z: np.ndarray, layer_index: int = 0):
    """``(z_out, logdet)`` for a vector (scalar logdet) or a row batch (one logdet per row)."""
    batch, single = as_batch(z)
    if not np.all(np.isfinite(batch)):
        raise NonFiniteError("coupling input is not finite", layer_index=layer_index)
    out, logdet, _ = forward_batch(layer, batch, layer_index)
    if single:
        return out[0], float(logdet[0])
    return out, logdet


def coupling_inverse(layer: CouplingLayer, z_out: np.ndarray, layer_index: int = 0) -> np.ndarray:
    batch, single = as_batch(z_out)
    if not np.all(np.isfinite(batch)):
        raise NonFiniteError("coupling inverse input is not finite", layer_index=layer_index)
    z = inverse_batch(layer, np.asarray(batch, dtype=DTYPE), layer_index)
    return z[0] if single else z
