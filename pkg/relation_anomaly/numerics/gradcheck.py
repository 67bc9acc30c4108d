"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..errors import NonFiniteError, ValidationError

LossFn = Callable[[Sequence[np.ndarray]], tuple[float, Sequence[np.ndarray]]]

# Coordinates whose gradients are both below this are compared absolutely.
_ABS_FLOOR = 1e-6


def grad_check(
    loss_fn: LossFn,
    params: Sequence[np.ndarray],
    eps: float = 1e-5,
    max_coords: int | None = None,
    seed: int = 0,
) -> float:
    """Compare analytic and numerical gradients coordinate by coordinate.

    Args:
        loss_fn: Maps a parameter list to ``(loss, grads)``; must be pure
        params: Point at which gradients are compared
        eps: Central-difference step
        max_coords: Probe at most this many randomly chosen coordinates per array
        seed: Seed for the coordinate sample

    Returns:
        Worst relative error ``|a - n| / max(|a|, |n|, 1e-6)``.
    """
    if not eps > 0:
        raise ValidationError(f"eps must be > 0, got {eps}")
    base = [np.array(p, dtype=np.float64) for p in params]
    loss, analytic = loss_fn(base)
    if not math.isfinite(loss):
        raise NonFiniteError(f"loss is not finite at the evaluation point: {loss}")

    rng = np.random.default_rng(seed)
    worst = 0.0
    for k, (p, g) in enumerate(zip(base, analytic)):
        flat_indices = np.arange(p.size)
        if max_coords is not None and p.size > max_coords:
            flat_indices = rng.choice(p.size, size=max_coords, replace=False)
        for flat in flat_indices:
            idx = np.unravel_index(flat, p.shape)
            original = p[idx]
            p[idx] = original + eps
            up, _ = loss_fn(base)
            p[idx] = original - eps
            down, _ = loss_fn(base)
            p[idx] = original
            if not (math.isfinite(up) and math.isfinite(down)):
                raise NonFiniteError(f"non-finite loss while probing parameter {k} at {idx}")
            numeric = (up - down) / (2.0 * eps)
            a = float(np.asarray(g)[idx])
            err = abs(a - numeric) / max(abs(a), abs(numeric), _ABS_FLOOR)
            worst = max(worst, err)
    return worst
