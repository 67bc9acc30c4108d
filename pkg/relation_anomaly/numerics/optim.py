"""Adam/AdamW, reduce-on-plateau scheduling and batch iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..errors import DimensionMismatchError, NonFiniteError, ValidationError

FULL_BATCH_LIMIT = 4096
MINI_BATCH_SIZE = 256


@dataclass
class AdamState:
    """Moment accumulators for Adam; ``weight_decay > 0`` gives AdamW."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.lr > 0:
            raise ValidationError(f"learning rate must be > 0, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValidationError(f"betas must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.weight_decay < 0:
            raise ValidationError(f"weight decay must be >= 0, got {self.weight_decay}")

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], lr: float, **kwargs) -> "AdamState":
        state = cls(lr=lr, **kwargs)
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
        return state


def adam_step(state: AdamState, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Apply one Adam (or AdamW) update.

    Returns the updated parameter arrays; ``state`` is advanced in place. A
    non-finite gradient raises before anything is touched.
    """
    if len(params) != len(grads):
        raise DimensionMismatchError("params/grads count", (len(params),), (len(grads),))
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape or p.shape != state.m[i].shape:
            raise DimensionMismatchError(f"parameter {i}", p.shape, g.shape)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient in parameter {i}")

    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        m_hat = state.m[i] / correction1
        v_hat = state.v[i] / correction2
        new_p = p * (1.0 - state.lr * state.weight_decay) if state.weight_decay > 0 else p.copy()
        new_p = new_p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        updated.append(new_p)
    return updated


@dataclass
class PlateauScheduler:
    """Multiply the learning rate by ``factor`` after ``patience`` epochs without improvement."""

    lr: float
    factor: float = 0.8
    patience: int = 30
    min_lr: float = 1e-7
    best_loss: float = math.inf
    epochs_since_improvement: int = 0

    def __post_init__(self):
        if not 0.0 < self.factor < 1.0:
            raise ValidationError(f"plateau factor must lie in (0, 1), got {self.factor}")
        if self.patience < 1:
            raise ValidationError(f"patience must be >= 1, got {self.patience}")
        if self.lr < self.min_lr:
            raise ValidationError(f"learning rate {self.lr} is below the minimum {self.min_lr}")


def plateau_step(sched: PlateauScheduler, epoch_loss: float) -> float:
    """Record an epoch loss and return the (possibly reduced) learning rate.

    Improvement is strict: ``epoch_loss < best_loss``.
    """
    if not math.isfinite(epoch_loss):
        raise NonFiniteError(f"plateau scheduler received non-finite loss {epoch_loss}")
    if epoch_loss < sched.best_loss:
        sched.best_loss = epoch_loss
        sched.epochs_since_improvement = 0
        return sched.lr

    sched.epochs_since_improvement += 1
    if sched.epochs_since_improvement >= sched.patience:
        sched.lr = max(sched.lr * sched.factor, sched.min_lr)
        sched.epochs_since_improvement = 0
    return sched.lr


def resolve_batch_size(n_samples: int, batch_size: int | str | None = "auto") -> int:
    """Full batch up to ``FULL_BATCH_LIMIT`` samples, else mini-batches of 256."""
    if batch_size in (None, "auto"):
        return n_samples if n_samples <= FULL_BATCH_LIMIT else MINI_BATCH_SIZE
    size = int(batch_size)
    if size < 1:
        raise ValidationError(f"batch size must be >= 1, got {size}")
    return min(size, n_samples)


def iter_batches(n_samples: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """Yield index arrays; shuffled unless the batch covers the whole set."""
    if batch_size >= n_samples:
        yield np.arange(n_samples)
        return
    order = rng.permutation(n_samples)
    for start in range(0, n_samples, batch_size):
        yield order[start : start + batch_size]
