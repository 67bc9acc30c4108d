"""Maximum-likelihood training of the flow on normal latents."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergenceError, NonFiniteError, ValidationError
from ..numerics import AdamState, PlateauScheduler, adam_step, iter_batches, plateau_step, resolve_batch_size
from ..numerics.matrix import DTYPE, Matrix
from .coupling import MASK_PATTERNS
from .model import DEFAULT_MASKS, FlowModel, flow_loss, forward_with_cache, flow_loss_and_grads, init_flow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowConfig:
    epochs: int = 1000
    lr: float = 1e-4
    n_layers: int = 3
    masks: tuple[str, ...] = DEFAULT_MASKS
    hidden: int = 128
    clamp: float | None = 4.0
    weight_decay: float = 0.01
    batch_size: int | str = "auto"
    plateau_factor: float = 0.8
    plateau_patience: int = 30
    min_lr: float = 1e-7

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError(f"flow epochs must be >= 1, got {self.epochs}")
        if len(self.masks) != self.n_layers:
            raise ValidationError(f"{self.n_layers} coupling layers need {self.n_layers} masks, got {self.masks}")
        unknown = [m for m in self.masks if m not in MASK_PATTERNS]
        if unknown:
            raise ValidationError(f"unknown mask patterns {unknown}")
        if self.hidden < 1:
            raise ValidationError(f"hidden width must be >= 1, got {self.hidden}")


@dataclass
class FlowTrainResult:
    model: FlowModel
    losses: list[float] = field(default_factory=list)
    lrs: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else math.nan

    @property
    def final_lr(self) -> float:
        return self.lrs[-1] if self.lrs else math.nan


def _full_loss(model: FlowModel, data: Matrix, size: int) -> float:
    total = 0.0
    for start in range(0, data.shape[0], size):
        chunk = data[start : start + size]
        u, logdet, _ = forward_with_cache(model, chunk)
        total += flow_loss(u, logdet) * chunk.shape[0]
    return total / data.shape[0]


def flow_train(latents: Matrix, config: FlowConfig | None = None, seed: int | np.random.Generator = 0) -> FlowTrainResult:
    """Fit a RealNVP flow with AdamW and a reduce-on-plateau schedule.

    The scheduler sees the full-training-set mean loss after each epoch.

    Raises:
        ValidationError: fewer than one latent or ``d_z < 2``
        DivergenceError: the loss turned non-finite; carries the epoch
    """
    config = config or FlowConfig()
    data = np.asarray(latents, dtype=DTYPE)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValidationError(f"flow training needs a non-empty row batch, got shape {data.shape}")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    model = init_flow(data.shape[1], rng, config.n_layers, config.hidden, config.masks, config.clamp)
    n = data.shape[0]
    size = resolve_batch_size(n, config.batch_size)
    params = model.arrays()
    opt = AdamState.for_params(params, lr=config.lr, weight_decay=config.weight_decay)
    sched = PlateauScheduler(
        lr=config.lr, factor=config.plateau_factor, patience=config.plateau_patience, min_lr=config.min_lr
    )
    logger.info(
        "training flow: d_z=%d, %d layers %s, %d latents (batch %d), %d epochs",
        model.d_z,
        len(model.layers),
        list(config.masks),
        n,
        size,
        config.epochs,
    )

    losses: list[float] = []
    lrs: list[float] = []
    for epoch in range(1, config.epochs + 1):
        opt.lr = sched.lr
        try:
            for idx in iter_batches(n, size, rng):
                loss, grads = flow_loss_and_grads(model, data[idx])
                if not math.isfinite(loss):
                    raise DivergenceError("flow loss is not finite", epoch)
                params = adam_step(opt, params, grads)
                model = model.with_arrays(params)
            epoch_loss = _full_loss(model, data, max(size, 1))
        except NonFiniteError as e:
            raise DivergenceError(f"flow training failed: {e}", epoch) from e
        if not math.isfinite(epoch_loss):
            raise DivergenceError("flow loss is not finite", epoch)
        losses.append(epoch_loss)
        lrs.append(plateau_step(sched, epoch_loss))
        logger.debug("flow epoch %d/%d loss %.6g lr %.3g", epoch, config.epochs, epoch_loss, lrs[-1])

    logger.info("flow done: loss %.6g -> %.6g, final lr %.3g", losses[0], losses[-1], lrs[-1])
    return FlowTrainResult(model=model.frozen(), losses=losses, lrs=lrs)
