"""Autoencoder training on normal triplet vectors."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DivergenceError, NonFiniteError, ValidationError
from ..numerics import AdamState, adam_step, iter_batches, resolve_batch_size
from ..numerics.matrix import DTYPE, Matrix
from .model import AeModel, ae_loss_and_grads, init_ae, with_arrays

logger = logging.getLogger(__name__)


@dataclass
class AeTrainResult:
    model: AeModel
    losses: list[float] = field(default_factory=list)
    seed: int | None = None

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else math.nan

    @property
    def reduction(self) -> float:
        """Final epoch loss as a fraction of the first epoch loss."""
        if len(self.losses) < 2 or self.losses[0] == 0:
            return 1.0
        return self.losses[-1] / self.losses[0]


def ae_train(
    data: Matrix,
    d_z: int,
    epochs: int = 100,
    lr: float = 1e-3,
    seed: int | np.random.Generator = 0,
    batch_size: int | str = "auto",
) -> AeTrainResult:
    """Train an autoencoder with Adam and return it frozen.

    Args:
        data: Row batch of normal training vectors; never modified
        d_z: Latent width, strictly below the input width
        epochs: Passes over the data
        lr: Adam learning rate
        seed: Seeds initialisation and batch shuffling
        batch_size: ``"auto"`` (full batch up to 4096 rows) or an integer

    Raises:
        ValidationError: empty data or ``epochs < 1``
        DivergenceError: a non-finite loss, with its epoch index
    """
    data = np.asarray(data, dtype=DTYPE)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValidationError(f"autoencoder training needs a non-empty row batch, got shape {data.shape}")
    if epochs < 1:
        raise ValidationError(f"epochs must be >= 1, got {epochs}")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    model = init_ae(data.shape[1], d_z, rng)
    n = data.shape[0]
    size = resolve_batch_size(n, batch_size)
    enc = model.encoder.arrays()
    dec = model.decoder.arrays()
    opt = AdamState.for_params(enc + dec, lr=lr)
    logger.info("training autoencoder %s on %d vectors (batch %d, %d epochs)", model.widths, n, size, epochs)

    losses: list[float] = []
    for epoch in range(1, epochs + 1):
        total = 0.0
        for idx in iter_batches(n, size, rng):
            try:
                loss, g_enc, g_dec = ae_loss_and_grads(model, data[idx])
            except NonFiniteError as e:
                raise DivergenceError(f"autoencoder forward pass failed: {e}", epoch) from e
            if not math.isfinite(loss):
                raise DivergenceError("autoencoder loss is not finite", epoch)
            try:
                updated = adam_step(opt, enc + dec, g_enc + g_dec)
            except NonFiniteError as e:
                raise DivergenceError(str(e), epoch) from e
            enc, dec = updated[: len(enc)], updated[len(enc) :]
            model = with_arrays(model, enc, dec)
            total += loss * len(idx)
        losses.append(total / n)
        logger.debug("ae epoch %d/%d loss %.6g", epoch, epochs, losses[-1])

    logger.info("autoencoder done: loss %.6g -> %.6g", losses[0], losses[-1])
    return AeTrainResult(model=model.freeze(), losses=losses, seed=seed if isinstance(seed, int) else None)
