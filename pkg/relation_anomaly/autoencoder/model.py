"""MLP autoencoder that compresses triplet vectors to flow latents."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ContractError, DimensionMismatchError, NonFiniteError, ValidationError
from ..numerics import MlpParams, init_params, mlp_backward, mlp_forward, params_from_dict, params_to_dict
from ..numerics.matrix import DTYPE, Matrix, as_batch
from ..serializers import read_json, write_json

N_LAYERS = 4

# Widths for the default 900 -> 512 compression.
DEFAULT_WIDTHS = (900, 800, 700, 600, 512)


def ae_widths(in_dim: int, d_z: int, n_layers: int = N_LAYERS) -> list[int]:
    """Encoder widths from ``in_dim`` down to ``d_z``.

    The default 900 -> 512 case uses round hundreds; any other pair
    interpolates linearly and rounds to integers.
    """
    if not 1 <= d_z < in_dim:
        raise ContractError(f"latent dimension must satisfy 1 <= d_z < input width, got d_z={d_z}, input={in_dim}")
    if (in_dim, d_z) == (DEFAULT_WIDTHS[0], DEFAULT_WIDTHS[-1]) and n_layers == N_LAYERS:
        return list(DEFAULT_WIDTHS)
    return [int(round(in_dim + (d_z - in_dim) * i / n_layers)) for i in range(n_layers + 1)]


@dataclass(frozen=True)
class AeModel:
    encoder: MlpParams
    decoder: MlpParams
    frozen: bool = False

    def __post_init__(self):
        if self.encoder.dims != self.decoder.dims[::-1]:
            raise DimensionMismatchError(
                "decoder must mirror the encoder", tuple(self.encoder.dims), tuple(self.decoder.dims)
            )
        if not self.latent_dim < self.input_dim:
            raise ContractError(f"latent dimension {self.latent_dim} must be below input width {self.input_dim}")

    @property
    def input_dim(self) -> int:
        return self.encoder.in_dim

    @property
    def latent_dim(self) -> int:
        return self.encoder.out_dim

    @property
    def widths(self) -> list[int]:
        return self.encoder.dims

    def freeze(self) -> "AeModel":
        return AeModel(self.encoder.frozen(), self.decoder.frozen(), frozen=True)

    def checksum(self) -> str:
        digest = hashlib.sha256()
        for arr in self.encoder.arrays() + self.decoder.arrays():
            digest.update(np.ascontiguousarray(arr).tobytes())
        return digest.hexdigest()


def init_ae(in_dim: int, d_z: int, seed: int | np.random.Generator) -> AeModel:
    widths = ae_widths(in_dim, d_z)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    encoder = init_params(rng, widths)
    decoder = init_params(rng, widths[::-1])
    return AeModel(encoder, decoder)


def encode(model: AeModel, vec: np.ndarray) -> np.ndarray:
    """Latent ``z = f_enc(t)`` for a vector or a row batch.

    Raises:
        ContractError: the model has not been frozen.
    """
    if not model.frozen:
        raise ContractError("encode requires a frozen autoencoder; call freeze() after training")
    batch, single = as_batch(vec)
    z, _ = mlp_forward(model.encoder, batch)
    return z[0] if single else z


def decode(model: AeModel, latent: np.ndarray) -> np.ndarray:
    batch, single = as_batch(latent)
    if batch.shape[1] != model.latent_dim:
        raise DimensionMismatchError("latent width", (model.latent_dim,), batch.shape)
    out, _ = mlp_forward(model.decoder, batch)
    return out[0] if single else out


def ae_loss_and_grads(model: AeModel, batch: Matrix) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean squared reconstruction error and its gradients for encoder and decoder arrays."""
    batch = np.asarray(batch, dtype=DTYPE)
    z, enc_cache = mlp_forward(model.encoder, batch)
    recon, dec_cache = mlp_forward(model.decoder, z)
    diff = recon - batch
    n = batch.shape[0]
    loss = float(np.sum(diff * diff) / n)
    d_z, dec_grads = mlp_backward(model.decoder, dec_cache, 2.0 * diff / n)
    _, enc_grads = mlp_backward(model.encoder, enc_cache, d_z)
    return loss, enc_grads.arrays(), dec_grads.arrays()


def ae_loss(model: AeModel, batch: np.ndarray) -> float:
    """Batch mean of ``||t - f_dec(f_enc(t))||^2``."""
    batch, _ = as_batch(batch)
    if batch.shape[0] == 0:
        raise ValidationError("ae_loss needs at least one vector")
    if batch.shape[1] != model.input_dim:
        raise DimensionMismatchError("autoencoder input width", (model.input_dim,), batch.shape)
    z, _ = mlp_forward(model.encoder, batch)
    recon, _ = mlp_forward(model.decoder, z)
    diff = recon - batch
    loss = float(np.sum(diff * diff) / batch.shape[0])
    if not np.isfinite(loss):
        raise NonFiniteError("autoencoder loss is not finite")
    return loss


def ae_to_dict(model: AeModel, seed: int | None = None, final_loss: float | None = None) -> dict[str, Any]:
    return {
        "config": {"input_dim": model.input_dim, "d_z": model.latent_dim, "widths": model.widths},
        "encoder": params_to_dict(model.encoder),
        "decoder": params_to_dict(model.decoder),
        "seed": seed,
        "final_loss": final_loss,
    }


def ae_from_dict(doc: dict[str, Any]) -> AeModel:
    try:
        model = AeModel(params_from_dict(doc["encoder"]), params_from_dict(doc["decoder"]))
    except KeyError as e:
        raise ValidationError(f"autoencoder checkpoint is missing {e}") from e
    if model.widths != list(doc.get("config", {}).get("widths", model.widths)):
        raise ValidationError("autoencoder checkpoint widths do not match its parameters")
    return model.freeze()


def save_ae(path: str, model: AeModel, **metadata: Any) -> str:
    return write_json(path, ae_to_dict(model, **metadata))


def load_ae(path: str) -> AeModel:
    return ae_from_dict(read_json(path))


def with_arrays(model: AeModel, enc_arrays: list[np.ndarray], dec_arrays: list[np.ndarray]) -> AeModel:
    if model.frozen:
        raise ContractError("a frozen autoencoder cannot be updated")
    return dataclasses.replace(
        model, encoder=model.encoder.with_arrays(enc_arrays), decoder=model.decoder.with_arrays(dec_arrays)
    )
