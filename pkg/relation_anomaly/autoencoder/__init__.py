"""Autoencoder compression of triplet vectors."""

from .model import (
    AeModel,
    ae_from_dict,
    ae_loss,
    ae_loss_and_grads,
    ae_to_dict,
    ae_widths,
    decode,
    encode,
    init_ae,
    load_ae,
    save_ae,
)
from .train import AeTrainResult, ae_train

__all__ = [
    "AeModel",
    "AeTrainResult",
    "ae_widths",
    "init_ae",
    "encode",
    "decode",
    "ae_loss",
    "ae_loss_and_grads",
    "ae_train",
    "ae_to_dict",
    "ae_from_dict",
    "save_ae",
    "load_ae",
]
