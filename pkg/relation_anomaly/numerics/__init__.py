"""Dense matrices, small MLPs with exact gradients, optimizers and schedulers."""

from .checkpoint import params_from_dict, params_to_dict
from .gradcheck import grad_check
from .matrix import Matrix, as_batch, as_matrix, matmul
from .mlp import DenseLayer, Gradients, MlpCache, MlpParams, init_params, mlp_backward, mlp_forward, xavier_bound
from .optim import (
    AdamState,
    PlateauScheduler,
    adam_step,
    iter_batches,
    plateau_step,
    resolve_batch_size,
)

__all__ = [
    "Matrix",
    "as_matrix",
    "as_batch",
    "matmul",
    "DenseLayer",
    "MlpParams",
    "Gradients",
    "MlpCache",
    "init_params",
    "mlp_forward",
    "mlp_backward",
    "xavier_bound",
    "grad_check",
    "AdamState",
    "adam_step",
    "PlateauScheduler",
    "plateau_step",
    "resolve_batch_size",
    "iter_batches",
    "params_to_dict",
    "params_from_dict",
]
