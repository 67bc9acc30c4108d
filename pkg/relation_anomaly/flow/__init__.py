"""RealNVP normalizing flow over autoencoder latents."""

from .coupling import (
    MASK_PATTERNS,
    CouplingLayer,
    coupling_forward,
    coupling_inverse,
    init_coupling,
    make_mask,
)
from .model import (
    DEFAULT_MASKS,
    LOG_2PI,
    FlowModel,
    ScoreResult,
    anomaly_score,
    flow_forward,
    flow_from_dict,
    flow_inverse,
    flow_loss,
    flow_loss_and_grads,
    flow_to_dict,
    init_flow,
    load_flow,
    replace_non_finite,
    save_flow,
    score_batch,
)
from .train import FlowConfig, FlowTrainResult, flow_train

__all__ = [
    "MASK_PATTERNS",
    "DEFAULT_MASKS",
    "LOG_2PI",
    "CouplingLayer",
    "make_mask",
    "init_coupling",
    "coupling_forward",
    "coupling_inverse",
    "FlowModel",
    "init_flow",
    "flow_forward",
    "flow_inverse",
    "anomaly_score",
    "ScoreResult",
    "replace_non_finite",
    "score_batch",
    "flow_loss",
    "flow_loss_and_grads",
    "flow_to_dict",
    "flow_from_dict",
    "save_flow",
    "load_flow",
    "FlowConfig",
    "FlowTrainResult",
    "flow_train",
]
