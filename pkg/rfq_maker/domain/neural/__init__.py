"""
Neural: small feedforward networks

Responsibilities:
- Rectifier networks with affine (critic) or logistic (actor) heads
- Parameter gradients and their finite-difference verification
- Plain and Adam first-order steps
- Supervised pre-training

Dependencies: none (torch only)
"""

from .models import NetworkSpec, OutputHead, OptimizerKind, OptimizerConfig, PretrainConfig, PretrainReport
from .network import (
    FeedForwardNet,
    forward,
    grad_params,
    gradient_check,
    flat_parameters,
    set_flat_parameters,
    make_optimizer,
    sgd_step,
)
from .pretrain import pretrain_supervised

__all__ = [
    "NetworkSpec",
    "OutputHead",
    "OptimizerKind",
    "OptimizerConfig",
    "PretrainConfig",
    "PretrainReport",
    "FeedForwardNet",
    "forward",
    "grad_params",
    "gradient_check",
    "flat_parameters",
    "set_flat_parameters",
    "make_optimizer",
    "sgd_step",
    "pretrain_supervised",
]
