"""
Feedforward networks: evaluation, parameter gradients, first-order steps
and finite-difference gradient verification.

All networks run in float64 on CPU.
"""

import math
from typing import Optional

import numpy as np
import torch
from torch import nn

from ...shared.exceptions import InvalidParameterError
from .models import NetworkSpec, OptimizerConfig, OptimizerKind, OutputHead

DTYPE = torch.float64


class FeedForwardNet(nn.Module):
    """Rectifier hidden layers and a single affine or logistic output node."""

    def __init__(self, spec: NetworkSpec, generator: Optional[torch.Generator] = None):
        super().__init__()
        self.spec = spec
        layers = []
        sizes = spec.layer_sizes
        for k in range(len(sizes) - 1):
            layers.append(nn.Linear(sizes[k], sizes[k + 1], dtype=DTYPE))
            if k < len(sizes) - 2:
                layers.append(nn.ReLU())
        if spec.head is OutputHead.LOGISTIC:
            layers.append(nn.Sigmoid())
        self.body = nn.Sequential(*layers)
        self.reset_parameters(generator)

    def reset_parameters(self, generator: Optional[torch.Generator] = None) -> None:
        """Uniform in ±sqrt(6/(fan_in + fan_out)); biases 0."""
        with torch.no_grad():
            for layer in self.body:
                if isinstance(layer, nn.Linear):
                    bound = math.sqrt(6.0 / (layer.in_features + layer.out_features))
                    layer.weight.uniform_(-bound, bound, generator=generator)
                    layer.bias.zero_()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x).squeeze(-1)

    @property
    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def output_layer(self) -> nn.Linear:
        return [m for m in self.body if isinstance(m, nn.Linear)][-1]


def _as_tensor(net: FeedForwardNet, inputs) -> torch.Tensor:
    x = torch.as_tensor(np.asarray(inputs, dtype=float), dtype=DTYPE)
    if x.shape[-1] != net.spec.input_dim:
        raise InvalidParameterError(
            f"input dimension {x.shape[-1]} does not match network input {net.spec.input_dim}",
            {"expected": net.spec.input_dim, "got": int(x.shape[-1])},
        )
    return x


def forward(net: FeedForwardNet, inputs) -> np.ndarray:
    """Evaluate on one input vector (returns a float) or a batch (returns an array)."""
    x = _as_tensor(net, inputs)
    with torch.no_grad():
        out = net(x)
    return float(out) if x.dim() == 1 else out.numpy()


def flat_parameters(net: FeedForwardNet) -> np.ndarray:
    return nn.utils.parameters_to_vector(net.parameters()).detach().numpy().copy()


def set_flat_parameters(net: FeedForwardNet, values: np.ndarray) -> None:
    with torch.no_grad():
        nn.utils.vector_to_parameters(torch.as_tensor(values, dtype=DTYPE), net.parameters())


def grad_params(net: FeedForwardNet, inputs) -> np.ndarray:
    """Gradient of the scalar output at one input w.r.t. every parameter, flattened."""
    x = _as_tensor(net, inputs)
    if x.dim() != 1:
        raise InvalidParameterError("grad_params takes a single input vector")
    out = net(x)
    grads = torch.autograd.grad(out, list(net.parameters()))
    return torch.cat([g.reshape(-1) for g in grads]).numpy()


def gradient_check(net: FeedForwardNet, inputs, step: float = 1e-5, floor: float = 1e-4) -> float:
    """
    Largest discrepancy between autograd and central differences.

    Error per parameter is |a − n| / max(|a| + |n|, floor), maximized over
    parameters and inputs.
    """
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    base = flat_parameters(net)
    worst = 0.0
    try:
        for row in x:
            analytic = grad_params(net, row)
            numeric = np.empty_like(base)
            for k in range(base.size):
                probe = base.copy()
                probe[k] += step
                set_flat_parameters(net, probe)
                up = forward(net, row)
                probe[k] -= 2 * step
                set_flat_parameters(net, probe)
                down = forward(net, row)
                numeric[k] = (up - down) / (2 * step)
            set_flat_parameters(net, base)
            err = np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), floor)
            worst = max(worst, float(err.max()))
    finally:
        set_flat_parameters(net, base)
    return worst


def make_optimizer(net: FeedForwardNet, config: OptimizerConfig) -> torch.optim.Optimizer:
    if config.kind is OptimizerKind.ADAM:
        return torch.optim.Adam(net.parameters(), lr=config.rate, betas=config.betas, eps=config.eps)
    return torch.optim.SGD(net.parameters(), lr=config.rate)


def sgd_step(net: FeedForwardNet, optimizer: torch.optim.Optimizer, direction: np.ndarray, sign: float = 1.0) -> None:
    """
    Move the parameters along `sign·direction`.

    PlainSGD moves by exactly rate·sign·direction; Adam applies its
    bias-corrected rule to the gradient −sign·direction.
    """
    flat = torch.as_tensor(np.asarray(direction, dtype=float), dtype=DTYPE)
    params = list(net.parameters())
    if flat.numel() != sum(p.numel() for p in params):
        raise InvalidParameterError("direction does not match the parameter count")
    offset = 0
    for p in params:
        n = p.numel()
        p.grad = (-sign * flat[offset:offset + n]).reshape(p.shape).clone()
        offset += n
    optimizer.step()
    optimizer.zero_grad(set_to_none=True)
