"""
Supervised pre-training on sampled inputs (Adam on a mean squared error).
"""

import logging
from typing import Callable

import numpy as np
import torch

from .models import OptimizerConfig, OptimizerKind, OutputHead, PretrainConfig, PretrainReport
from .network import DTYPE, FeedForwardNet, make_optimizer

logger = logging.getLogger(__name__)

Sampler = Callable[[np.random.Generator, int], np.ndarray]
Target = Callable[[np.ndarray], np.ndarray]


def _fold_output_scale(net: FeedForwardNet, mean: float, scale: float) -> None:
    """Turn a net fitted to (y − mean)/scale into one fitted to y."""
    layer = net.output_layer()
    with torch.no_grad():
        layer.weight.mul_(scale)
        layer.bias.mul_(scale).add_(mean)


def pretrain_supervised(
    net: FeedForwardNet,
    target: Target,
    sampler: Sampler,
    config: PretrainConfig,
    rng: np.random.Generator,
) -> PretrainReport:
    """
    Fit `net` to `target` on inputs drawn by `sampler`.

    Affine heads are trained on standardized targets and the scale is folded
    back into the output layer, so targets of any magnitude are fitted with
    the same learning rate. The step size is halved whenever the held-out
    error stops improving.

    Returns:
        Report with the final held-out MSE; a warning is logged when the
        threshold is not reached
    """
    holdout_x = sampler(rng, config.holdout_size)
    holdout_y = np.asarray(target(holdout_x), dtype=float)
    variance = float(holdout_y.var())
    threshold = config.threshold
    if threshold is None:
        threshold = max(config.threshold_ratio * variance, config.threshold_floor)

    standardize = net.spec.head is OutputHead.AFFINE
    mean, scale = 0.0, 1.0
    if standardize:
        mean = float(holdout_y.mean())
        scale = float(np.sqrt(variance)) if variance > 0 else max(1.0, abs(mean))

    optimizer = make_optimizer(net, OptimizerConfig(OptimizerKind.ADAM, config.rate))
    scheduler = torch.optim.lr_scheduler.ReduceLROnPlateau(optimizer, factor=0.5, patience=2)
    hx = torch.as_tensor(holdout_x, dtype=DTYPE)
    hy = torch.as_tensor((holdout_y - mean) / scale, dtype=DTYPE)

    def holdout_mse() -> float:
        with torch.no_grad():
            return float(torch.mean((net(hx) - hy) ** 2)) * scale * scale

    mse = holdout_mse()
    history = [mse]
    done = 0
    for done in range(1, config.batches + 1):
        xb = sampler(rng, config.batch_size)
        yb = torch.as_tensor((np.asarray(target(xb), dtype=float) - mean) / scale, dtype=DTYPE)
        loss = torch.mean((net(torch.as_tensor(xb, dtype=DTYPE)) - yb) ** 2)
        optimizer.zero_grad(set_to_none=True)
        loss.backward()
        optimizer.step()
        if done % config.check_every == 0:
            mse = holdout_mse()
            history.append(mse)
            scheduler.step(mse)
            if mse < threshold:
                break
    mse = holdout_mse()

    if standardize:
        _fold_output_scale(net, mean, scale)

    reached = mse < threshold
    if not reached:
        logger.warning(f"Pre-training stopped at MSE {mse:.3e} above threshold {threshold:.3e} after {done} batches")
    else:
        logger.info(f"Pre-training reached MSE {mse:.3e} after {done} batches")
    return PretrainReport(mse=mse, threshold=threshold, batches=done, reached=reached, history=history)
