"""
Simulation: rollouts of the RFQ decision process

Responsibilities:
- Exploration noise and perturbed quotes
- Rollouts with blocking at the risk limits
- R_mean estimation, batch-means standard errors, shuffling

Dependencies: Intensity, Market, Tabular (policy tables as quote sources)
"""

from .models import NoiseSpec, QuoteSource, RolloutRecord, RolloutBatch
from .rollout import (
    TableQuoteSource,
    perturbed_policy,
    random_start,
    rollout,
    expected_rewards,
    estimate_r_mean,
    rollout_standard_error,
    shuffle,
)

__all__ = [
    "NoiseSpec",
    "QuoteSource",
    "RolloutRecord",
    "RolloutBatch",
    "TableQuoteSource",
    "perturbed_policy",
    "random_start",
    "rollout",
    "expected_rewards",
    "estimate_r_mean",
    "rollout_standard_error",
    "shuffle",
]
