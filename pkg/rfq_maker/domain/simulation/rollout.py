"""
Rollout engine for the per-RFQ decision process.

Each event draws (bond, side) from the RFQ distribution, reads the policy's
fill probability, perturbs it with the exploration noise, draws the fill
and moves the inventory. Uniform variates are drawn up front in fixed
order, so a seed fixes the whole record sequence.
"""

import logging
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..intensity.curves import f_eval, f_inverse
from ..intensity.models import SuJohnsonCurve
from ..market.models import InventoryState, MarketSpec
from ..market.service import penalty_values, rfq_event_distribution, total_rfq_rate
from ..tabular.models import PolicyTable
from .models import NoiseSpec, QuoteSource, RolloutBatch

logger = logging.getLogger(__name__)

RngLike = Union[int, np.random.Generator]


def _generator(rng: RngLike) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


class TableQuoteSource:
    """Quote source backed by a tabulated policy."""

    def __init__(self, policy: PolicyTable):
        self.policy = policy

    def probabilities(self, units: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
        k = self.policy.grid.index(units)
        return self.policy.bid_prob[k], self.policy.ask_prob[k]


def perturbed_policy(curve: SuJohnsonCurve, delta: float, eps: float, nu: float) -> Tuple[float, float]:
    """
    Exploration quote δ_ε = f⁻¹(ν ∨ (f(δ) + ε) ∧ (1 − ν)).

    Returns:
        (p_ε, δ_ε)
    """
    if not np.isfinite(delta):
        raise InvalidParameterError("quote must be finite", {"delta": delta})
    p_eps = float(np.clip(f_eval(curve, delta) + eps, nu, 1.0 - nu))
    return p_eps, float(f_inverse(curve, p_eps))


def _quotes_from_probabilities(curve: SuJohnsonCurve, probs: np.ndarray) -> np.ndarray:
    """δ = f⁻¹(p); p = 0 maps to +inf."""
    out = np.full(probs.shape, np.inf)
    live = probs > 0
    out[live] = f_inverse(curve, np.minimum(probs[live], 1.0 - 1e-15))
    return out


def random_start(market: MarketSpec, rng: RngLike) -> InventoryState:
    """Inventory drawn uniformly over the active grid."""
    gen = _generator(rng)
    limits = np.array(market.limits)
    return InventoryState(tuple(gen.integers(-limits, limits + 1)))


def rollout(
    market: MarketSpec,
    source: QuoteSource,
    start: InventoryState,
    length: int,
    noise: Optional[NoiseSpec],
    rng: RngLike,
    cache: Optional[Dict] = None,
) -> RolloutBatch:
    """
    Simulate `length` RFQ events from `start`.

    The played policy is the perturbed one (p_ε); both quotes are recorded.
    With `noise=None` the unperturbed policy is played.

    Args:
        cache: Per-state probability cache shared across rollouts of one policy
    """
    if length < 1:
        raise InvalidParameterError("rollout length must be >= 1", {"length": length})
    start.check(market)
    gen = _generator(rng)
    d = market.dimension
    limits = market.limits
    events = rfq_event_distribution(market).ravel()
    drawn = gen.choice(2 * d, size=length, p=events)
    eps = gen.uniform(-noise.half_width, noise.half_width, size=length) if noise is not None else np.zeros(length)
    uniforms = gen.random(length)
    cache = {} if cache is None else cache

    states = np.empty((length, d), dtype=np.int64)
    next_states = np.empty((length, d), dtype=np.int64)
    probs = np.zeros(length)
    probs_eps = np.zeros(length)
    fills = np.zeros(length, dtype=bool)
    blocked = np.zeros(length, dtype=bool)
    bonds = drawn // 2
    sides = drawn % 2

    q = list(start.units)
    for k in range(length):
        key = tuple(q)
        states[k] = key
        table = cache.get(key)
        if table is None:
            table = source.probabilities(key)
            cache[key] = table
        i = bonds[k]
        step = 1 if sides[k] == 0 else -1
        if step * q[i] >= limits[i]:
            blocked[k] = True
        else:
            p = float(table[sides[k]][i])
            probs[k] = p
            p_eps = min(max(p + eps[k], noise.nu), 1.0 - noise.nu) if noise is not None else p
            probs_eps[k] = p_eps
            if uniforms[k] < p_eps:
                fills[k] = True
                q[i] += step
        next_states[k] = q

    deltas = np.full(length, np.nan)
    deltas_eps = np.full(length, np.nan)
    for i, bond in enumerate(market.bonds):
        sel = (bonds == i) & ~blocked
        if np.any(sel):
            deltas[sel] = _quotes_from_probabilities(bond.curve, probs[sel])
            deltas_eps[sel] = _quotes_from_probabilities(bond.curve, probs_eps[sel])

    return RolloutBatch(
        states=states,
        bonds=bonds.astype(np.int64),
        sides=sides.astype(np.int64),
        probs=probs,
        deltas=deltas,
        probs_eps=probs_eps,
        deltas_eps=deltas_eps,
        fills=fills,
        next_states=next_states,
    )


def expected_rewards(batch: RolloutBatch, market: MarketSpec) -> np.ndarray:
    """Per-record f(δ)·Δ·δ − ψ(q)/Λ with the unperturbed quotes."""
    cost = penalty_values(market, batch.states) / total_rfq_rate(market)
    sizes = market.trade_sizes[batch.bonds]
    trade = batch.probs > 0
    spread = np.zeros(len(batch))
    spread[trade] = batch.probs[trade] * sizes[trade] * batch.deltas[trade]
    return spread - cost


def estimate_r_mean(batch: RolloutBatch, market: MarketSpec) -> float:
    """Average reward per RFQ over the records (R_mean)."""
    if len(batch) == 0:
        raise InvalidParameterError("cannot estimate R_mean from an empty rollout")
    return float(np.mean(expected_rewards(batch, market)))


def rollout_standard_error(batch: RolloutBatch, market: MarketSpec, n_batches: int = 20) -> float:
    """Batch-means standard error of `estimate_r_mean` on one long rollout."""
    rewards = expected_rewards(batch, market)
    if rewards.size < 2 * n_batches:
        raise InvalidParameterError("rollout too short for batch means", {"length": int(rewards.size)})
    usable = rewards[: rewards.size - rewards.size % n_batches]
    means = usable.reshape(n_batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def shuffle(batch: RolloutBatch, rng: RngLike) -> RolloutBatch:
    """Uniform random permutation of the records."""
    return batch.take(_generator(rng).permutation(len(batch)))
