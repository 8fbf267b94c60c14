"""
Market Service

Penalty, discrete-time discount factor, RFQ event distribution and the
per-RFQ reward used for reporting.
"""

from typing import Union

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..intensity.curves import f_eval
from .models import InventoryState, MarketSpec, PenaltyKind, Side

StateLike = Union[InventoryState, np.ndarray]


def _units_array(state: StateLike) -> np.ndarray:
    if isinstance(state, InventoryState):
        return state.as_array()
    return np.asarray(state, dtype=float)


def penalty_values(market: MarketSpec, units: np.ndarray) -> np.ndarray:
    """ψ evaluated on an (n, d) array of units (or a single (d,) vector)."""
    q = np.asarray(units, dtype=float) * market.trade_sizes
    quad = np.einsum("...i,ij,...j->...", q, market.psd_covariance, q)
    quad = np.maximum(quad, 0.0)
    gamma = market.penalty.gamma
    if market.penalty.kind is PenaltyKind.STDDEV:
        return 0.5 * gamma * np.sqrt(quad)
    return 0.5 * gamma * quad


def penalty_eval(market: MarketSpec, state: StateLike) -> float:
    """ψ(q) for one inventory state; ψ(0) = 0 and ψ(q) = ψ(−q)."""
    return float(penalty_values(market, _units_array(state)))


def total_rfq_rate(market: MarketSpec) -> float:
    """Λ = Σᵢ (λ^{i,b} + λ^{i,a})."""
    return float(sum(b.total_rate for b in market.bonds))


def gamma_rl(market: MarketSpec) -> float:
    """Per-RFQ discount factor γ_RL = Λ/(r + Λ)."""
    rate = total_rfq_rate(market)
    return rate / (market.discount + rate)


def rfq_event_distribution(market: MarketSpec) -> np.ndarray:
    """
    Probabilities P((I, s) = (i, side)).

    Returns:
        Array (d, 2); column 0 is the bid side, column 1 the ask side
    """
    rates = np.array([[b.lambda_bid, b.lambda_ask] for b in market.bonds], dtype=float)
    return rates / rates.sum()


def side_is_admissible(market: MarketSpec, state: StateLike, bond: int, side: Side) -> bool:
    """Bid blocked at +limit, ask at −limit."""
    units = _units_array(state)
    return bool(side.step * units[bond] < market.limits[bond])


def expected_step_reward(market: MarketSpec, state: StateLike, bond: int, side: Side, delta: float) -> float:
    """
    Per-RFQ reward contribution f(δ)·Δ·δ − ψ(q)/Λ.

    On a blocked side the fill probability is 0 and only −ψ(q)/Λ remains.
    """
    if not np.isfinite(delta):
        raise InvalidParameterError("quote must be finite", {"delta": delta})
    if not 0 <= bond < market.dimension:
        raise InvalidParameterError(f"bond index {bond} out of range", {"bond": bond})
    cost = penalty_eval(market, state) / total_rfq_rate(market)
    if not side_is_admissible(market, state, bond, side):
        return -cost
    spec = market.bonds[bond]
    return float(f_eval(spec.curve, delta) * spec.trade_size * delta - cost)
