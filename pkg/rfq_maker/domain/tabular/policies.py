"""
Construction of policy tables from quotes or fill probabilities.
"""

from typing import Optional

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..intensity.curves import f_eval, f_inverse, myopic_quote
from ..market.grid import InventoryGrid
from ..market.models import MarketSpec, Side
from .models import PolicyTable


def _default_grid(market: MarketSpec, grid: Optional[InventoryGrid]) -> InventoryGrid:
    return grid if grid is not None else InventoryGrid(market.limits)


def _blocked_mask(grid: InventoryGrid, side: Side) -> np.ndarray:
    return np.stack([~grid.admissible(i, side) for i in range(grid.dimension)], axis=1)


def policy_from_deltas(
    market: MarketSpec,
    bid_delta: np.ndarray,
    ask_delta: np.ndarray,
    grid: Optional[InventoryGrid] = None,
) -> PolicyTable:
    """Policy from (size, d) arrays of quotes; blocked entries are overwritten."""
    grid = _default_grid(market, grid)
    sides = {}
    for side, raw in ((Side.BID, bid_delta), (Side.ASK, ask_delta)):
        delta = np.array(raw, dtype=float, copy=True)
        if delta.shape != (grid.size, grid.dimension):
            raise InvalidParameterError("quote array does not match the grid", {"shape": list(delta.shape)})
        blocked = _blocked_mask(grid, side)
        delta[blocked] = np.nan
        prob = np.zeros_like(delta)
        for i, bond in enumerate(market.bonds):
            ok = ~blocked[:, i]
            prob[ok, i] = f_eval(bond.curve, delta[ok, i])
        sides[side] = (delta, prob)
    return PolicyTable(grid, sides[Side.BID][0], sides[Side.ASK][0], sides[Side.BID][1], sides[Side.ASK][1])


def policy_from_probabilities(
    market: MarketSpec,
    bid_prob: np.ndarray,
    ask_prob: np.ndarray,
    grid: Optional[InventoryGrid] = None,
) -> PolicyTable:
    """
    Policy from (size, d) arrays of fill probabilities in [0, 1).

    Probability 0 means the side never trades (δ = +inf).
    """
    grid = _default_grid(market, grid)
    sides = {}
    for side, raw in ((Side.BID, bid_prob), (Side.ASK, ask_prob)):
        prob = np.array(raw, dtype=float, copy=True)
        if prob.shape != (grid.size, grid.dimension):
            raise InvalidParameterError("probability array does not match the grid", {"shape": list(prob.shape)})
        if np.any((prob < 0) | (prob >= 1)):
            raise InvalidParameterError("fill probabilities must lie in [0, 1)")
        blocked = _blocked_mask(grid, side)
        prob[blocked] = 0.0
        delta = np.full_like(prob, np.inf)
        delta[blocked] = np.nan
        for i, bond in enumerate(market.bonds):
            live = ~blocked[:, i] & (prob[:, i] > 0)
            delta[live, i] = f_inverse(bond.curve, prob[live, i])
        sides[side] = (delta, prob)
    return PolicyTable(grid, sides[Side.BID][0], sides[Side.ASK][0], sides[Side.BID][1], sides[Side.ASK][1])


def myopic_policy(market: MarketSpec, grid: Optional[InventoryGrid] = None) -> PolicyTable:
    """Quote δ_myopic of each bond everywhere."""
    grid = _default_grid(market, grid)
    row = np.array([myopic_quote(b.curve) for b in market.bonds])
    quotes = np.tile(row, (grid.size, 1))
    return policy_from_deltas(market, quotes, quotes, grid)


def no_trade_policy(market: MarketSpec, grid: Optional[InventoryGrid] = None) -> PolicyTable:
    """Fill probability 0 everywhere."""
    grid = _default_grid(market, grid)
    zeros = np.zeros((grid.size, grid.dimension))
    return policy_from_probabilities(market, zeros, zeros, grid)
