"""
Tabular domain models
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..market.grid import InventoryGrid
from ..market.models import Side


class ValueFlavor(Enum):
    """The two value functions of the discrete-time reformulation."""
    AT_ANY_TIME = "at_any_time"  # θ̃
    AT_RFQ = "at_rfq"  # θ


@dataclass
class ValueTable:
    """Value function on every point of an inventory grid."""
    grid: InventoryGrid
    values: np.ndarray
    flavor: ValueFlavor

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise InvalidParameterError(
                f"value table needs {self.grid.size} entries, got {self.values.shape}",
                {"shape": list(self.values.shape)},
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameterError("value table has non-finite entries")

    def at(self, units) -> float:
        return float(self.values[self.grid.index(units)])

    @property
    def value_range(self) -> float:
        """Value scale max|θ| used for relative cross-solver tolerances."""
        return float(np.max(np.abs(self.values)))

    def shifted(self, c: float) -> "ValueTable":
        return ValueTable(self.grid, self.values + c, self.flavor)


@dataclass
class PolicyTable:
    """
    Bid and ask quotes with their fill probabilities on a grid.

    Arrays are (size, d). Blocked entries (bid at +limit, ask at −limit)
    hold δ = NaN and probability 0. A probability of exactly 0 elsewhere
    means "never trade" and is stored with δ = +inf.
    """
    grid: InventoryGrid
    bid_delta: np.ndarray
    ask_delta: np.ndarray
    bid_prob: np.ndarray
    ask_prob: np.ndarray

    def __post_init__(self):
        shape = (self.grid.size, self.grid.dimension)
        for name in ("bid_delta", "ask_delta", "bid_prob", "ask_prob"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise InvalidParameterError(f"{name} must have shape {shape}", {"shape": list(arr.shape)})
            setattr(self, name, arr)

    def delta(self, side: Side) -> np.ndarray:
        return self.bid_delta if side is Side.BID else self.ask_delta

    def prob(self, side: Side) -> np.ndarray:
        return self.bid_prob if side is Side.BID else self.ask_prob

    def quote_at(self, units, bond: int, side: Side) -> float:
        return float(self.delta(side)[self.grid.index(units), bond])

    def prob_at(self, units, bond: int, side: Side) -> float:
        return float(self.prob(side)[self.grid.index(units), bond])
