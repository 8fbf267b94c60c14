"""
Row-major enumeration of the inventory grid ∏{−limit_i, ..., limit_i}.

Ordering: last bond varies fastest (numpy C order over n¹..n^d ascending),
so solver outputs are stable across runs.
"""

from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from ...shared.exceptions import InvalidParameterError
from .models import InventoryState, Side


class InventoryGrid:
    """Inventory grid with neighbour index maps along each axis."""

    def __init__(self, limits: Sequence[int]):
        self.limits: Tuple[int, ...] = tuple(int(x) for x in limits)
        if not self.limits or min(self.limits) < 1:
            raise InvalidParameterError("grid limits must be positive integers", {"limits": list(self.limits)})
        self.shape: Tuple[int, ...] = tuple(2 * x + 1 for x in self.limits)

    @staticmethod
    def size_for(limits: Sequence[int]) -> int:
        return int(np.prod([2 * int(x) + 1 for x in limits], dtype=object))

    @property
    def dimension(self) -> int:
        return len(self.limits)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def states(self) -> np.ndarray:
        """Array (size, d) of integer units, in grid order."""
        axes = [np.arange(-x, x + 1, dtype=np.int64) for x in self.limits]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def index(self, units) -> int:
        """Position of one inventory vector in grid order."""
        u = np.asarray(units.units if isinstance(units, InventoryState) else units, dtype=np.int64)
        if u.shape != (self.dimension,) or np.any(np.abs(u) > np.array(self.limits)):
            raise InvalidParameterError("inventory not on grid", {"units": u.tolist(), "limits": list(self.limits)})
        return int(np.ravel_multi_index(tuple(u + np.array(self.limits)), self.shape))

    def indices(self, units: np.ndarray) -> np.ndarray:
        """Vectorized `index` for an (n, d) array of states inside the grid."""
        shifted = np.asarray(units, dtype=np.int64) + np.array(self.limits)
        return np.ravel_multi_index(tuple(shifted.T), self.shape)

    def neighbour(self, bond: int, side: Side) -> np.ndarray:
        """Index of q ± e^bond for every grid point; −1 where the move is blocked."""
        return self._neighbours[(bond, side)]

    def admissible(self, bond: int, side: Side) -> np.ndarray:
        """Mask of grid points where a fill on (bond, side) is allowed."""
        return self._neighbours[(bond, side)] >= 0

    @cached_property
    def _neighbours(self):
        idx = np.arange(self.size).reshape(self.shape)
        out = {}
        for i in range(self.dimension):
            for side in Side:
                shifted = np.full(self.shape, -1, dtype=np.int64)
                src = [slice(None)] * self.dimension
                dst = [slice(None)] * self.dimension
                if side is Side.BID:
                    src[i] = slice(0, -1)
                    dst[i] = slice(1, None)
                else:
                    src[i] = slice(1, None)
                    dst[i] = slice(0, -1)
                shifted[tuple(src)] = idx[tuple(dst)]
                out[(i, side)] = shifted.ravel()
        return out

    def embed(self, values: np.ndarray, larger: "InventoryGrid", fill: float = 0.0) -> np.ndarray:
        """Copy values defined on this grid into a grid with larger limits."""
        if larger.dimension != self.dimension or any(a > b for a, b in zip(self.limits, larger.limits)):
            raise InvalidParameterError("target grid must contain this grid")
        out = np.full(larger.size, fill, dtype=float)
        out[larger.indices(self.states)] = values
        return out

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"InventoryGrid(limits={self.limits})"
