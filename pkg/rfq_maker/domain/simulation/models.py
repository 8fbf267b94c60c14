"""
Simulation domain models
"""

from dataclasses import dataclass
from typing import Iterator, Protocol, Tuple

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..market.models import InventoryState, Side


@dataclass(frozen=True)
class NoiseSpec:
    """Exploration noise ε ~ U[−a, a] and probability floor ν."""
    half_width: float = 0.05
    nu: float = 0.005

    def __post_init__(self):
        if not self.half_width > 0:
            raise InvalidParameterError(f"noise half-width must be > 0, got {self.half_width}")
        if not 0 < self.nu < 0.5:
            raise InvalidParameterError(f"probability floor must lie in (0, 0.5), got {self.nu}")


class QuoteSource(Protocol):
    """Anything that returns fill probabilities (bid, ask) of every bond at a state."""

    def probabilities(self, units: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
        ...


@dataclass(frozen=True)
class RolloutRecord:
    """One RFQ event of a rollout."""
    state: InventoryState
    bond: int
    side: Side
    prob: float
    delta: float
    prob_eps: float
    delta_eps: float
    fill: bool
    next_state: InventoryState

    @property
    def admissible(self) -> bool:
        return bool(np.isfinite(self.delta))


@dataclass
class RolloutBatch:
    """
    Column-wise storage of rollout records.

    Blocked events (bid at +limit, ask at −limit) carry probabilities 0 and
    quotes NaN.
    """
    states: np.ndarray  # (n, d) int
    bonds: np.ndarray  # (n,) int
    sides: np.ndarray  # (n,) int, 0 = bid, 1 = ask
    probs: np.ndarray
    deltas: np.ndarray
    probs_eps: np.ndarray
    deltas_eps: np.ndarray
    fills: np.ndarray  # (n,) bool
    next_states: np.ndarray  # (n, d) int

    def __len__(self) -> int:
        return int(self.bonds.shape[0])

    @property
    def admissible(self) -> np.ndarray:
        return np.isfinite(self.deltas)

    def __getitem__(self, k: int) -> RolloutRecord:
        return RolloutRecord(
            state=InventoryState(tuple(self.states[k])),
            bond=int(self.bonds[k]),
            side=Side.BID if self.sides[k] == 0 else Side.ASK,
            prob=float(self.probs[k]),
            delta=float(self.deltas[k]),
            prob_eps=float(self.probs_eps[k]),
            delta_eps=float(self.deltas_eps[k]),
            fill=bool(self.fills[k]),
            next_state=InventoryState(tuple(self.next_states[k])),
        )

    def __iter__(self) -> Iterator[RolloutRecord]:
        for k in range(len(self)):
            yield self[k]

    def take(self, index: np.ndarray) -> "RolloutBatch":
        return RolloutBatch(
            states=self.states[index],
            bonds=self.bonds[index],
            sides=self.sides[index],
            probs=self.probs[index],
            deltas=self.deltas[index],
            probs_eps=self.probs_eps[index],
            deltas_eps=self.deltas_eps[index],
            fills=self.fills[index],
            next_states=self.next_states[index],
        )

    @classmethod
    def concatenate(cls, batches) -> "RolloutBatch":
        batches = list(batches)
        if not batches:
            raise InvalidParameterError("nothing to concatenate")
        return cls(*(np.concatenate([getattr(b, name) for b in batches]) for name in cls.__dataclass_fields__))

    @classmethod
    def from_records(cls, records) -> "RolloutBatch":
        records = list(records)
        if not records:
            raise InvalidParameterError("empty record list")
        return cls(
            states=np.array([r.state.units for r in records], dtype=np.int64),
            bonds=np.array([r.bond for r in records], dtype=np.int64),
            sides=np.array([r.side.column for r in records], dtype=np.int64),
            probs=np.array([r.prob for r in records]),
            deltas=np.array([r.delta for r in records]),
            probs_eps=np.array([r.prob_eps for r in records]),
            deltas_eps=np.array([r.delta_eps for r in records]),
            fills=np.array([r.fill for r in records], dtype=bool),
            next_states=np.array([r.next_state.units for r in records], dtype=np.int64),
        )
