"""
Market domain models
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..intensity.models import SuJohnsonCurve

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
EIGEN_TOL = 1e-10


class Side(Enum):
    """Side of an RFQ, seen from the client."""
    BID = "bid"  # dealer buys, inventory +1 unit
    ASK = "ask"  # dealer sells, inventory -1 unit

    @property
    def step(self) -> int:
        return 1 if self is Side.BID else -1

    @property
    def column(self) -> int:
        return 0 if self is Side.BID else 1


class PenaltyKind(Enum):
    """Functional form of the inventory penalty ψ."""
    STDDEV = "stddev"
    VARIANCE = "variance"


@dataclass(frozen=True)
class BondSpec:
    """One bond: RFQ intensities, trade size, fill curve and maximal risk limit."""
    id: str
    lambda_bid: float
    lambda_ask: float
    rfq_size_numeraire: float
    curve: SuJohnsonCurve
    max_units: int = 5

    def __post_init__(self):
        if not (self.lambda_bid > 0 and self.lambda_ask > 0):
            raise InvalidParameterError(
                f"RFQ intensities of {self.id} must be > 0",
                {"bond": self.id, "lambda_bid": self.lambda_bid, "lambda_ask": self.lambda_ask},
            )
        if not self.rfq_size_numeraire > 0:
            raise InvalidParameterError(
                f"RFQ size of {self.id} must be > 0", {"bond": self.id, "size": self.rfq_size_numeraire}
            )
        if int(self.max_units) != self.max_units or self.max_units < 1:
            raise InvalidParameterError(
                f"max_units of {self.id} must be a positive integer", {"bond": self.id, "max_units": self.max_units}
            )

    @property
    def trade_size(self) -> float:
        """Trade size Δ in bonds (bonds are at par, so size / 100)."""
        return self.rfq_size_numeraire / 100.0

    @property
    def total_rate(self) -> float:
        return self.lambda_bid + self.lambda_ask


@dataclass(frozen=True)
class PenaltySpec:
    """Inventory penalty ψ(q) = ½γ√(q′Σq) (StdDev) or ½γ q′Σq (Variance)."""
    kind: PenaltyKind
    gamma: float

    def __post_init__(self):
        if not self.gamma >= 0:
            raise InvalidParameterError(f"gamma must be >= 0, got {self.gamma}", {"gamma": self.gamma})


@dataclass(frozen=True, eq=False)
class MarketSpec:
    """
    Bonds, covariance, penalty and discount rate.

    `limits` holds the currently active risk limits (in units); it defaults
    to each bond's `max_units` and is changed only through `with_limits`.
    """
    bonds: Tuple[BondSpec, ...]
    covariance: np.ndarray
    penalty: PenaltySpec
    discount: float
    limits: Optional[Tuple[int, ...]] = None
    _psd_covariance: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        bonds = tuple(self.bonds)
        if not bonds:
            raise InvalidParameterError("market needs at least one bond")
        object.__setattr__(self, "bonds", bonds)

        cov = np.array(self.covariance, dtype=float)
        d = len(bonds)
        if cov.shape != (d, d):
            raise InvalidParameterError(
                f"covariance must be {d}x{d}, got {cov.shape}", {"shape": list(cov.shape)}
            )
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
            raise InvalidParameterError("covariance matrix is not symmetric")
        object.__setattr__(self, "covariance", cov)

        w, v = np.linalg.eigh(cov)
        if w.min() < -EIGEN_TOL:
            logger.warning(f"Covariance has eigenvalue {w.min():.3e}; negative eigenvalues clamped to 0")
        psd = cov if w.min() >= 0 else (v * np.maximum(w, 0.0)) @ v.T
        object.__setattr__(self, "_psd_covariance", psd)

        if not self.discount > 0:
            raise InvalidParameterError(f"discount rate must be > 0, got {self.discount}", {"discount": self.discount})

        limits = self.limits if self.limits is not None else tuple(b.max_units for b in bonds)
        limits = tuple(int(x) for x in limits)
        if len(limits) != d:
            raise InvalidParameterError("one active limit per bond is required", {"limits": list(limits)})
        for bond, lim in zip(bonds, limits):
            if not 1 <= lim <= bond.max_units:
                raise InvalidParameterError(
                    f"active limit {lim} of {bond.id} outside [1, {bond.max_units}]",
                    {"bond": bond.id, "limit": lim},
                )
        object.__setattr__(self, "limits", limits)

    @property
    def dimension(self) -> int:
        return len(self.bonds)

    @property
    def bond_ids(self) -> Tuple[str, ...]:
        return tuple(b.id for b in self.bonds)

    @property
    def volatilities(self) -> np.ndarray:
        """Per-bond σ^i = sqrt(Σ_ii)."""
        return np.sqrt(np.diag(self.covariance))

    @property
    def psd_covariance(self) -> np.ndarray:
        return self._psd_covariance

    @property
    def trade_sizes(self) -> np.ndarray:
        return np.array([b.trade_size for b in self.bonds])

    @property
    def max_units(self) -> Tuple[int, ...]:
        return tuple(b.max_units for b in self.bonds)

    def with_limits(self, limits: Sequence[int]) -> "MarketSpec":
        """Copy with other active risk limits."""
        return replace(self, limits=tuple(int(x) for x in limits))

    def with_penalty(
        self,
        kind: Optional[PenaltyKind] = None,
        gamma: Optional[float] = None,
        discount: Optional[float] = None,
    ) -> "MarketSpec":
        """Copy with the penalty and/or discount rate overridden."""
        penalty = PenaltySpec(kind or self.penalty.kind, self.penalty.gamma if gamma is None else gamma)
        return replace(self, penalty=penalty, discount=self.discount if discount is None else discount)

    def with_max_units(self, max_units: Sequence[int]) -> "MarketSpec":
        """Copy with other maximal risk limits; active limits reset to them."""
        if len(max_units) != self.dimension:
            raise InvalidParameterError("one maximal limit per bond is required", {"max_units": list(max_units)})
        bonds = tuple(replace(b, max_units=int(m)) for b, m in zip(self.bonds, max_units))
        return MarketSpec(bonds, self.covariance, self.penalty, self.discount)

    def subset(self, bond_ids: Sequence[str]) -> "MarketSpec":
        """Restrict to some bonds, in the order given, re-slicing the covariance."""
        index = {b.id: k for k, b in enumerate(self.bonds)}
        missing = [b for b in bond_ids if b not in index]
        if missing:
            raise InvalidParameterError(f"unknown bond ids: {missing}", {"unknown": missing})
        rows = [index[b] for b in bond_ids]
        return MarketSpec(
            bonds=tuple(self.bonds[k] for k in rows),
            covariance=self.covariance[np.ix_(rows, rows)],
            penalty=self.penalty,
            discount=self.discount,
            limits=tuple(self.limits[k] for k in rows),
        )


@dataclass(frozen=True)
class InventoryState:
    """Held units per bond; physical inventory is units[i]·trade_size[i]."""
    units: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(int(u) for u in self.units))

    @classmethod
    def flat(cls, dimension: int) -> "InventoryState":
        return cls((0,) * dimension)

    def as_array(self) -> np.ndarray:
        return np.array(self.units, dtype=np.int64)

    def check(self, market: MarketSpec) -> None:
        """
        Raises:
            InvalidParameterError: If the state is outside the active limits
        """
        if len(self.units) != market.dimension:
            raise InvalidParameterError(
                "inventory dimension does not match the market", {"units": list(self.units)}
            )
        for u, lim in zip(self.units, market.limits):
            if abs(u) > lim:
                raise InvalidParameterError(
                    "inventory outside the active risk limits",
                    {"units": list(self.units), "limits": list(market.limits)},
                )

    def moved(self, bond: int, side: Side) -> "InventoryState":
        units = list(self.units)
        units[bond] += side.step
        return InventoryState(tuple(units))

    def physical(self, market: MarketSpec) -> np.ndarray:
        return self.as_array() * market.trade_sizes
