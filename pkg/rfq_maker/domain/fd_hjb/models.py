"""
Finite-difference domain models
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ..tabular.models import ValueTable


class StoppingRule(Enum):
    """How stationarity of the backward iteration is measured."""
    SUP = "sup"  # ‖θ_k − θ_{k+1}‖∞/τ
    SPAN = "span"  # max − min of (θ_k − θ_{k+1})/τ, constant mode fixed afterwards


class StopReason(Enum):
    STATIONARY = "stationary"
    HORIZON = "horizon"


@dataclass
class FdConfig:
    """
    Configuration of the implicit splitting scheme.

    Unset fields are resolved against a market by `resolved`: horizon 20/r,
    stationarity tolerance 1e-6·max|ψ|/r, Newton tolerance relative to the
    value scale.
    """
    tau: float = 0.5  # time step
    horizon: Optional[float] = None  # T
    newton_tol: Optional[float] = None  # stage residual, per unit time
    newton_max_iter: int = 200  # Jacobi-Newton sweeps per stage
    stationarity_tol: Optional[float] = None
    stopping: StoppingRule = StoppingRule.SPAN
    span_factor: float = 1e-3  # span threshold = span_factor·stationarity_tol
    correct_constant_mode: bool = True
    use_table: bool = True  # memoized Hamiltonian tables
    table_nodes: int = 2001

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidParameterError(f"tau must be > 0, got {self.tau}", {"tau": self.tau})
        for name in ("horizon", "newton_tol", "stationarity_tol"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise InvalidParameterError(f"{name} must be > 0", {name: value})
        if self.horizon is not None and self.horizon < self.tau:
            raise InvalidParameterError("horizon must be at least one time step", {"horizon": self.horizon})
        if self.newton_max_iter < 1:
            raise InvalidParameterError("newton_max_iter must be >= 1")
        if not self.span_factor > 0:
            raise InvalidParameterError("span_factor must be > 0")

    def resolved(self, penalty_max: float, value_rate: float, discount: float) -> "FdConfig":
        """
        Fill unset fields.

        Args:
            penalty_max: max|ψ| over the grid
            value_rate: max(max|ψ|, Σ H(0)), a per-unit-time value scale
            discount: Discount rate r
        """
        scale = max(value_rate, 1e-12) / discount
        return replace(
            self,
            horizon=self.horizon if self.horizon is not None else max(20.0 / discount, self.tau),
            newton_tol=self.newton_tol if self.newton_tol is not None else 1e-12 * max(1.0, scale) / self.tau,
            stationarity_tol=(
                self.stationarity_tol
                if self.stationarity_tol is not None
                else 1e-6 * (penalty_max if penalty_max > 0 else value_rate) / discount
            ),
        )


@dataclass
class FdResult:
    """Outcome of a stationary solve."""
    table: ValueTable
    stop_reason: StopReason
    steps: int
    elapsed_time: float  # backward time covered, in model time units
    last_increment: float  # stationarity measure at exit
    hjb_residual: float  # sup-norm of the stationary HJB residual of `table`
    constant_shift: float = 0.0

    @property
    def values(self) -> np.ndarray:
        return self.table.values
