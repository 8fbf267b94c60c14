"""
FD-HJB: implicit operator-splitting finite-difference solver

Responsibilities:
- One backward splitting step with Newton stages
- Stationary solve with stopping report and HJB residual

Dependencies: Intensity, Market, Tabular (value tables)
"""

from .models import FdConfig, FdResult, StoppingRule, StopReason
from .scheme import SplittingScheme, splitting_step, solve_stationary

__all__ = [
    "FdConfig",
    "FdResult",
    "StoppingRule",
    "StopReason",
    "SplittingScheme",
    "splitting_step",
    "solve_stationary",
]
