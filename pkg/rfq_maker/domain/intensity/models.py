"""
Intensity domain models
"""

from dataclasses import dataclass

from ...shared.exceptions import InvalidParameterError


@dataclass(frozen=True)
class SuJohnsonCurve:
    """
    Fill-probability curve f(δ) = 1 − Φ(α + β·asinh((δ − μ)/σ)).

    The same curve is used on the bid and on the ask side of a bond.
    """
    alpha: float
    beta: float
    mu: float
    sigma_curve: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidParameterError(f"beta must be > 0, got {self.beta}", {"beta": self.beta})
        if not self.sigma_curve > 0:
            raise InvalidParameterError(
                f"sigma_curve must be > 0, got {self.sigma_curve}",
                {"sigma_curve": self.sigma_curve},
            )

    def rescaled(self, k: float) -> "SuJohnsonCurve":
        """Curve with location and scale multiplied by k (shape unchanged)."""
        return SuJohnsonCurve(self.alpha, self.beta, k * self.mu, k * self.sigma_curve)


@dataclass(frozen=True)
class ConditionCheck:
    """Result of the sup f·f″/(f′)² < 2 check on a grid."""
    maximum: float
    location: float

    @property
    def satisfied(self) -> bool:
        return self.maximum < 2.0
