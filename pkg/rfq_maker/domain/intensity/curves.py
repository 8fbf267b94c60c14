"""
SU Johnson fill-probability curves.

Evaluation, closed-form inverse and derivatives, the f·f″/(f′)² condition
check, and the myopic quote maximizing δ ↦ δ·f(δ).
"""

from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

from ...shared.exceptions import InvalidParameterError
from .models import ConditionCheck, SuJohnsonCurve
from .optimize import expand_upper_bracket, golden_section_max

ArrayLike = Union[float, np.ndarray]

PROB_FLOOR = 1e-15
MYOPIC_TOL = 1e-8

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _as_output(x: np.ndarray, like) -> ArrayLike:
    return float(x) if np.ndim(like) == 0 else x


def _shape_argument(curve: SuJohnsonCurve, delta: np.ndarray):
    """Return (g, g′, g″) with g(δ) = α + β·asinh((δ − μ)/σ)."""
    x = (delta - curve.mu) / curve.sigma_curve
    root = np.sqrt(1.0 + x * x)
    g = curve.alpha + curve.beta * np.arcsinh(x)
    g1 = curve.beta / (curve.sigma_curve * root)
    g2 = -curve.beta * x / (curve.sigma_curve ** 2 * root ** 3)
    return g, g1, g2


def _normal_pdf(z: np.ndarray) -> np.ndarray:
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def f_eval(curve: SuJohnsonCurve, delta: ArrayLike) -> ArrayLike:
    """
    Probability that the client trades at quote offset δ.

    Output is clamped to [1e-15, 1 − 1e-15] so that inverses stay finite.
    """
    d = np.asarray(delta, dtype=float)
    g, _, _ = _shape_argument(curve, d)
    p = np.clip(ndtr(-g), PROB_FLOOR, 1.0 - PROB_FLOOR)
    return _as_output(p, delta)


def f_derivative(curve: SuJohnsonCurve, delta: ArrayLike) -> ArrayLike:
    """Closed-form f′(δ) = −φ(g)·g′."""
    d = np.asarray(delta, dtype=float)
    g, g1, _ = _shape_argument(curve, d)
    return _as_output(-_normal_pdf(g) * g1, delta)


def f_second_derivative(curve: SuJohnsonCurve, delta: ArrayLike) -> ArrayLike:
    """Closed-form f″(δ) = φ(g)·(g·g′² − g″)."""
    d = np.asarray(delta, dtype=float)
    g, g1, g2 = _shape_argument(curve, d)
    return _as_output(_normal_pdf(g) * (g * g1 * g1 - g2), delta)


def _inverse_normal_upper(p: np.ndarray) -> np.ndarray:
    """Solve 1 − Φ(z) = p, with one Newton polish step."""
    z = -ndtri(p)
    residual = ndtr(-z) - p
    pdf = _normal_pdf(z)
    return z + np.where(pdf > 0, residual / np.where(pdf > 0, pdf, 1.0), 0.0)


def f_inverse(curve: SuJohnsonCurve, p: ArrayLike) -> ArrayLike:
    """
    Quote offset δ with f(δ) = p.

    Closed form δ = μ + σ·sinh((Φ⁻¹(1 − p) − α)/β).

    Raises:
        InvalidParameterError: If p is outside (0, 1)
    """
    prob = np.asarray(p, dtype=float)
    if np.any(~((prob > 0.0) & (prob < 1.0))):
        raise InvalidParameterError("fill probability must lie in (0, 1)", {"p": np.asarray(p).tolist()})
    z = _inverse_normal_upper(prob)
    delta = curve.mu + curve.sigma_curve * np.sinh((z - curve.alpha) / curve.beta)
    return _as_output(delta, p)


def check_condition(curve: SuJohnsonCurve, delta_grid: np.ndarray) -> ConditionCheck:
    """
    Maximum of f·f″/(f′)² over a grid of quote offsets.

    The caller compares the maximum with 2.
    """
    d = np.asarray(delta_grid, dtype=float)
    if d.size == 0:
        raise InvalidParameterError("delta grid must be nonempty")
    g, g1, g2 = _shape_argument(curve, d)
    # f·f″/f′² = (1 − Φ(g))·(g − g″/g′²)/φ(g), unclamped
    ratio = ndtr(-g) * (g - g2 / (g1 * g1)) / _normal_pdf(g)
    k = int(np.argmax(ratio))
    return ConditionCheck(maximum=float(ratio[k]), location=float(d[k]))


@lru_cache(maxsize=256)
def myopic_quote(curve: SuJohnsonCurve) -> float:
    """
    Quote maximizing the expected one-trade spread δ·f(δ) over δ > 0.

    Raises:
        BracketError: If the bracket has to grow beyond δ = 10^4
    """
    def objective(x):
        return x * f_eval(curve, x)

    base = np.zeros(1)
    width = np.array([max(abs(curve.mu), curve.sigma_curve) / 2.0])
    hi = expand_upper_bracket(objective, base, width)
    return float(golden_section_max(objective, base, hi, tol=MYOPIC_TOL)[0])
