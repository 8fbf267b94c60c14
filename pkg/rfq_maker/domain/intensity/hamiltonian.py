"""
Hamiltonian functions H(p) = Δ·λ·sup_δ f(δ)(δ − p) and their maximizers.

The supremum is computed by bracketing plus golden-section search, directly
per call. `HamiltonianTable` is an optional memoized cubic Hermite table
(nodes carry exact H and H′) used to accelerate the finite-difference solver.
"""

import logging
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ...shared.exceptions import InvalidParameterError
from .curves import f_eval, myopic_quote
from .models import SuJohnsonCurve
from .optimize import expand_upper_bracket, golden_section_max

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

ARGMAX_TOL = 1e-9


def hamiltonian_argmax(curve: SuJohnsonCurve, p: ArrayLike) -> ArrayLike:
    """
    Maximizer δ*(p) of δ ↦ f(δ)(δ − p).

    For p ≤ 0 the maximizer lies in (p, δ_myopic]; for p > 0 it lies in
    [max(δ_myopic, p), ∞) and the upper end is found by bracket expansion.

    Raises:
        InvalidParameterError: If p is not finite
        BracketError: If the bracket has to grow beyond δ = 10^4
    """
    pp = np.atleast_1d(np.asarray(p, dtype=float))
    if not np.all(np.isfinite(pp)):
        raise InvalidParameterError("value difference p must be finite")
    dm = myopic_quote(curve)

    def objective_for(pv):
        return lambda x: f_eval(curve, x) * (x - pv)

    result = np.empty_like(pp)
    low = pp <= 0.0
    if np.any(low):
        pl = pp[low]
        result[low] = golden_section_max(objective_for(pl), pl, np.full_like(pl, dm), tol=ARGMAX_TOL)
    high = ~low
    if np.any(high):
        ph = pp[high]
        base = np.maximum(ph, dm)
        obj = objective_for(ph)
        hi = expand_upper_bracket(obj, base, np.full_like(ph, curve.sigma_curve))
        result[high] = golden_section_max(obj, base, hi, tol=ARGMAX_TOL)

    return float(result[0]) if np.ndim(p) == 0 else result


def hamiltonian(curve: SuJohnsonCurve, lambda_rfq: float, trade_size: float, p: ArrayLike) -> ArrayLike:
    """H(p) = Δ·λ·f(δ*)(δ* − p)."""
    delta = hamiltonian_argmax(curve, p)
    gap = delta - (np.asarray(p, dtype=float) if np.ndim(p) else float(p))
    return trade_size * lambda_rfq * f_eval(curve, delta) * gap


def hamiltonian_derivative(curve: SuJohnsonCurve, lambda_rfq: float, trade_size: float, p: ArrayLike) -> ArrayLike:
    """H′(p) = −Δ·λ·f(δ*(p)) (envelope identity)."""
    return -trade_size * lambda_rfq * f_eval(curve, hamiltonian_argmax(curve, p))


def hamiltonian_with_derivative(curve: SuJohnsonCurve, lambda_rfq: float, trade_size: float, p: np.ndarray):
    """(H(p), H′(p)) from a single maximization."""
    pp = np.asarray(p, dtype=float)
    delta = hamiltonian_argmax(curve, pp)
    fill = f_eval(curve, delta)
    scale = trade_size * lambda_rfq
    return scale * fill * (delta - pp), -scale * fill


class HamiltonianTable:
    """
    Piecewise-cubic Hermite table of one Hamiltonian over [p_min, p_max].

    Outside the tabulated range evaluation falls back to direct optimization,
    so the table never extrapolates.
    """

    def __init__(
        self,
        curve: SuJohnsonCurve,
        lambda_rfq: float,
        trade_size: float,
        p_min: float,
        p_max: float,
        n_nodes: int = 2001,
    ):
        """
        Args:
            curve: Fill-probability curve
            lambda_rfq: RFQ arrival rate on that side
            trade_size: Trade size Δ in bonds
            p_min: Lower end of the tabulated range
            p_max: Upper end of the tabulated range
            n_nodes: Number of interpolation nodes
        """
        if not p_max > p_min:
            raise InvalidParameterError("p_max must exceed p_min", {"p_min": p_min, "p_max": p_max})
        self.curve = curve
        self.lambda_rfq = lambda_rfq
        self.trade_size = trade_size
        self.p_min = float(p_min)
        self.p_max = float(p_max)
        self._scale = trade_size * lambda_rfq

        nodes = np.linspace(self.p_min, self.p_max, n_nodes)
        delta = hamiltonian_argmax(curve, nodes)
        fill = f_eval(curve, delta)
        values = fill * (delta - nodes)
        self._spline = CubicHermiteSpline(nodes, values, -fill)
        self._dspline = self._spline.derivative()

    def _inside(self, p: np.ndarray) -> np.ndarray:
        return (p >= self.p_min) & (p <= self.p_max)

    def value(self, p: ArrayLike) -> ArrayLike:
        """H(p), interpolated inside the range."""
        pp = np.atleast_1d(np.asarray(p, dtype=float))
        out = np.empty_like(pp)
        inside = self._inside(pp)
        out[inside] = self._scale * self._spline(pp[inside])
        if not np.all(inside):
            out[~inside] = hamiltonian(self.curve, self.lambda_rfq, self.trade_size, pp[~inside])
        return float(out[0]) if np.ndim(p) == 0 else out

    def derivative(self, p: ArrayLike) -> ArrayLike:
        """H′(p), interpolated inside the range."""
        pp = np.atleast_1d(np.asarray(p, dtype=float))
        out = np.empty_like(pp)
        inside = self._inside(pp)
        out[inside] = self._scale * self._dspline(pp[inside])
        if not np.all(inside):
            out[~inside] = hamiltonian_derivative(self.curve, self.lambda_rfq, self.trade_size, pp[~inside])
        return float(out[0]) if np.ndim(p) == 0 else out

    def value_and_derivative(self, p: np.ndarray):
        """(H(p), H′(p)) on an array of p."""
        return self.value(np.atleast_1d(p)), self.derivative(np.atleast_1d(p))

    def self_check(self, n_points: int = 1000, tol: float = 1e-6, seed: int = 0) -> float:
        """
        Compare the table with direct evaluation at random points.

        Returns:
            Maximum absolute error relative to max(1, max|H|); a warning is
            logged when it exceeds `tol`
        """
        rng = np.random.default_rng(seed)
        probes = rng.uniform(self.p_min, self.p_max, n_points)
        exact = hamiltonian(self.curve, self.lambda_rfq, self.trade_size, probes)
        err = float(np.max(np.abs(self.value(probes) - exact)) / max(1.0, float(np.max(np.abs(exact)))))
        if err > tol:
            logger.warning(f"Hamiltonian table error {err:.3e} exceeds tolerance {tol:.1e}")
        return err


@lru_cache(maxsize=128)
def hamiltonian_table(
    curve: SuJohnsonCurve,
    lambda_rfq: float,
    trade_size: float,
    p_min: float,
    p_max: float,
    n_nodes: int = 2001,
) -> HamiltonianTable:
    """Memoized `HamiltonianTable` factory."""
    return HamiltonianTable(curve, lambda_rfq, trade_size, p_min, p_max, n_nodes)
