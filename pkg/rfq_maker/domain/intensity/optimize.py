"""
Vectorized bracketing and golden-section maximization.

Every routine works element-wise on numpy arrays so that a whole inventory
grid is optimized in one pass.
"""

import math
from typing import Callable

import numpy as np

from ...shared.exceptions import BracketError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2

MAX_BRACKET = 1e4

Objective = Callable[[np.ndarray], np.ndarray]


def golden_section_max(obj: Objective, a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """
    Golden-section maximizer of a unimodal objective on [a, b], element-wise.

    Args:
        obj: Vectorized objective, evaluated on arrays shaped like `a`
        a: Lower ends of the brackets
        b: Upper ends of the brackets
        tol: Absolute tolerance on the maximizer

    Returns:
        Array of maximizers
    """
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    dist = b - a
    max_dist = float(np.max(dist)) if dist.size else 0.0
    if max_dist <= tol:
        return (a + b) / 2

    n = int(math.ceil(math.log(tol / max_dist) / math.log(INV_PHI)))

    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = obj(c)
    yd = obj(d)

    for _ in range(n - 1):
        left = yc > yd
        # left: maximum in [a, d]; right: maximum in [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        dist = INV_PHI * dist
        new_c = a + INV_PHI_SQ * dist
        new_d = a + INV_PHI * dist
        # reuse the surviving interior point, evaluate one new point per element
        probe = np.where(left, new_c, new_d)
        yp = obj(probe)
        yc, yd, c, d = (
            np.where(left, yp, yd),
            np.where(left, yc, yp),
            np.where(left, new_c, d),
            np.where(left, c, new_d),
        )

    return np.where(yc > yd, (a + d) / 2, (c + b) / 2)


def expand_upper_bracket(obj: Objective, base: np.ndarray, width: np.ndarray) -> np.ndarray:
    """
    Find `hi` such that the maximizer of a unimodal objective on [base, ∞) lies in [base, hi].

    Widths double until the objective starts decreasing.

    Raises:
        BracketError: If the bracket grows beyond MAX_BRACKET
    """
    base = np.asarray(base, dtype=float)
    width = np.array(np.broadcast_to(width, base.shape), dtype=float, copy=True)
    prev = base + width
    hi = base + 2 * width
    y_prev = obj(prev)
    y_hi = obj(hi)
    active = y_hi >= y_prev
    while np.any(active):
        if np.any(hi[active] > MAX_BRACKET):
            raise BracketError(
                "Bracket expansion exceeded the admissible quote range",
                {"limit": MAX_BRACKET, "reached": float(np.max(hi[active]))},
            )
        width = np.where(active, 2 * width, width)
        prev = np.where(active, hi, prev)
        y_prev = np.where(active, y_hi, y_prev)
        hi = np.where(active, base + 2 * width, hi)
        y_hi = np.where(active, obj(hi), y_hi)
        active = active & (y_hi >= y_prev)
    return hi
