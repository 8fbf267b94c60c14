"""
Implicit operator-splitting scheme for the stationary HJB equation

    0 = −rθ̃(q) − ψ(q) + Σ_i 1_{q^i<Q^i} H^{i,b}((θ̃(q) − θ̃(q+Δe^i))/Δ)
                      + Σ_i 1_{q^i>−Q^i} H^{i,a}((θ̃(q) − θ̃(q−Δe^i))/Δ).

One backward step maps θ̂_{k+1} to θ̂_k through a linear stage
y₀ = (θ̂_{k+1} − τψ)/(1 + rτ) and one nonlinear stage per bond,

    (y_{i−1} − y_i)/τ + H^{i,b}(·) + H^{i,a}(·) = 0,

solved by Jacobi-Newton sweeps along axis i (neighbours frozen per sweep).
"""

import logging
import math
from functools import partial
from typing import Callable, List, Optional, Tuple

import numpy as np

from ...shared.exceptions import ConvergenceError, InvalidParameterError
from ..intensity.curves import f_eval, myopic_quote
from ..intensity.hamiltonian import hamiltonian_table, hamiltonian_with_derivative
from ..market.grid import InventoryGrid
from ..market.models import MarketSpec, Side
from ..market.service import penalty_values
from ..tabular.models import ValueFlavor, ValueTable
from ..tabular.solvers import check_grid_size
from .models import FdConfig, FdResult, StoppingRule, StopReason

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

LOG_EVERY = 1000


class SplittingScheme:
    """
    Backward time stepping on one inventory grid.

    Responsibilities:
    - Hamiltonian evaluators (direct or memoized tables)
    - One splitting step with the τ-halving retry
    - Stationary HJB residual
    """

    def __init__(self, market: MarketSpec, config: Optional[FdConfig] = None, grid: Optional[InventoryGrid] = None):
        self.market = market
        self.grid = grid if grid is not None else InventoryGrid(market.limits)
        check_grid_size(self.grid)
        self.psi = penalty_values(market, self.grid.states)
        psi_max = float(np.max(np.abs(self.psi)))
        myopic_rate = sum(
            b.trade_size * (b.lambda_bid + b.lambda_ask) * myopic_quote(b.curve) * f_eval(b.curve, myopic_quote(b.curve))
            for b in market.bonds
        )
        self.config = (config or FdConfig()).resolved(psi_max, max(psi_max, myopic_rate), market.discount)
        self.tables = []
        self.evaluators = self._build_evaluators(psi_max)

    def _build_evaluators(self, psi_max: float) -> List[Tuple[Evaluator, Evaluator]]:
        out = []
        for bond in self.market.bonds:
            pair = []
            for lam in (bond.lambda_bid, bond.lambda_ask):
                if self.config.use_table:
                    width = 10.0 * (abs(bond.curve.mu) + bond.curve.sigma_curve)
                    width += 2.0 * psi_max / (bond.trade_size * min(bond.lambda_bid, bond.lambda_ask))
                    table = hamiltonian_table(bond.curve, lam, bond.trade_size, -width, width, self.config.table_nodes)
                    self.tables.append(table)
                    pair.append(table.value_and_derivative)
                else:
                    pair.append(partial(hamiltonian_with_derivative, bond.curve, lam, bond.trade_size))
            out.append(tuple(pair))
        return out

    def check_tables(self) -> float:
        """Worst self-check error over the memoized tables (0 when tables are off)."""
        return max((t.self_check() for t in self.tables), default=0.0)

    def _hamiltonian_terms(self, y: np.ndarray, i: int):
        """Σ_s H^{i,s} and its derivative w.r.t. y(q), neighbours frozen."""
        bond = self.market.bonds[i]
        total = np.zeros_like(y)
        slope = np.zeros_like(y)
        for side, evaluate in zip((Side.BID, Side.ASK), self.evaluators[i]):
            nbr = self.grid.neighbour(i, side)
            ok = nbr >= 0
            h, dh = evaluate((y[ok] - y[nbr[ok]]) / bond.trade_size)
            total[ok] += h
            slope[ok] += dh / bond.trade_size
        return total, slope

    def _stage(self, y_prev: np.ndarray, i: int, tau: float) -> Tuple[Optional[np.ndarray], float]:
        """Solve (y_prev − y)/τ + Σ_s H^{i,s}(y) = 0; returns (None, residual) on failure."""
        h, _ = self._hamiltonian_terms(y_prev, i)
        y = y_prev + tau * h
        residual = math.inf
        for _ in range(self.config.newton_max_iter):
            h, dh = self._hamiltonian_terms(y, i)
            f = (y_prev - y) / tau + h
            residual = float(np.max(np.abs(f)))
            if residual < self.config.newton_tol:
                return y, residual
            y = y - f / (dh - 1.0 / tau)
        return None, residual

    def linear_stage(self, theta_next: np.ndarray, tau: Optional[float] = None) -> np.ndarray:
        """y₀ = (θ̂_{k+1} − τψ)/(1 + rτ)."""
        tau = self.config.tau if tau is None else tau
        return (theta_next - tau * self.psi) / (1.0 + self.market.discount * tau)

    def _step_once(self, theta_next: np.ndarray, tau: float):
        y = self.linear_stage(theta_next, tau)
        for i in range(self.grid.dimension):
            y, residual = self._stage(y, i, tau)
            if y is None:
                return None, i, residual
        return y, None, 0.0

    def step(self, theta_next: np.ndarray) -> np.ndarray:
        """
        One backward step θ̂_{k+1} → θ̂_k.

        Raises:
            ConvergenceError: If a Newton stage fails at τ and again at τ/2
        """
        tau = self.config.tau
        y, stage, residual = self._step_once(theta_next, tau)
        if y is not None:
            return y
        logger.warning(f"Newton stage {stage} failed (residual {residual:.3e}); retrying with tau={tau / 2}")
        half, stage, residual = self._step_once(theta_next, tau / 2)
        if half is not None:
            half, stage, residual = self._step_once(half, tau / 2)
        if half is None:
            raise ConvergenceError(
                "Newton iterations of the splitting scheme did not converge",
                {"stage": stage, "tau": tau / 2, "residual": residual, "newton_tol": self.config.newton_tol},
            )
        return half

    def hjb_residual(self, values: np.ndarray) -> np.ndarray:
        """−rθ̃ − ψ + Σ H at every grid point."""
        out = -self.market.discount * values - self.psi
        for i in range(self.grid.dimension):
            h, _ = self._hamiltonian_terms(values, i)
            out += h
        return out


def splitting_step(
    market: MarketSpec,
    theta_next: ValueTable,
    config: Optional[FdConfig] = None,
    scheme: Optional[SplittingScheme] = None,
) -> ValueTable:
    """One implicit splitting step applied to an at-any-time table."""
    if theta_next.flavor is not ValueFlavor.AT_ANY_TIME:
        raise InvalidParameterError("the splitting scheme acts on at-any-time tables")
    scheme = scheme or SplittingScheme(market, config, theta_next.grid)
    return ValueTable(theta_next.grid, scheme.step(theta_next.values), ValueFlavor.AT_ANY_TIME)


def solve_stationary(
    market: MarketSpec,
    config: Optional[FdConfig] = None,
    terminal: Optional[np.ndarray] = None,
    grid: Optional[InventoryGrid] = None,
) -> FdResult:
    """
    Iterate the splitting scheme backward from a terminal condition until
    stationarity or until the horizon is exhausted.

    With the span rule, the iteration stops once increments are constant
    across the grid; `correct_constant_mode` then shifts the table by
    mean(HJB residual)/r, which removes both the undecayed constant mode and
    the O(τ) constant bias of the splitting.

    Args:
        terminal: Terminal condition (defaults to ≡ 0)
    """
    scheme = SplittingScheme(market, config, grid)
    cfg = scheme.config
    n = scheme.grid.size
    theta = np.zeros(n) if terminal is None else np.array(np.broadcast_to(terminal, (n,)), dtype=float)

    if cfg.use_table:
        scheme.check_tables()

    max_steps = int(math.ceil(cfg.horizon / cfg.tau - 1e-9))
    if cfg.stopping is StoppingRule.SPAN:
        threshold = cfg.span_factor * cfg.stationarity_tol
    else:
        threshold = cfg.stationarity_tol

    reason = StopReason.HORIZON
    measure = math.inf
    steps = 0
    for steps in range(1, max_steps + 1):
        new = scheme.step(theta)
        increment = (theta - new) / cfg.tau
        theta = new
        if cfg.stopping is StoppingRule.SPAN:
            measure = float(increment.max() - increment.min())
        else:
            measure = float(np.max(np.abs(increment)))
        if steps % LOG_EVERY == 0:
            logger.debug(f"FD step {steps}: stationarity measure {measure:.3e}")
        if measure < threshold:
            reason = StopReason.STATIONARY
            break

    shift = 0.0
    if cfg.correct_constant_mode:
        shift = float(np.mean(scheme.hjb_residual(theta))) / market.discount
        theta = theta + shift
    residual = float(np.max(np.abs(scheme.hjb_residual(theta))))

    if reason is StopReason.HORIZON:
        logger.warning(
            f"FD horizon exhausted after {steps} steps without stationarity "
            f"(measure {measure:.3e} > {threshold:.3e}); HJB residual {residual:.3e}"
        )
    else:
        logger.info(f"FD solve stationary after {steps} steps; HJB residual {residual:.3e}")

    return FdResult(
        table=ValueTable(scheme.grid, theta, ValueFlavor.AT_ANY_TIME),
        stop_reason=reason,
        steps=steps,
        elapsed_time=steps * cfg.tau,
        last_increment=measure,
        hjb_residual=residual,
        constant_shift=shift,
    )
