"""
Exact grid solvers: policy evaluation, the θ̃/θ coupling, the Bellman
operator Γ₂∘Γ₁, value iteration and greedy policies.
"""

import logging
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ...shared.exceptions import ConvergenceError, GridTooLargeError, InvalidParameterError
from ..intensity.hamiltonian import hamiltonian, hamiltonian_argmax
from ..market.grid import InventoryGrid
from ..market.models import MarketSpec, Side
from ..market.service import gamma_rl, penalty_values, total_rfq_rate
from .models import PolicyTable, ValueFlavor, ValueTable
from .policies import policy_from_deltas

logger = logging.getLogger(__name__)

DIRECT_SOLVE_MAX = 10_000
GRID_REFUSE = 10_000_000
RESIDUAL_TOL = 1e-9
ROUNDOFF_FACTOR = 64 * np.finfo(float).eps


def check_grid_size(grid: InventoryGrid) -> None:
    """
    Raises:
        GridTooLargeError: If the grid has more than 10^7 points
    """
    size = InventoryGrid.size_for(grid.limits)
    if size > GRID_REFUSE:
        raise GridTooLargeError(
            f"inventory grid has {size} points, exact solvers accept at most {GRID_REFUSE}",
            {"size": size, "limits": list(grid.limits)},
        )


def _moves(market: MarketSpec, policy: PolicyTable) -> Iterator[Tuple[int, Side, np.ndarray, np.ndarray]]:
    """(bond, side, neighbour index, trade intensity λ·f) for every direction."""
    grid = policy.grid
    for i, bond in enumerate(market.bonds):
        for side, lam in ((Side.BID, bond.lambda_bid), (Side.ASK, bond.lambda_ask)):
            yield i, side, grid.neighbour(i, side), lam * policy.prob(side)[:, i]


def spread_income(market: MarketSpec, policy: PolicyTable) -> np.ndarray:
    """Expected spread income per unit time Σ λ·f(δ)·Δ·δ at every grid point."""
    income = np.zeros(policy.grid.size)
    for i, side, _, intensity in _moves(market, policy):
        delta = policy.delta(side)[:, i]
        trade = intensity > 0
        income[trade] += intensity[trade] * market.bonds[i].trade_size * delta[trade]
    return income


def _policy_system(market: MarketSpec, policy: PolicyTable):
    """Sparse system A θ̃ = b of the linear Bellman equation."""
    grid = policy.grid
    n = grid.size
    outflow = np.zeros(n)
    rows, cols, vals = [], [], []
    for _, _, nbr, intensity in _moves(market, policy):
        live = (nbr >= 0) & (intensity > 0)
        outflow[live] += intensity[live]
        rows.append(np.flatnonzero(live))
        cols.append(nbr[live])
        vals.append(-intensity[live])
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(market.discount + outflow)
    a = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    b = -penalty_values(market, grid.states) + spread_income(market, policy)
    return a, b


def policy_evaluation(
    market: MarketSpec,
    policy: PolicyTable,
    tol: float = RESIDUAL_TOL,
    max_iter: int = 1_000_000,
) -> ValueTable:
    """
    Value θ̃^δ of a fixed policy, solving the linear Bellman equation

        0 = −rθ̃(q) − ψ(q) + Σ λ f(δ)(Δδ + θ̃(q ± Δe) − θ̃(q)).

    Grids up to 10^4 points use a sparse direct solve; larger ones use the
    uniformized fixed-point iteration (contraction factor γ_RL) with
    bound-midpoint extrapolation.

    Args:
        market: Market specification
        policy: Policy on the grid
        tol: Sup-norm residual tolerance, relative to max(1, max|b|)

    Raises:
        GridTooLargeError: If the grid has more than 10^7 points
        ConvergenceError: If the fixed-point iteration stalls
    """
    grid = policy.grid
    check_grid_size(grid)
    a, b = _policy_system(market, policy)
    scale = max(1.0, float(np.max(np.abs(b))))

    if grid.size <= DIRECT_SOLVE_MAX:
        theta = spsolve(a.tocsc(), b)
        residual = float(np.max(np.abs(a @ theta - b)))
        if residual > tol * scale:
            logger.warning(f"Direct policy evaluation residual {residual:.3e} above {tol * scale:.3e}")
        return ValueTable(grid, theta, ValueFlavor.AT_ANY_TIME)

    rate = total_rfq_rate(market)
    gamma = gamma_rl(market)
    theta = np.zeros(grid.size)
    for it in range(1, max_iter + 1):
        step = theta - (a @ theta - b) / (market.discount + rate)
        diff = step - theta
        candidate = step + gamma / (1.0 - gamma) * 0.5 * (diff.min() + diff.max())
        residual = float(np.max(np.abs(a @ candidate - b)))
        if residual < tol * scale:
            logger.info(f"Policy evaluation converged after {it} iterations (residual {residual:.3e})")
            return ValueTable(grid, candidate, ValueFlavor.AT_ANY_TIME)
        theta = step
    raise ConvergenceError(
        "policy evaluation did not reach the residual tolerance",
        {"iterations": max_iter, "residual": residual, "tol": tol * scale},
    )


def to_rfq_value(market: MarketSpec, table: ValueTable) -> ValueTable:
    """θ = (θ̃ + ψ/(r+Λ))/γ_RL."""
    if table.flavor is not ValueFlavor.AT_ANY_TIME:
        raise InvalidParameterError("expected an at-any-time value table")
    psi = penalty_values(market, table.grid.states)
    denom = market.discount + total_rfq_rate(market)
    return ValueTable(table.grid, (table.values + psi / denom) / gamma_rl(market), ValueFlavor.AT_RFQ)


def to_any_time_value(market: MarketSpec, table: ValueTable) -> ValueTable:
    """θ̃ = −ψ/(r+Λ) + γ_RL·θ (operator Γ₁)."""
    if table.flavor is not ValueFlavor.AT_RFQ:
        raise InvalidParameterError("expected an at-RFQ value table")
    psi = penalty_values(market, table.grid.states)
    denom = market.discount + total_rfq_rate(market)
    return ValueTable(table.grid, -psi / denom + gamma_rl(market) * table.values, ValueFlavor.AT_ANY_TIME)


def _as_any_time(market: MarketSpec, table: ValueTable) -> ValueTable:
    return table if table.flavor is ValueFlavor.AT_ANY_TIME else to_any_time_value(market, table)


def _value_differences(market: MarketSpec, theta_any: np.ndarray, grid: InventoryGrid, i: int, side: Side):
    nbr = grid.neighbour(i, side)
    ok = nbr >= 0
    p = (theta_any[ok] - theta_any[nbr[ok]]) / market.bonds[i].trade_size
    return ok, p


def bellman_operator(market: MarketSpec, table: ValueTable) -> ValueTable:
    """
    Γ₂∘Γ₁ on an at-RFQ table.

    Γ₂ adds Σ_{i,s} H^{i,s}(p)/Λ to θ̃; blocked directions contribute nothing.
    """
    if table.flavor is not ValueFlavor.AT_RFQ:
        raise InvalidParameterError("bellman_operator acts on at-RFQ tables")
    grid = table.grid
    theta_any = to_any_time_value(market, table).values
    rate = total_rfq_rate(market)
    out = theta_any.copy()
    for i, bond in enumerate(market.bonds):
        for side, lam in ((Side.BID, bond.lambda_bid), (Side.ASK, bond.lambda_ask)):
            ok, p = _value_differences(market, theta_any, grid, i, side)
            out[ok] += hamiltonian(bond.curve, lam, bond.trade_size, p) / rate
    return ValueTable(grid, out, ValueFlavor.AT_RFQ)


def greedy_policy(market: MarketSpec, table: ValueTable) -> PolicyTable:
    """
    Optimal quotes δ*(p) at p = (θ̃(q) − θ̃(q ± Δe^i))/Δ^i.

    Accepts either flavor; at-RFQ tables are converted with Γ₁ first.
    """
    grid = table.grid
    theta_any = _as_any_time(market, table).values
    quotes = {}
    for side in Side:
        delta = np.full((grid.size, grid.dimension), np.nan)
        for i, bond in enumerate(market.bonds):
            ok, p = _value_differences(market, theta_any, grid, i, side)
            delta[ok, i] = hamiltonian_argmax(bond.curve, p)
        quotes[side] = delta
    return policy_from_deltas(market, quotes[Side.BID], quotes[Side.ASK], grid)


def value_iteration(
    market: MarketSpec,
    tol: float = 1e-4,
    accelerate: bool = True,
    max_iter: int = 1_000_000,
    grid: Optional[InventoryGrid] = None,
) -> ValueTable:
    """
    Fixed point θ* of Γ₂∘Γ₁ from θ₀ ≡ 0.

    Exits when ‖θ_{k+1} − θ_k‖∞ < tol·(1 − γ_RL), so ‖θ_{k+1} − θ*‖∞ < tol.
    With `accelerate`, each iterate is replaced by the exact value of its
    greedy policy (modified policy iteration) on grids that fit the direct
    solver, and by the bound-midpoint shift on larger grids; the exit rule
    is unchanged. The threshold is floored at the round-off level of the
    table.

    Raises:
        GridTooLargeError: If the grid has more than 10^7 points
        ConvergenceError: If max_iter iterations are exhausted
    """
    if not tol > 0:
        raise InvalidParameterError("tol must be > 0", {"tol": tol})
    grid = grid if grid is not None else InventoryGrid(market.limits)
    check_grid_size(grid)
    gamma = gamma_rl(market)
    theta = ValueTable(grid, np.zeros(grid.size), ValueFlavor.AT_RFQ)

    for it in range(1, max_iter + 1):
        new = bellman_operator(market, theta)
        diff = new.values - theta.values
        gap = float(np.max(np.abs(diff)))
        threshold = max(tol * (1.0 - gamma), ROUNDOFF_FACTOR * max(1.0, new.value_range))
        if gap < threshold:
            logger.info(f"Value iteration converged after {it} iterations (step {gap:.3e})")
            return new
        if accelerate:
            if grid.size <= DIRECT_SOLVE_MAX:
                new = to_rfq_value(market, policy_evaluation(market, greedy_policy(market, new)))
            else:
                new = new.shifted(gamma / (1.0 - gamma) * 0.5 * (diff.min() + diff.max()))
        theta = new

    raise ConvergenceError(
        "value iteration hit its iteration limit", {"iterations": max_iter, "step": gap}
    )
