"""
Stationary distribution of the per-RFQ inventory chain and the exact
average reward per RFQ of a policy.
"""

import logging
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from ...shared.exceptions import ConvergenceError, InvalidParameterError, ReducibleChainError
from ..market.models import MarketSpec, Side
from ..market.service import penalty_values, rfq_event_distribution, total_rfq_rate
from .models import PolicyTable
from .solvers import DIRECT_SOLVE_MAX, check_grid_size

logger = logging.getLogger(__name__)

INVARIANCE_TOL = 1e-10
MAX_REPORTED_STATES = 20


def transition_matrix(market: MarketSpec, policy: PolicyTable) -> sparse.csr_matrix:
    """Row-stochastic transition matrix of the inventory from one RFQ to the next."""
    grid = policy.grid
    n = grid.size
    events = rfq_event_distribution(market)
    stay = np.ones(n)
    rows, cols, vals = [], [], []
    for i in range(grid.dimension):
        for side in Side:
            nbr = grid.neighbour(i, side)
            move = events[i, side.column] * policy.prob(side)[:, i]
            live = (nbr >= 0) & (move > 0)
            stay[live] -= move[live]
            rows.append(np.flatnonzero(live))
            cols.append(nbr[live])
            vals.append(move[live])
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(stay)
    return sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))


def _check_irreducible(transitions: sparse.csr_matrix, states: np.ndarray) -> None:
    n_comp, labels = connected_components(transitions, directed=True, connection="strong")
    if n_comp == 1:
        return
    # closed classes: components without transitions leaving them
    coo = transitions.tocoo()
    leaving = (labels[coo.row] != labels[coo.col]) & (coo.data > 0)
    open_classes = set(labels[coo.row[leaving]].tolist())
    closed = [c for c in range(n_comp) if c not in open_classes]
    report = [states[labels == c][:MAX_REPORTED_STATES].tolist() for c in closed[:MAX_REPORTED_STATES]]
    raise ReducibleChainError(
        f"policy induces a reducible chain with {len(closed)} closed classes",
        {"n_components": int(n_comp), "n_closed": len(closed), "closed_classes": report},
    )


def stationary_distribution(market: MarketSpec, policy: PolicyTable) -> np.ndarray:
    """
    Stationary probability m with m′P = m′ over the policy's grid.

    Raises:
        ReducibleChainError: If the chain has more than one communicating class
    """
    grid = policy.grid
    check_grid_size(grid)
    transitions = transition_matrix(market, policy)
    _check_irreducible(transitions, grid.states)
    n = grid.size

    if n <= DIRECT_SOLVE_MAX:
        system = (transitions.T - sparse.identity(n, format="csr")).tolil()
        system[n - 1, :] = np.ones(n)
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        m = spsolve(system.tocsc(), rhs)
    else:
        m = np.full(n, 1.0 / n)
        pt = transitions.T.tocsr()
        for _ in range(100 * n):
            nxt = pt @ m
            if np.abs(nxt - m).sum() < INVARIANCE_TOL:
                m = nxt
                break
            m = nxt
        else:
            raise ConvergenceError("power iteration for the stationary distribution did not converge")

    m = np.maximum(m, 0.0)
    m /= m.sum()
    residual = float(np.abs(transitions.T @ m - m).sum())
    if residual > INVARIANCE_TOL:
        logger.warning(f"Stationary distribution invariance residual {residual:.3e}")
    return m


def state_rewards(market: MarketSpec, policy: PolicyTable):
    """
    Per-state moments of the per-RFQ reward X = 1_fill·Δδ − ψ(q)/Λ.

    Returns:
        (E[X | q], E[X² | q]) as arrays over the grid
    """
    grid = policy.grid
    events = rfq_event_distribution(market)
    cost = penalty_values(market, grid.states) / total_rfq_rate(market)
    first = np.zeros(grid.size)
    second = np.zeros(grid.size)
    for i, bond in enumerate(market.bonds):
        for side in Side:
            prob = events[i, side.column] * policy.prob(side)[:, i]
            trade = prob > 0
            gain = bond.trade_size * policy.delta(side)[trade, i]
            first[trade] += prob[trade] * gain
            second[trade] += prob[trade] * gain * gain
    mean = first - cost
    return mean, second - 2.0 * cost * first + cost * cost


def _distribution(market: MarketSpec, policy: PolicyTable, distribution: Optional[np.ndarray]) -> np.ndarray:
    if distribution is None:
        return stationary_distribution(market, policy)
    m = np.asarray(distribution, dtype=float)
    if m.shape != (policy.grid.size,):
        raise InvalidParameterError("distribution does not match the grid", {"shape": list(m.shape)})
    return m


def average_reward_per_rfq(
    market: MarketSpec,
    policy: PolicyTable,
    distribution: Optional[np.ndarray] = None,
) -> float:
    """
    Exact long-run average reward per RFQ

        Σ_q m(q)·[Σ_{i,s} P(i,s)·f(δ^{i,s}(q))·Δ^i·δ^{i,s}(q) − ψ(q)/Λ].

    Args:
        distribution: Invariant distribution to use instead of the stationary one
            (needed for policies whose chain is reducible)
    """
    m = _distribution(market, policy, distribution)
    mean, _ = state_rewards(market, policy)
    return float(m @ mean)


def reward_per_rfq_std(
    market: MarketSpec,
    policy: PolicyTable,
    distribution: Optional[np.ndarray] = None,
) -> float:
    """Standard deviation of one per-RFQ reward draw under the stationary regime."""
    m = _distribution(market, policy, distribution)
    mean, second = state_rewards(market, policy)
    avg = float(m @ mean)
    return float(np.sqrt(max(float(m @ second) - avg * avg, 0.0)))
