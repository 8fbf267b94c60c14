"""
Actor-Critic Service

TD targets and semi-gradient critic updates, exploration advantages and
the noise-guided actor updates.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import torch

from ...shared.exceptions import InvalidParameterError
from ..market.models import MarketSpec
from ..market.service import gamma_rl, penalty_values, total_rfq_rate
from ..neural.models import OptimizerConfig, OptimizerKind
from ..neural.network import DTYPE, make_optimizer
from ..simulation.models import RolloutBatch, RolloutRecord
from .models import ActorVariant, TrainConfig
from .networks import ActorBundle, Critic

logger = logging.getLogger(__name__)


@dataclass
class ActorDataset:
    """Records of one bond: net-side inventories (asks mirrored), dV and dp."""
    units: np.ndarray
    dv: np.ndarray
    dp: np.ndarray

    def __len__(self) -> int:
        return int(self.dv.shape[0])


def _check_bounds(market: MarketSpec, batch: RolloutBatch) -> None:
    if np.any(np.abs(batch.states) > np.asarray(market.limits)):
        raise InvalidParameterError(
            "rollout state outside the active risk limits", {"limits": list(market.limits)}
        )


def _moved_states(batch: RolloutBatch) -> np.ndarray:
    """q ± e^I where the side is admissible, q elsewhere."""
    moved = batch.states.copy()
    live = np.flatnonzero(batch.admissible)
    moved[live, batch.bonds[live]] += np.where(batch.sides[live] == 0, 1, -1)
    return moved


def _one_step_values(
    market: MarketSpec,
    critic: Critic,
    batch: RolloutBatch,
    probs: np.ndarray,
    deltas: np.ndarray,
) -> np.ndarray:
    """
    Expected one-RFQ value under fill probabilities `probs`:

        p·[Δδ − ψ(q±e)/(r+Λ) + γθ(q±e)] + (1 − p)·[−ψ(q)/(r+Λ) + γθ(q)]
    """
    gamma = gamma_rl(market)
    denom = market.discount + total_rfq_rate(market)
    moved = _moved_states(batch)
    stay = -penalty_values(market, batch.states) / denom + gamma * critic.values(batch.states)
    go = -penalty_values(market, moved) / denom + gamma * critic.values(moved)
    trade = probs > 0
    spread = np.zeros(len(batch))
    spread[trade] = market.trade_sizes[batch.bonds[trade]] * deltas[trade]
    out = stay.copy()
    out[trade] = probs[trade] * (spread[trade] + go[trade]) + (1.0 - probs[trade]) * stay[trade]
    return out


def td_targets(market: MarketSpec, critic: Critic, batch: RolloutBatch, r_mean: float) -> np.ndarray:
    """
    TD targets θ̂ of every record with the unperturbed quotes.

    Raises:
        InvalidParameterError: If a record lies outside the active limits
    """
    _check_bounds(market, batch)
    return _one_step_values(market, critic, batch, batch.probs, batch.deltas) - r_mean


def td_target(market: MarketSpec, critic: Critic, record: RolloutRecord, r_mean: float) -> float:
    """TD target θ̂ of one record."""
    return float(td_targets(market, critic, RolloutBatch.from_records([record]), r_mean)[0])


def _minibatches(n: int, size: int, count: Optional[int]) -> List[np.ndarray]:
    """`count` consecutive index blocks of `size` wrapping around; by default one pass."""
    if count is None:
        return [np.arange(k * size, min((k + 1) * size, n)) for k in range(math.ceil(n / size))]
    return [np.arange(k * size, (k + 1) * size) % n for k in range(count)]


def critic_update(
    market: MarketSpec,
    critic: Critic,
    batch: RolloutBatch,
    r_mean: float,
    config: TrainConfig,
) -> float:
    """
    Semi-gradient TD steps on shuffled records.

    Each mini-batch of K records moves the weights by
    η·(1/K)·Σ ∇θ(q)(θ̂ − θ(q)); the targets are computed with the current
    weights and held fixed during the step.

    Returns:
        Mean absolute TD error over the mini-batches, before each step
    """
    if len(batch) == 0:
        return 0.0
    optimizer = make_optimizer(critic.net, OptimizerConfig(OptimizerKind.PLAIN_SGD, config.critic_rate))
    errors = []
    for index in _minibatches(len(batch), config.critic_batch, config.critic_batches):
        sub = batch.take(index)
        targets = torch.as_tensor(td_targets(market, critic, sub, r_mean), dtype=DTYPE)
        predicted = critic.predict(sub.states)
        loss = 0.5 * torch.mean((targets - predicted) ** 2)
        optimizer.zero_grad(set_to_none=True)
        loss.backward()
        optimizer.step()
        errors.append(float(torch.mean(torch.abs(targets - predicted.detach()))))
    return float(np.mean(errors))


def raw_advantages(market: MarketSpec, critic: Critic, batch: RolloutBatch) -> np.ndarray:
    """Perturbed minus unperturbed one-step value of every record (0 on blocked ones)."""
    _check_bounds(market, batch)
    perturbed = _one_step_values(market, critic, batch, batch.probs_eps, batch.deltas_eps)
    plain = _one_step_values(market, critic, batch, batch.probs, batch.deltas)
    return np.where(batch.admissible, perturbed - plain, 0.0)


def normalize_advantages(raw: np.ndarray) -> np.ndarray:
    """Divide by the sample standard deviation; zero spread gives all zeros."""
    raw = np.asarray(raw, dtype=float)
    if raw.size < 2:
        return np.zeros_like(raw)
    spread = float(np.std(raw, ddof=1))
    if spread == 0.0 or not np.isfinite(spread):
        return np.zeros_like(raw)
    return raw / spread


def exploration_advantage(market: MarketSpec, critic: Critic, batch: RolloutBatch) -> np.ndarray:
    """
    Normalized advantages dV of the admissible records, per bond.

    Returns:
        Array aligned with `batch`; blocked records hold NaN
    """
    raw = raw_advantages(market, critic, batch)
    dv = np.full(len(batch), np.nan)
    admissible = batch.admissible
    for i in range(market.dimension):
        sel = admissible & (batch.bonds == i)
        if np.any(sel):
            dv[sel] = normalize_advantages(raw[sel])
    return dv


def actor_datasets(market: MarketSpec, critic: Critic, batch: RolloutBatch) -> Dict[int, ActorDataset]:
    """Split admissible records by bond, mirroring ask inventories onto the bid net."""
    dv = exploration_advantage(market, critic, batch)
    datasets = {}
    for i in range(market.dimension):
        sel = batch.admissible & (batch.bonds == i)
        if not np.any(sel):
            continue
        units = np.where((batch.sides[sel] == 0)[:, None], batch.states[sel], -batch.states[sel])
        datasets[i] = ActorDataset(units, dv[sel], batch.probs_eps[sel] - batch.probs[sel])
    return datasets


def _actor_step(actor: ActorBundle, optimizer: torch.optim.Optimizer, bond: int, data: ActorDataset, index: np.ndarray) -> None:
    weight = torch.as_tensor(data.dv[index] * data.dp[index], dtype=DTYPE)
    loss = -torch.mean(actor.predict(data.units[index], bond) * weight)
    optimizer.zero_grad(set_to_none=True)
    loss.backward()
    optimizer.step()


def actor_update(actor: ActorBundle, datasets: Dict[int, ActorDataset], config: TrainConfig) -> int:
    """
    Move each bond's bid probability along ∇p·dV·dp in mini-batches of L.

    MultiNet bonds are updated independently; the single net visits the
    bond datasets round-robin. Bonds without records are skipped.

    Returns:
        Number of mini-batch steps taken
    """
    plans = {
        bond: _minibatches(len(data), config.actor_batch, config.actor_batches)
        for bond, data in datasets.items()
        if len(data) > 0
    }
    rate = OptimizerConfig(OptimizerKind.PLAIN_SGD, config.actor_rate)
    taken = 0
    if actor.variant is ActorVariant.MULTI_NET:
        for bond, plan in plans.items():
            optimizer = make_optimizer(actor.net_for(bond), rate)
            for index in plan:
                _actor_step(actor, optimizer, bond, datasets[bond], index)
                taken += 1
        return taken

    optimizer = make_optimizer(actor.nets[0], rate)
    rounds = max((len(plan) for plan in plans.values()), default=0)
    for m in range(rounds):
        for bond, plan in plans.items():
            if m < len(plan):
                _actor_step(actor, optimizer, bond, datasets[bond], plan[m])
                taken += 1
    return taken
