"""
Pre-training of the actor and the critic from per-bond reference quotes.

Each bond is solved on its own (the zero-correlation case); the actor is
fitted to the per-bond bid probabilities and the critic to the sum of the
per-bond values, converted to the per-RFQ flavour and recentred.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ...shared.exceptions import InvalidParameterError
from ...shared.random_streams import RandomStreams
from ..market.models import InventoryState, MarketSpec
from ..market.service import gamma_rl, penalty_values, total_rfq_rate
from ..neural.pretrain import pretrain_supervised
from ..simulation.rollout import estimate_r_mean, rollout
from ..tabular.models import PolicyTable
from ..tabular.policies import myopic_policy
from ..tabular.solvers import greedy_policy, policy_evaluation, value_iteration
from .models import ActorVariant, InitialStrategy, PretrainSummary, TrainConfig
from .networks import ActorBundle, Critic

logger = logging.getLogger(__name__)

# Trains a 1-bond market and returns its learned policy on the full 1-bond grid.
SingleBondTrainer = Callable[[MarketSpec, TrainConfig, int], PolicyTable]


@dataclass
class BondReference:
    """Reference solution of one bond traded alone, on units −max..max."""
    bid_prob: np.ndarray
    values: np.ndarray  # at-any-time value θ̃ of the reference policy


def single_bond_market(market: MarketSpec, bond: int) -> MarketSpec:
    """Bond `bond` alone, over its full range of inventories."""
    spec = market.bonds[bond]
    return market.subset([spec.id]).with_limits([spec.max_units])


def single_bond_config(config: TrainConfig, bond_id: str) -> TrainConfig:
    """Configuration of the 1-bond runs behind the trained initial strategy."""
    return replace(
        TrainConfig(),
        steps=config.single_bond_steps.get(bond_id, TrainConfig().steps),
        noise=config.noise,
        pretrain=config.pretrain,
        seed=config.seed,
    )


def reference_policy(
    market: MarketSpec,
    bond: int,
    strategy: InitialStrategy,
    config: TrainConfig,
    trainer: Optional[SingleBondTrainer] = None,
    seed: int = 0,
) -> PolicyTable:
    """Initial quotes of one bond under `strategy`."""
    alone = single_bond_market(market, bond)
    if strategy is InitialStrategy.MYOPIC:
        return myopic_policy(alone)
    if strategy is InitialStrategy.SINGLE_BOND_OPTIMAL:
        return greedy_policy(alone, value_iteration(alone))
    if trainer is None:
        raise InvalidParameterError("a single-bond trainer is required for trained initial quotes")
    return trainer(alone, single_bond_config(config, market.bonds[bond].id), seed)


def bond_reference(market: MarketSpec, bond: int, policy: PolicyTable) -> BondReference:
    """Bid probabilities with the blocked end filled in, and the policy's value."""
    alone = single_bond_market(market, bond)
    bid = policy.bid_prob[:, 0].copy()
    bid[-1] = bid[-2]
    return BondReference(bid_prob=bid, values=policy_evaluation(alone, policy).values)


def grid_sampler(limits: Sequence[int]) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Uniform integer inventories with |n_i| <= limits_i."""
    high = np.asarray(limits)

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(-high, high + 1, size=(n, high.size))

    return sample


def _units_of(inputs: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return np.rint(inputs[:, : scale.size] * scale).astype(np.int64)


def pretrain_actor(
    actor: ActorBundle,
    market: MarketSpec,
    references: List[BondReference],
    config: TrainConfig,
    rng: np.random.Generator,
) -> List[float]:
    """Fit the actor's bid probabilities to the references; one MSE per net."""
    sample_units = grid_sampler(market.max_units)
    scale = np.asarray(market.max_units)
    fit = replace(config.pretrain, threshold=config.actor_pretrain_threshold)

    if actor.variant is ActorVariant.MULTI_NET:
        mses = []
        for i, net in enumerate(actor.nets):
            def target(x, i=i):
                return references[i].bid_prob[_units_of(x, scale)[:, i] + scale[i]]

            def sampler(gen, n, i=i):
                return actor.encode(sample_units(gen, n), i)

            mses.append(pretrain_supervised(net, target, sampler, fit, rng).mse)
        return mses

    d = market.dimension

    def target(x):
        units = _units_of(x, scale)
        bond = np.argmax(x[:, d:], axis=1)
        return np.array([references[b].bid_prob[units[k, b] + scale[b]] for k, b in enumerate(bond)])

    def sampler(gen, n):
        units = sample_units(gen, n)
        bond = gen.integers(0, d, size=n)
        selector = np.zeros((n, d))
        selector[np.arange(n), bond] = 1.0
        return np.hstack([units / scale, selector])

    return [pretrain_supervised(actor.nets[0], target, sampler, fit, rng).mse]


def critic_target(market: MarketSpec, references: List[BondReference], offset: float) -> Callable[[np.ndarray], np.ndarray]:
    """
    θ(q) = (Σᵢ θ̃ᵢ(qᵢ) + ψ(q)/(r+Λ))/γ_RL − offset, on normalized inputs.
    """
    scale = np.asarray(market.max_units)
    gamma = gamma_rl(market)
    denom = market.discount + total_rfq_rate(market)

    def target(x: np.ndarray) -> np.ndarray:
        units = _units_of(x, scale)
        tilde = sum(ref.values[units[:, i] + scale[i]] for i, ref in enumerate(references))
        return (tilde + penalty_values(market, units) / denom) / gamma - offset

    return target


def pretrain(
    market: MarketSpec,
    config: TrainConfig,
    streams: RandomStreams,
    trainer: Optional[SingleBondTrainer] = None,
) -> Tuple[Critic, ActorBundle, PretrainSummary]:
    """
    Build and pre-train the critic and the actor.

    The critic offset is R₀/(1 − γ_RL), with R₀ the R_mean of one
    unperturbed rollout of the pre-trained actor, which centres the critic
    the way the R_mean-shifted TD targets do.

    Args:
        market: Market with its active limits
        config: Training configuration
        streams: Random streams ("init", "pretrain", "rollout")
        trainer: Runs 1-bond trainings for InitialStrategy.SINGLE_BOND_TRAINED
    """
    rng = streams.get("pretrain")
    references = []
    for i, bond in enumerate(market.bonds):
        policy = reference_policy(market, i, config.initial_strategy, config, trainer, streams.spawn_seed("single_bond"))
        references.append(bond_reference(market, i, policy))
        logger.info(f"Reference quotes for {bond.id} ready ({config.initial_strategy.value})")

    generator = streams.torch_generator("init")
    actor = ActorBundle(market, config.variant, config.actor_hidden, generator)
    critic = Critic(market, config.critic_hidden, generator)

    actor_mse = pretrain_actor(actor, market, references, config, rng)

    baseline = rollout(
        market, actor, InventoryState.flat(market.dimension), config.rollout_len, None, streams.spawn_seed("rollout")
    )
    r0 = estimate_r_mean(baseline, market)
    offset = r0 / (1.0 - gamma_rl(market))
    report = pretrain_supervised(critic.net, critic_target(market, references, offset), critic_sampler(market), config.pretrain, rng)
    logger.info(f"Pre-training done: baseline R_mean {r0:.4f}, critic MSE {report.mse:.3e}")

    reached = report.reached and all(m < config.actor_pretrain_threshold for m in actor_mse)
    return critic, actor, PretrainSummary(actor_mse=actor_mse, critic_mse=report.mse, baseline_r_mean=r0, reached=reached)


def critic_sampler(market: MarketSpec) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Normalized critic inputs drawn from the active grid only."""
    sample_units = grid_sampler(market.limits)
    scale = np.asarray(market.max_units, dtype=float)
    return lambda gen, n: sample_units(gen, n) / scale
