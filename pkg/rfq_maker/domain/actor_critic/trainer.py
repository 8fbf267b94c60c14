"""
Actor-critic training loop.

Per step: grow the risk limits on schedule, roll out the perturbed policy
(one long rollout from the flat inventory plus short ones from random
inventories), estimate R_mean, update the critic by TD learning, then the
actor along the exploration advantages.
"""

import logging
import time
from dataclasses import asdict, dataclass, replace
from typing import Optional, Tuple

from ...infrastructure.persistence.repositories import CheckpointRepository
from ...shared.exceptions import CheckpointError
from ...shared.random_streams import RandomStreams
from ..market.models import InventoryState, MarketSpec
from ..simulation.models import RolloutBatch
from ..simulation.rollout import estimate_r_mean, random_start, rollout, shuffle
from ..tabular.models import PolicyTable
from .models import LearningCurve, PretrainSummary, StepReport, TrainConfig
from .networks import ActorBundle, Critic
from .pretrain import SingleBondTrainer, pretrain
from .service import actor_datasets, actor_update, critic_update

logger = logging.getLogger(__name__)


@dataclass
class TrainingResult:
    """Trained networks and the learning curve."""
    critic: Critic
    actor: ActorBundle
    curve: LearningCurve
    pretrain: Optional[PretrainSummary]
    elapsed_time: float


def train_single_bond(market: MarketSpec, config: TrainConfig, seed: int) -> PolicyTable:
    """Train on a 1-bond market and tabulate the learned quotes on its grid."""
    result = ActorCriticTrainer(market, replace(config, seed=seed)).train()
    return result.actor.policy_table(market)


class ActorCriticTrainer:
    """
    Orchestrates pre-training and the training steps of one run.

    Checkpoints go to an injected repository every `checkpoint_every` steps
    and carry the random-stream state, so a resumed run replays exactly.
    """

    def __init__(
        self,
        market: MarketSpec,
        config: TrainConfig,
        streams: Optional[RandomStreams] = None,
        checkpoints: Optional[CheckpointRepository] = None,
        single_bond_trainer: Optional[SingleBondTrainer] = None,
    ):
        """
        Args:
            market: Market; each bond's max_units bounds the schedule
            config: Training configuration
            streams: Random streams (default: seeded from config.seed)
            checkpoints: Repository for periodic snapshots (optional)
            single_bond_trainer: 1-bond trainer for trained initial quotes
        """
        self.market = market
        self.config = config
        self.streams = streams if streams is not None else RandomStreams(config.seed)
        self.checkpoints = checkpoints
        self.single_bond_trainer = single_bond_trainer or train_single_bond
        self.critic: Optional[Critic] = None
        self.actor: Optional[ActorBundle] = None
        self.curve = LearningCurve()
        self.summary: Optional[PretrainSummary] = None
        self.step_index = 0

    def limits_at(self, step: int) -> Tuple[int, ...]:
        """Active limits at 1-based step `step`; nondecreasing and capped by max_units."""
        if self.config.matryoshka is None:
            return self.market.limits
        return self.config.matryoshka.limits_at(step, self.market.max_units)

    def active_market(self, step: int) -> MarketSpec:
        return self.market.with_limits(self.limits_at(step))

    def pretrain(self) -> PretrainSummary:
        self.critic, self.actor, self.summary = pretrain(
            self.active_market(1), self.config, self.streams, self.single_bond_trainer
        )
        if not self.summary.reached:
            logger.warning("Pre-training did not reach its thresholds; training continues")
        return self.summary

    def _rollouts(self, market: MarketSpec) -> Tuple[RolloutBatch, RolloutBatch]:
        cfg = self.config
        cache = {}
        long = rollout(
            market, self.actor, InventoryState.flat(market.dimension), cfg.rollout_len, cfg.noise,
            self.streams.spawn_seed("rollout"), cache,
        )
        batches = [long]
        for _ in range(cfg.n_additional):
            start = random_start(market, self.streams.get("start"))
            batches.append(
                rollout(market, self.actor, start, cfg.additional_len, cfg.noise, self.streams.spawn_seed("rollout"), cache)
            )
        return long, RolloutBatch.concatenate(batches)

    def step(self) -> StepReport:
        """Run one training step."""
        if self.critic is None or self.actor is None:
            self.pretrain()
        j = self.step_index + 1
        limits = self.limits_at(j)
        if self.curve.limits and limits != self.curve.limits[-1]:
            logger.info(f"Step {j}: risk limits increased to {list(limits)}")
        market = self.market.with_limits(limits)

        long, records = self._rollouts(market)
        r_mean = estimate_r_mean(long, market)
        records = shuffle(records, self.streams.get("shuffle"))
        td_error = critic_update(market, self.critic, records, r_mean, self.config)
        taken = actor_update(self.actor, actor_datasets(market, self.critic, records), self.config)

        self.curve.append(j, r_mean, limits)
        self.step_index = j
        logger.info(f"Step {j}/{self.config.steps}: R_mean {r_mean:.4f}, TD error {td_error:.3e}")
        if self.checkpoints is not None and j % self.config.checkpoint_every == 0:
            self.save_checkpoint()
        return StepReport(j, r_mean, limits, len(records), td_error, taken)

    def train(self) -> TrainingResult:
        """Pre-train if needed, then run the remaining steps."""
        started = time.perf_counter()
        if self.critic is None or self.actor is None:
            self.pretrain()
        while self.step_index < self.config.steps:
            self.step()
        elapsed = time.perf_counter() - started
        logger.info(f"Training finished after {self.step_index} steps in {elapsed:.1f}s")
        return TrainingResult(self.critic, self.actor, self.curve, self.summary, elapsed)

    def state_dict(self) -> dict:
        return {
            "bond_ids": list(self.market.bond_ids),
            "max_units": list(self.market.max_units),
            "config": self.config.to_dict(),
            "step": self.step_index,
            "critic": self.critic.state_dict(),
            "actor": self.actor.state_dict(),
            "streams": self.streams.state_dict(),
            "curve": self.curve.to_dict(),
            "pretrain": asdict(self.summary) if self.summary is not None else None,
        }

    def save_checkpoint(self) -> str:
        """
        Raises:
            CheckpointError: If no repository is attached or nothing is trained yet
        """
        if self.checkpoints is None:
            raise CheckpointError("no checkpoint repository attached")
        if self.critic is None or self.actor is None:
            raise CheckpointError("nothing to checkpoint before pre-training")
        ref = self.checkpoints.save(self.step_index, self.state_dict())
        logger.info(f"Checkpoint {ref} saved at step {self.step_index}")
        return ref

    @classmethod
    def resume(
        cls,
        market: MarketSpec,
        checkpoints: CheckpointRepository,
        step: Optional[int] = None,
        single_bond_trainer: Optional[SingleBondTrainer] = None,
    ) -> "ActorCriticTrainer":
        """
        Rebuild a trainer from its latest (or a given) checkpoint.

        Raises:
            CheckpointError: If there is no checkpoint or it belongs to another market
        """
        state = checkpoints.latest() if step is None else checkpoints.load(step)
        if state is None:
            raise CheckpointError("no checkpoint to resume from")
        if state["bond_ids"] != list(market.bond_ids) or state["max_units"] != list(market.max_units):
            raise CheckpointError(
                "checkpoint was written for another market",
                {"bond_ids": state["bond_ids"], "max_units": state["max_units"]},
            )
        config = TrainConfig.from_dict(state["config"])
        trainer = cls(market, config, RandomStreams(config.seed), checkpoints, single_bond_trainer)
        trainer.critic = Critic(market, config.critic_hidden)
        trainer.critic.load_state_dict(state["critic"])
        trainer.actor = ActorBundle(market, config.variant, config.actor_hidden)
        trainer.actor.load_state_dict(state["actor"])
        trainer.streams.load_state_dict(state["streams"])
        trainer.curve = LearningCurve.from_dict(state["curve"])
        trainer.summary = PretrainSummary(**state["pretrain"]) if state["pretrain"] else None
        trainer.step_index = int(state["step"])
        logger.info(f"Resumed training at step {trainer.step_index}")
        return trainer
