"""
Actor-critic domain models
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ...shared.exceptions import InvalidParameterError
from ..neural.models import PretrainConfig
from ..simulation.models import NoiseSpec


class ActorVariant(Enum):
    MULTI_NET = "multi_net"  # one logistic net per bond
    SINGLE_NET_ONE_HOT = "single_net"  # one net, inventory + one-hot bond selector


class InitialStrategy(Enum):
    """Per-bond quotes the actor is pre-trained to."""
    MYOPIC = "myopic"
    SINGLE_BOND_OPTIMAL = "single_bond_optimal"
    SINGLE_BOND_TRAINED = "single_bond_trained"


@dataclass(frozen=True)
class MatryoshkaSchedule:
    """
    Risk limits that start at `initial` units and grow by `increment` every
    `period` steps until each bond's maximal limit is reached.
    """
    initial: int = 5
    period: int = 500
    increment: int = 1

    def __post_init__(self):
        if self.initial < 1 or self.period < 1 or self.increment < 1:
            raise InvalidParameterError(
                "Matryoshka initial limit, period and increment must be >= 1",
                {"initial": self.initial, "period": self.period, "increment": self.increment},
            )

    def limits_at(self, step: int, max_units: Sequence[int]) -> Tuple[int, ...]:
        """Active limits at 1-based training step `step`."""
        grown = self.initial + self.increment * (max(step, 0) // self.period)
        return tuple(min(grown, int(m)) for m in max_units)


@dataclass
class TrainConfig:
    """Hyperparameters of one actor-critic run."""
    steps: int = 50
    rollout_len: int = 10_000
    n_additional: int = 100
    additional_len: int = 100
    critic_batch: int = 70  # K
    critic_batches: Optional[int] = None  # N; None is one pass over the records
    actor_batch: int = 50  # L
    actor_batches: Optional[int] = None  # M per bond; None is one pass
    critic_rate: float = 5e-8
    actor_rate: float = 0.01
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    matryoshka: Optional[MatryoshkaSchedule] = None
    variant: ActorVariant = ActorVariant.MULTI_NET
    critic_hidden: Tuple[int, ...] = (10, 10)
    actor_hidden: Tuple[int, ...] = (10, 10)
    initial_strategy: InitialStrategy = InitialStrategy.MYOPIC
    pretrain: PretrainConfig = field(default_factory=PretrainConfig)
    actor_pretrain_threshold: float = 1e-6
    single_bond_steps: Dict[str, int] = field(default_factory=dict)  # per-bond overrides
    seed: int = 0
    checkpoint_every: int = 100

    def __post_init__(self):
        counts = {
            "steps": self.steps,
            "rollout_len": self.rollout_len,
            "additional_len": self.additional_len,
            "critic_batch": self.critic_batch,
            "actor_batch": self.actor_batch,
            "checkpoint_every": self.checkpoint_every,
        }
        for name, value in counts.items():
            if value < 1:
                raise InvalidParameterError(f"{name} must be > 0, got {value}", {name: value})
        if self.n_additional < 0:
            raise InvalidParameterError("n_additional must be >= 0", {"n_additional": self.n_additional})
        for name in ("critic_batches", "actor_batches"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InvalidParameterError(f"{name} must be > 0, got {value}", {name: value})
        if not (self.critic_rate > 0 and self.actor_rate > 0):
            raise InvalidParameterError(
                "learning rates must be > 0", {"critic_rate": self.critic_rate, "actor_rate": self.actor_rate}
            )
        self.critic_hidden = tuple(int(h) for h in self.critic_hidden)
        self.actor_hidden = tuple(int(h) for h in self.actor_hidden)

    def to_dict(self) -> dict:
        """JSON-ready snapshot."""
        return {
            "steps": self.steps,
            "rollout_len": self.rollout_len,
            "n_additional": self.n_additional,
            "additional_len": self.additional_len,
            "critic_batch": self.critic_batch,
            "critic_batches": self.critic_batches,
            "actor_batch": self.actor_batch,
            "actor_batches": self.actor_batches,
            "critic_rate": self.critic_rate,
            "actor_rate": self.actor_rate,
            "noise": {"half_width": self.noise.half_width, "nu": self.noise.nu},
            "matryoshka": None if self.matryoshka is None else {
                "initial": self.matryoshka.initial,
                "period": self.matryoshka.period,
                "increment": self.matryoshka.increment,
            },
            "variant": self.variant.value,
            "critic_hidden": list(self.critic_hidden),
            "actor_hidden": list(self.actor_hidden),
            "initial_strategy": self.initial_strategy.value,
            "pretrain": dict(vars(self.pretrain)),
            "actor_pretrain_threshold": self.actor_pretrain_threshold,
            "single_bond_steps": dict(self.single_bond_steps),
            "seed": self.seed,
            "checkpoint_every": self.checkpoint_every,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        data = dict(data)
        data["noise"] = NoiseSpec(**data["noise"])
        if data.get("matryoshka") is not None:
            data["matryoshka"] = MatryoshkaSchedule(**data["matryoshka"])
        data["variant"] = ActorVariant(data["variant"])
        data["initial_strategy"] = InitialStrategy(data["initial_strategy"])
        data["pretrain"] = PretrainConfig(**data["pretrain"])
        data["critic_hidden"] = tuple(data["critic_hidden"])
        data["actor_hidden"] = tuple(data["actor_hidden"])
        return cls(**data)


@dataclass
class LearningCurve:
    """R_mean of every training step, with the limits active at that step."""
    steps: List[int] = field(default_factory=list)
    r_mean: List[float] = field(default_factory=list)
    limits: List[Tuple[int, ...]] = field(default_factory=list)

    def append(self, step: int, r_mean: float, limits: Sequence[int]) -> None:
        self.steps.append(int(step))
        self.r_mean.append(float(r_mean))
        self.limits.append(tuple(int(x) for x in limits))

    def __len__(self) -> int:
        return len(self.steps)

    def to_frame(self, window: int = 40) -> pd.DataFrame:
        """Columns step, r_mean, active_limits, r_mean_median."""
        frame = pd.DataFrame({
            "step": self.steps,
            "r_mean": self.r_mean,
            "active_limits": [";".join(str(x) for x in lim) for lim in self.limits],
        })
        frame["r_mean_median"] = moving_median(self.r_mean, window)
        return frame

    def to_dict(self) -> dict:
        return {"steps": list(self.steps), "r_mean": list(self.r_mean), "limits": [list(x) for x in self.limits]}

    @classmethod
    def from_dict(cls, data: dict) -> "LearningCurve":
        return cls(list(data["steps"]), list(data["r_mean"]), [tuple(x) for x in data["limits"]])


def moving_median(values: Sequence[float], window: int = 40) -> np.ndarray:
    """Median over the last `window` points (fewer at the start)."""
    if window < 1:
        raise InvalidParameterError("window must be >= 1", {"window": window})
    series = pd.Series(np.asarray(values, dtype=float))
    return series.rolling(window, min_periods=1).median().to_numpy()


@dataclass
class StepReport:
    """Diagnostics of one training step."""
    step: int
    r_mean: float
    limits: Tuple[int, ...]
    records: int
    critic_td_error: float
    actor_batches: int


@dataclass
class PretrainSummary:
    """Outcome of the pre-training phase."""
    actor_mse: List[float]
    critic_mse: float
    baseline_r_mean: float
    reached: bool
