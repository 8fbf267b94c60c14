"""
Named experiment parameterisations.

Each preset fixes the penalty, the bond selection, the maximal risk limits
and a TrainConfig. Bond selection is either explicit ids, the `most_volatile`
bonds of the loaded market, or left to the caller (--bonds).
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from ...shared.exceptions import ConfigurationError
from ..market.models import MarketSpec, PenaltyKind
from .models import ActorVariant, InitialStrategy, MatryoshkaSchedule, TrainConfig

STDDEV_GAMMA = 5e-2
VARIANCE_GAMMA = 2e-5


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    penalty: PenaltyKind
    gamma: float
    train: TrainConfig
    bond_ids: Optional[Tuple[str, ...]] = None
    most_volatile: Optional[int] = None
    max_units: Optional[int] = None  # None keeps the market's limits
    max_units_caps: Dict[str, int] = field(default_factory=dict)
    description: str = ""

    def select_bonds(self, market: MarketSpec) -> Tuple[str, ...]:
        """Bond ids this preset runs on, in market order for volatility picks."""
        if self.bond_ids is not None:
            return self.bond_ids
        if self.most_volatile is not None:
            order = np.argsort(-market.volatilities, kind="stable")[: self.most_volatile]
            return tuple(market.bond_ids[k] for k in sorted(order))
        return market.bond_ids

    def apply(self, market: MarketSpec, bond_ids: Optional[Tuple[str, ...]] = None) -> MarketSpec:
        """
        Restrict `market` to the preset's bonds (or `bond_ids`), set the
        penalty and the maximal limits.
        """
        chosen = tuple(bond_ids) if bond_ids else self.select_bonds(market)
        sub = market.subset(chosen).with_penalty(self.penalty, self.gamma)
        if self.max_units is None and not self.max_units_caps:
            return sub
        units = [
            self.max_units_caps.get(b.id, self.max_units if self.max_units is not None else b.max_units)
            for b in sub.bonds
        ]
        return sub.with_max_units(units)

    def train_config(self, seed: Optional[int] = None) -> TrainConfig:
        return replace(self.train) if seed is None else replace(self.train, seed=int(seed))


_BOND5_CAP = {"BOND.5": 5}

_PRESETS = {}


def _register(preset: ExperimentPreset) -> None:
    _PRESETS[preset.name] = preset


_register(ExperimentPreset(
    name="single-stddev",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    bond_ids=("BOND.1",),
    train=TrainConfig(steps=50),
    description="one bond, StdDev penalty, myopic start, limit 5",
))
_register(ExperimentPreset(
    name="single-variance",
    penalty=PenaltyKind.VARIANCE,
    gamma=VARIANCE_GAMMA,
    bond_ids=("BOND.1",),
    train=TrainConfig(steps=50, matryoshka=MatryoshkaSchedule(initial=3, period=15)),
    description="one bond, Variance penalty, limits 3 to 5",
))
_register(ExperimentPreset(
    name="pair-stddev",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    bond_ids=("BOND.1", "BOND.6"),
    train=TrainConfig(
        steps=500, critic_hidden=(12, 12), actor_hidden=(12, 12),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="BOND.1 + BOND.6 (98% correlation), StdDev penalty",
))
_register(ExperimentPreset(
    name="pair-stddev-reduced",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    bond_ids=("BOND.1", "BOND.6"),
    train=TrainConfig(
        steps=200, rollout_len=2000, critic_hidden=(12, 12), actor_hidden=(12, 12),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="pair-stddev with short rollouts and 200 steps",
))
_register(ExperimentPreset(
    name="pair-uncorrelated",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    bond_ids=("BOND.18", "BOND.20"),
    train=TrainConfig(
        steps=500, critic_hidden=(12, 12), actor_hidden=(12, 12),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="BOND.18 + BOND.20 (7% correlation), nothing to learn",
))
_register(ExperimentPreset(
    name="pair-variance",
    penalty=PenaltyKind.VARIANCE,
    gamma=VARIANCE_GAMMA,
    bond_ids=("BOND.1", "BOND.6"),
    train=TrainConfig(
        steps=500, critic_rate=1e-8, critic_hidden=(12, 12), actor_hidden=(12, 12),
        matryoshka=MatryoshkaSchedule(initial=3, period=50),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="BOND.1 + BOND.6, Variance penalty, limits 3 to 5",
))
_register(ExperimentPreset(
    name="pair-stddev-singlenet",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    bond_ids=("BOND.1", "BOND.6"),
    train=TrainConfig(
        steps=500, critic_hidden=(12, 12), actor_hidden=(12, 12),
        variant=ActorVariant.SINGLE_NET_ONE_HOT,
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="pair-stddev with a single actor network",
))
_register(ExperimentPreset(
    name="eight-stddev",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    most_volatile=8,
    max_units=10,
    max_units_caps=_BOND5_CAP,
    train=TrainConfig(
        steps=3000, critic_batch=50, critic_hidden=(18, 18), actor_hidden=(18, 18),
        matryoshka=MatryoshkaSchedule(initial=5, period=500),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="8 most volatile bonds, StdDev penalty, limits 5 to 10",
))
_register(ExperimentPreset(
    name="eight-variance",
    penalty=PenaltyKind.VARIANCE,
    gamma=VARIANCE_GAMMA,
    most_volatile=8,
    train=TrainConfig(
        steps=3000, critic_rate=1e-8, actor_rate=1e-3, critic_hidden=(18, 18), actor_hidden=(18, 18),
        matryoshka=MatryoshkaSchedule(initial=3, period=500),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="8 most volatile bonds, Variance penalty, limits 3 to 5",
))
_register(ExperimentPreset(
    name="eight-stddev-singlenet",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    most_volatile=8,
    max_units=10,
    max_units_caps=_BOND5_CAP,
    train=TrainConfig(
        steps=3000, critic_rate=5e-9, actor_rate=1e-3, critic_batch=100, actor_batch=100,
        critic_hidden=(28, 28), actor_hidden=(28, 28), variant=ActorVariant.SINGLE_NET_ONE_HOT,
        matryoshka=MatryoshkaSchedule(initial=5, period=500),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="eight-stddev with a single actor network",
))
_register(ExperimentPreset(
    name="twenty-stddev",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    max_units=10,
    max_units_caps=_BOND5_CAP,
    train=TrainConfig(
        steps=5000, critic_hidden=(30, 30), actor_hidden=(30, 30),
        matryoshka=MatryoshkaSchedule(initial=5, period=500),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="all 20 bonds, StdDev penalty, limits 5 to 10",
))
_register(ExperimentPreset(
    name="twenty-variance",
    penalty=PenaltyKind.VARIANCE,
    gamma=VARIANCE_GAMMA,
    max_units=10,
    max_units_caps=_BOND5_CAP,
    train=TrainConfig(
        steps=4000, critic_rate=1e-8, critic_hidden=(30, 30), actor_hidden=(30, 30),
        matryoshka=MatryoshkaSchedule(initial=3, period=500),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="all 20 bonds, Variance penalty, limits 3 to 10",
))
_register(ExperimentPreset(
    name="twenty-stddev-singlenet",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    max_units=10,
    max_units_caps=_BOND5_CAP,
    train=TrainConfig(
        steps=20000, rollout_len=5000, additional_len=50, critic_batch=50, actor_rate=5e-4,
        critic_hidden=(30, 30), actor_hidden=(300, 300), variant=ActorVariant.SINGLE_NET_ONE_HOT,
        matryoshka=MatryoshkaSchedule(initial=5, period=200),
        initial_strategy=InitialStrategy.SINGLE_BOND_OPTIMAL,
    ),
    description="all 20 bonds with a single actor network",
))
_register(ExperimentPreset(
    name="smoke",
    penalty=PenaltyKind.STDDEV,
    gamma=STDDEV_GAMMA,
    bond_ids=("BOND.1",),
    train=TrainConfig(
        steps=3, rollout_len=200, n_additional=5, additional_len=20,
        pretrain=replace(TrainConfig().pretrain, batches=200, check_every=50, holdout_size=200),
    ),
    description="tiny run for wiring checks",
))


def preset_names() -> Tuple[str, ...]:
    return tuple(_PRESETS)


def get_preset(name: str) -> ExperimentPreset:
    """
    Raises:
        ConfigurationError: If the preset is unknown
    """
    if name not in _PRESETS:
        raise ConfigurationError(f"unknown preset '{name}'", {"preset": name, "known": list(_PRESETS)})
    return _PRESETS[name]
