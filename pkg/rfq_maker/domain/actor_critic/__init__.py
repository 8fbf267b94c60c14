"""
Actor-Critic: model-based reinforcement learning of quotes

Responsibilities:
- Critic and actor networks over normalized inventories
- TD targets and semi-gradient critic updates
- Exploration advantages and actor updates (multi-net and single-net)
- Pre-training from per-bond reference quotes
- Training loop with the Matryoshka limit schedule and checkpoints
- Named experiment presets

Dependencies: Market, Tabular, Neural, Simulation
"""

from .models import (
    ActorVariant,
    InitialStrategy,
    MatryoshkaSchedule,
    TrainConfig,
    LearningCurve,
    StepReport,
    PretrainSummary,
    moving_median,
)
from .networks import ActorBundle, Critic
from .service import (
    ActorDataset,
    td_target,
    td_targets,
    critic_update,
    raw_advantages,
    normalize_advantages,
    exploration_advantage,
    actor_datasets,
    actor_update,
)
from .pretrain import BondReference, pretrain, reference_policy, single_bond_market
from .trainer import ActorCriticTrainer, TrainingResult, train_single_bond
from .presets import ExperimentPreset, get_preset, preset_names

__all__ = [
    "ActorVariant",
    "InitialStrategy",
    "MatryoshkaSchedule",
    "TrainConfig",
    "LearningCurve",
    "StepReport",
    "PretrainSummary",
    "moving_median",
    "ActorBundle",
    "Critic",
    "ActorDataset",
    "td_target",
    "td_targets",
    "critic_update",
    "raw_advantages",
    "normalize_advantages",
    "exploration_advantage",
    "actor_datasets",
    "actor_update",
    "BondReference",
    "pretrain",
    "reference_policy",
    "single_bond_market",
    "ActorCriticTrainer",
    "TrainingResult",
    "train_single_bond",
    "ExperimentPreset",
    "get_preset",
    "preset_names",
]
