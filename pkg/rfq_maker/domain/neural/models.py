"""
Neural domain models
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from ...shared.exceptions import InvalidParameterError


class OutputHead(Enum):
    AFFINE = "affine"  # critic
    LOGISTIC = "logistic"  # actor


class OptimizerKind(Enum):
    PLAIN_SGD = "sgd"
    ADAM = "adam"


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture input → hidden... → 1 with rectifier hidden layers."""
    input_dim: int
    hidden: Tuple[int, ...] = (10, 10)
    head: OutputHead = OutputHead.AFFINE

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.input_dim < 1 or any(h < 1 for h in self.hidden):
            raise InvalidParameterError("layer sizes must be positive", {"input_dim": self.input_dim})

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (self.input_dim, *self.hidden, 1)

    def to_dict(self) -> dict:
        return {"input_dim": self.input_dim, "hidden": list(self.hidden), "head": self.head.value}

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkSpec":
        return cls(int(data["input_dim"]), tuple(data["hidden"]), OutputHead(data["head"]))


@dataclass
class OptimizerConfig:
    """First-order update rule; Adam defaults β₁=0.9, β₂=0.999, eps=1e-8."""
    kind: OptimizerKind = OptimizerKind.PLAIN_SGD
    rate: float = 1e-3
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameterError(f"learning rate must be > 0, got {self.rate}", {"rate": self.rate})
        if not all(0 < b < 1 for b in self.betas):
            raise InvalidParameterError("Adam betas must lie in (0, 1)", {"betas": list(self.betas)})


@dataclass
class PretrainConfig:
    """Supervised pre-training with Adam on a mean squared error."""
    batches: int = 10_000  # mini-batches
    batch_size: int = 64
    rate: float = 1e-3
    holdout_size: int = 1000
    check_every: int = 250
    threshold: Optional[float] = None  # absolute MSE target; default is relative
    threshold_ratio: float = 1e-4  # relative to the held-out target variance
    threshold_floor: float = 1e-8  # for (near) constant targets


@dataclass
class PretrainReport:
    """Outcome of a supervised fit."""
    mse: float
    threshold: float
    batches: int
    reached: bool
    history: list = field(default_factory=list)
