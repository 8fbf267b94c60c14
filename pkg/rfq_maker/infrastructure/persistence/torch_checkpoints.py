"""
Torch-backed checkpoint storage.

A run directory holds:
- config.json          configuration snapshot of the latest checkpoint
- step_XXXXXX.pt       trainer state (weights, RNG streams, learning curve)
- learning_curve.csv   columns step, r_mean, active_limits, r_mean_median
"""

import json
import logging
import re
from pathlib import Path
from typing import List, Union

import torch

from ...domain.actor_critic.models import LearningCurve
from ...domain.neural.models import NetworkSpec
from ...domain.neural.network import FeedForwardNet
from ...shared.exceptions import CheckpointError
from .csv_exporters import write_csv
from .repositories import CheckpointRepository

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

NETWORK_FORMAT = "rfq_maker.network/1"
_STEP_FILE = re.compile(r"^step_(\d+)\.pt$")


class TorchCheckpointRepository(CheckpointRepository):
    """Checkpoints written with torch.save into one run directory."""

    def __init__(self, directory: PathLike):
        self.directory = Path(directory)

    def _path(self, step: int) -> Path:
        return self.directory / f"step_{int(step):06d}.pt"

    def save(self, step: int, state: dict) -> str:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self._path(step)
            torch.save(state, path)
            with open(self.directory / "config.json", "w", encoding="utf-8") as f:
                json.dump(state["config"], f, indent=2, sort_keys=True)
            write_csv(LearningCurve.from_dict(state["curve"]).to_frame(), self.directory / "learning_curve.csv")
        except OSError as e:
            raise CheckpointError(f"cannot write checkpoint: {e}", {"directory": str(self.directory)})
        return path.name

    def load(self, step: int) -> dict:
        path = self._path(step)
        if not path.exists():
            raise CheckpointError(f"no checkpoint for step {step}", {"path": str(path)})
        try:
            return torch.load(path, weights_only=True)
        except Exception as e:
            raise CheckpointError(f"cannot read checkpoint {path.name}: {e}", {"path": str(path)})

    def steps(self) -> List[int]:
        if not self.directory.is_dir():
            return []
        found = (_STEP_FILE.match(p.name) for p in self.directory.iterdir())
        return sorted(int(m.group(1)) for m in found if m)


def save_network(net: FeedForwardNet, path: PathLike) -> Path:
    """Write the architecture header and the parameters."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save({"format": NETWORK_FORMAT, "spec": net.spec.to_dict(), "state": net.state_dict()}, path)
    except OSError as e:
        raise CheckpointError(f"cannot write network: {e}", {"path": str(path)})
    return path


def load_network(path: PathLike) -> FeedForwardNet:
    """
    Rebuild a network saved with `save_network`, bit for bit.

    Raises:
        CheckpointError: If the file is missing, unreadable or not a network file
    """
    path = Path(path)
    try:
        payload = torch.load(path, weights_only=True)
    except FileNotFoundError:
        raise CheckpointError(f"network file not found: {path}", {"path": str(path)})
    except Exception as e:
        raise CheckpointError(f"cannot read network file {path}: {e}", {"path": str(path)})
    if not isinstance(payload, dict) or payload.get("format") != NETWORK_FORMAT:
        raise CheckpointError(f"{path} is not a network file", {"path": str(path)})
    net = FeedForwardNet(NetworkSpec.from_dict(payload["spec"]))
    net.load_state_dict(payload["state"])
    return net
