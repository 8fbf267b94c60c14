"""
In-Memory Repository Implementations

For fast testing without touching the filesystem.
"""

import copy
from typing import Dict, List

from ...shared.exceptions import CheckpointError
from .repositories import CheckpointRepository


class InMemoryCheckpointRepository(CheckpointRepository):
    """Deep-copied snapshots held in a dict."""

    def __init__(self):
        self._storage: Dict[int, dict] = {}

    def save(self, step: int, state: dict) -> str:
        self._storage[int(step)] = copy.deepcopy(state)
        return f"step_{int(step)}"

    def load(self, step: int) -> dict:
        if step not in self._storage:
            raise CheckpointError(f"no checkpoint for step {step}", {"step": step})
        return copy.deepcopy(self._storage[step])

    def steps(self) -> List[int]:
        return sorted(self._storage)
