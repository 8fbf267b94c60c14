"""
Abstract Repository Interfaces

Repository Pattern for training checkpoints.
"""

from abc import ABC, abstractmethod
from typing import List, Optional


class CheckpointRepository(ABC):
    """Storage of training-run snapshots keyed by step."""

    @abstractmethod
    def save(self, step: int, state: dict) -> str:
        """
        Store a snapshot.

        Args:
            step: Training step the snapshot was taken after
            state: Serializable trainer state (config, weights, RNG, curve)

        Returns:
            Identifier of the stored snapshot
        """
        pass

    @abstractmethod
    def load(self, step: int) -> dict:
        """
        Read the snapshot of one step.

        Raises:
            CheckpointError: If no snapshot exists for that step
        """
        pass

    @abstractmethod
    def steps(self) -> List[int]:
        """Steps with a stored snapshot, ascending."""
        pass

    def latest(self) -> Optional[dict]:
        """Most recent snapshot, None when there is none."""
        stored = self.steps()
        return self.load(stored[-1]) if stored else None
