"""
Named random sub-streams derived from one master seed.

Each component draws from its own stream so that changing how many numbers
one component consumes never perturbs another component's draws.
"""

import zlib
from typing import Dict

import numpy as np
import torch


class RandomStreams:
    """Registry of numpy generators keyed by stream name."""

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)
        self._streams: Dict[str, np.random.Generator] = {}

    def get(self, name: str) -> np.random.Generator:
        """Return the generator for `name`, creating it on first use."""
        if name not in self._streams:
            seq = np.random.SeedSequence([self.master_seed, zlib.crc32(name.encode("utf-8"))])
            self._streams[name] = np.random.Generator(np.random.PCG64(seq))
        return self._streams[name]

    def torch_generator(self, name: str = "init") -> torch.Generator:
        """Torch generator seeded from the named numpy stream."""
        seed = int(self.get(name).integers(0, 2**62))
        gen = torch.Generator()
        gen.manual_seed(seed)
        return gen

    def spawn_seed(self, name: str) -> int:
        """Draw an integer seed from the named stream (for per-rollout seeding)."""
        return int(self.get(name).integers(0, 2**62))

    def state_dict(self) -> Dict:
        """Serializable state of every stream created so far."""
        return {
            "master_seed": self.master_seed,
            "streams": {k: g.bit_generator.state for k, g in self._streams.items()},
        }

    def load_state_dict(self, state: Dict) -> None:
        """Restore streams saved with `state_dict`."""
        self.master_seed = int(state["master_seed"])
        self._streams = {}
        for name, bg_state in state["streams"].items():
            gen = self.get(name)
            gen.bit_generator.state = bg_state
