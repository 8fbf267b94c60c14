"""
Persistence Layer

Market configuration files, CSV exports and training checkpoints.
"""

from .repositories import CheckpointRepository
from .in_memory_repositories import InMemoryCheckpointRepository
from .torch_checkpoints import TorchCheckpointRepository, save_network, load_network
from .market_config import (
    BUNDLED_MARKET,
    load_market,
    save_market,
    market_from_dict,
    market_to_dict,
)
from .csv_exporters import (
    state_columns,
    grid_frame,
    value_frame,
    policy_frame,
    rollout_frame,
    value_difference_frame,
    write_csv,
)

__all__ = [
    # Abstract interfaces
    "CheckpointRepository",
    # Implementations
    "InMemoryCheckpointRepository",
    "TorchCheckpointRepository",
    "save_network",
    "load_network",
    # Market configuration
    "BUNDLED_MARKET",
    "load_market",
    "save_market",
    "market_from_dict",
    "market_to_dict",
    # CSV
    "state_columns",
    "grid_frame",
    "value_frame",
    "policy_frame",
    "rollout_frame",
    "value_difference_frame",
    "write_csv",
]
