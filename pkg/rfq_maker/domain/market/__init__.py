"""
Market: model primitives

Responsibilities:
- Bond, penalty and market specifications
- Inventory states and the inventory grid
- Penalty ψ, γ_RL and the RFQ event distribution

Dependencies: Intensity (fill curves)
"""

from .models import BondSpec, PenaltyKind, PenaltySpec, MarketSpec, InventoryState, Side
from .grid import InventoryGrid
from .service import (
    penalty_eval,
    penalty_values,
    total_rfq_rate,
    gamma_rl,
    rfq_event_distribution,
    side_is_admissible,
    expected_step_reward,
)

__all__ = [
    "BondSpec",
    "PenaltyKind",
    "PenaltySpec",
    "MarketSpec",
    "InventoryState",
    "Side",
    "InventoryGrid",
    "penalty_eval",
    "penalty_values",
    "total_rfq_rate",
    "gamma_rl",
    "rfq_event_distribution",
    "side_is_admissible",
    "expected_step_reward",
]
