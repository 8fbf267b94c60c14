"""
Tabular: exact grid solvers

Responsibilities:
- Linear Bellman policy evaluation and the θ̃/θ coupling
- Bellman operator Γ₂∘Γ₁, value iteration and greedy policies
- Stationary distribution and exact average reward per RFQ

Dependencies: Intensity, Market
"""

from .models import ValueFlavor, ValueTable, PolicyTable
from .policies import policy_from_deltas, policy_from_probabilities, myopic_policy, no_trade_policy
from .solvers import (
    policy_evaluation,
    to_rfq_value,
    to_any_time_value,
    bellman_operator,
    greedy_policy,
    value_iteration,
    spread_income,
    check_grid_size,
)
from .ergodic import (
    transition_matrix,
    stationary_distribution,
    state_rewards,
    average_reward_per_rfq,
    reward_per_rfq_std,
)

__all__ = [
    "ValueFlavor",
    "ValueTable",
    "PolicyTable",
    "policy_from_deltas",
    "policy_from_probabilities",
    "myopic_policy",
    "no_trade_policy",
    "policy_evaluation",
    "to_rfq_value",
    "to_any_time_value",
    "bellman_operator",
    "greedy_policy",
    "value_iteration",
    "spread_income",
    "check_grid_size",
    "transition_matrix",
    "stationary_distribution",
    "state_rewards",
    "average_reward_per_rfq",
    "reward_per_rfq_std",
]
