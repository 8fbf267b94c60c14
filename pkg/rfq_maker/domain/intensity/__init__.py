"""
Intensity: fill-probability curves and Hamiltonians

Responsibilities:
- SU Johnson fill curves, inverses and derivatives
- Condition check f·f″/(f′)² < 2
- Myopic quotes
- Hamiltonian functions, their maximizers and optional memoized tables

Dependencies: none (pure numerical functions)
"""

from .models import SuJohnsonCurve, ConditionCheck
from .curves import (
    f_eval,
    f_inverse,
    f_derivative,
    f_second_derivative,
    check_condition,
    myopic_quote,
)
from .hamiltonian import (
    hamiltonian,
    hamiltonian_argmax,
    hamiltonian_derivative,
    hamiltonian_with_derivative,
    HamiltonianTable,
    hamiltonian_table,
)

__all__ = [
    "SuJohnsonCurve",
    "ConditionCheck",
    "f_eval",
    "f_inverse",
    "f_derivative",
    "f_second_derivative",
    "check_condition",
    "myopic_quote",
    "hamiltonian",
    "hamiltonian_argmax",
    "hamiltonian_derivative",
    "hamiltonian_with_derivative",
    "HamiltonianTable",
    "hamiltonian_table",
]
