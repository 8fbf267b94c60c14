"""
Controllers

Thin layer between the command line and the domain services.
"""

from .experiment_spec import ExperimentSpec, Mode, PolicySource, ExactSolver, PLOT_KINDS
from .experiment_controller import ExperimentController

__all__ = [
    "ExperimentSpec",
    "Mode",
    "PolicySource",
    "ExactSolver",
    "PLOT_KINDS",
    "ExperimentController",
]
