"""
RFQ Maker - optimal quoting for a multi-bond RFQ market maker

Exact grid solvers (policy evaluation, value iteration, finite differences)
for low dimension and a model-based actor-critic that scales to dozens of
bonds. Organized following the domain / infrastructure / presentation split.
"""

__version__ = "1.0.0"
