"""
Domain Layer

Numerical models and algorithms, one package per bounded context:
intensity, market, tabular, fd_hjb, neural, simulation, actor_critic.

Contexts depend only on each other and on shared; the actor-critic
trainer receives its checkpoint repository by injection.
"""
