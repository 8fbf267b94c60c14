"""
Infrastructure Layer

Adapters to files:
- Market configuration (JSON/TOML) and the bundled 20-bond data set
- CSV exports of tables, rollouts and learning curves
- Checkpoints of networks and training runs

No numerical logic - only serialization.
"""
