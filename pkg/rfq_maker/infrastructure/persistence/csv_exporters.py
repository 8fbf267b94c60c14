"""
CSV exports (pandas) of value tables, policies, rollouts and learning curves.

Every table has one row per grid point with columns n1..nd first, in the
grid's row-major order.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ...domain.market.grid import InventoryGrid
from ...domain.market.models import MarketSpec
from ...domain.simulation.models import RolloutBatch
from ...domain.tabular.models import PolicyTable, ValueTable

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.10g"


def state_columns(dimension: int) -> list:
    return [f"n{i + 1}" for i in range(dimension)]


def grid_frame(grid: InventoryGrid) -> pd.DataFrame:
    return pd.DataFrame(grid.states, columns=state_columns(grid.dimension))


def value_frame(table: ValueTable, name: str = "value") -> pd.DataFrame:
    """Columns n1..nd, flavor, `name`."""
    frame = grid_frame(table.grid)
    frame["flavor"] = table.flavor.value
    frame[name] = table.values
    return frame


def policy_frame(market: MarketSpec, policy: PolicyTable, prefix: str = "") -> pd.DataFrame:
    """Columns n1..nd, then per bond: <id>_bid_delta, <id>_bid_prob, <id>_ask_delta, <id>_ask_prob."""
    frame = grid_frame(policy.grid)
    for i, bond_id in enumerate(market.bond_ids):
        frame[f"{prefix}{bond_id}_bid_delta"] = policy.bid_delta[:, i]
        frame[f"{prefix}{bond_id}_bid_prob"] = policy.bid_prob[:, i]
        frame[f"{prefix}{bond_id}_ask_delta"] = policy.ask_delta[:, i]
        frame[f"{prefix}{bond_id}_ask_prob"] = policy.ask_prob[:, i]
    return frame


def rollout_frame(market: MarketSpec, batch: RolloutBatch) -> pd.DataFrame:
    """One row per RFQ event."""
    frame = pd.DataFrame(batch.states, columns=state_columns(market.dimension))
    frame["bond"] = [market.bond_ids[i] for i in batch.bonds]
    frame["side"] = np.where(batch.sides == 0, "bid", "ask")
    frame["prob"] = batch.probs
    frame["delta"] = batch.deltas
    frame["prob_eps"] = batch.probs_eps
    frame["delta_eps"] = batch.deltas_eps
    frame["fill"] = batch.fills
    return frame


def value_difference_frame(first: ValueTable, second: ValueTable, align: bool = True) -> pd.DataFrame:
    """
    Columns n1..nd, first, second, difference; with `align` each table is
    shifted by its maximum first.
    """
    a = first.values - (first.values.max() if align else 0.0)
    b = second.values - (second.values.max() if align else 0.0)
    frame = grid_frame(first.grid)
    frame["first"] = a
    frame["second"] = b
    frame["difference"] = a - b
    return frame


def write_csv(frame: pd.DataFrame, path: PathLike, columns: Optional[Sequence[str]] = None) -> Path:
    """Write with a fixed float format, so equal inputs give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, columns=columns, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path
