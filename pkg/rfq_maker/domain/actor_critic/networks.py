"""
Critic and actor networks over normalized inventories.

Inputs are units divided by each bond's maximal risk limit, so weights stay
meaningful when the active limits grow.
"""

from typing import List, Optional, Tuple

import numpy as np
import torch

from ...shared.exceptions import InvalidParameterError
from ..market.grid import InventoryGrid
from ..market.models import MarketSpec
from ..neural.models import NetworkSpec, OutputHead
from ..neural.network import DTYPE, FeedForwardNet
from ..tabular.models import PolicyTable
from ..tabular.policies import policy_from_probabilities
from .models import ActorVariant

PROB_CEILING = 1.0 - 1e-15


class Critic:
    """Per-RFQ value θ(q) with an affine output."""

    def __init__(self, market: MarketSpec, hidden: Tuple[int, ...] = (10, 10), generator: Optional[torch.Generator] = None):
        self.scale = np.asarray(market.max_units, dtype=float)
        self.net = FeedForwardNet(NetworkSpec(market.dimension, hidden, OutputHead.AFFINE), generator)

    def encode(self, units: np.ndarray) -> np.ndarray:
        return np.asarray(units, dtype=float) / self.scale

    def predict(self, units: np.ndarray) -> torch.Tensor:
        """Differentiable values on an (n, d) array of units."""
        return self.net(torch.as_tensor(self.encode(units), dtype=DTYPE))

    def values(self, units: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            return self.predict(np.atleast_2d(units)).numpy()

    def state_dict(self) -> dict:
        return {"spec": self.net.spec.to_dict(), "weights": self.net.state_dict()}

    def load_state_dict(self, state: dict) -> None:
        if NetworkSpec.from_dict(state["spec"]) != self.net.spec:
            raise InvalidParameterError("critic architecture mismatch", {"saved": state["spec"]})
        self.net.load_state_dict(state["weights"])


class ActorBundle:
    """
    Bid fill probabilities of every bond.

    MultiNet reads bond i from net i; SingleNetOneHot reads every bond from
    one net fed with the inventory and a one-hot bond selector. Asks come
    from the bid side at the mirrored inventory: p^{i,a}(q) = p^{i,b}(−q).
    """

    def __init__(
        self,
        market: MarketSpec,
        variant: ActorVariant = ActorVariant.MULTI_NET,
        hidden: Tuple[int, ...] = (10, 10),
        generator: Optional[torch.Generator] = None,
    ):
        self.variant = variant
        self.dimension = market.dimension
        self.scale = np.asarray(market.max_units, dtype=float)
        if variant is ActorVariant.MULTI_NET:
            spec = NetworkSpec(self.dimension, hidden, OutputHead.LOGISTIC)
            self.nets: List[FeedForwardNet] = [FeedForwardNet(spec, generator) for _ in range(self.dimension)]
        else:
            spec = NetworkSpec(2 * self.dimension, hidden, OutputHead.LOGISTIC)
            self.nets = [FeedForwardNet(spec, generator)]

    def net_for(self, bond: int) -> FeedForwardNet:
        if not 0 <= bond < self.dimension:
            raise InvalidParameterError(f"bond index {bond} out of range", {"bond": bond})
        return self.nets[bond] if self.variant is ActorVariant.MULTI_NET else self.nets[0]

    def encode(self, units: np.ndarray, bond: int) -> np.ndarray:
        """Network inputs for bond `bond` at an (n, d) array of units."""
        x = np.atleast_2d(np.asarray(units, dtype=float)) / self.scale
        if self.variant is ActorVariant.MULTI_NET:
            return x
        selector = np.zeros((x.shape[0], self.dimension))
        selector[:, bond] = 1.0
        return np.hstack([x, selector])

    def predict(self, units: np.ndarray, bond: int) -> torch.Tensor:
        """Differentiable bid probabilities of `bond`."""
        return self.net_for(bond)(torch.as_tensor(self.encode(units, bond), dtype=DTYPE))

    def bid_probabilities(self, units: np.ndarray, bond: int) -> np.ndarray:
        with torch.no_grad():
            return np.minimum(self.predict(units, bond).numpy(), PROB_CEILING)

    def ask_probabilities(self, units: np.ndarray, bond: int) -> np.ndarray:
        return self.bid_probabilities(-np.atleast_2d(units), bond)

    def probabilities(self, units: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
        """(bid, ask) fill probabilities of every bond at one state."""
        q = np.asarray(units, dtype=float)
        pair = np.stack([q, -q])
        bid = np.empty(self.dimension)
        ask = np.empty(self.dimension)
        for i in range(self.dimension):
            bid[i], ask[i] = self.bid_probabilities(pair, i)
        return bid, ask

    def policy_table(self, market: MarketSpec, grid: Optional[InventoryGrid] = None) -> PolicyTable:
        """Tabulate the learned quotes on a grid (the active one by default)."""
        grid = grid if grid is not None else InventoryGrid(market.limits)
        states = grid.states
        bid = np.column_stack([self.bid_probabilities(states, i) for i in range(self.dimension)])
        ask = np.column_stack([self.ask_probabilities(states, i) for i in range(self.dimension)])
        return policy_from_probabilities(market, bid, ask, grid)

    def state_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "specs": [net.spec.to_dict() for net in self.nets],
            "weights": [net.state_dict() for net in self.nets],
        }

    def load_state_dict(self, state: dict) -> None:
        if ActorVariant(state["variant"]) is not self.variant or len(state["weights"]) != len(self.nets):
            raise InvalidParameterError("actor architecture mismatch", {"saved": state["variant"]})
        for net, spec, weights in zip(self.nets, state["specs"], state["weights"]):
            if NetworkSpec.from_dict(spec) != net.spec:
                raise InvalidParameterError("actor architecture mismatch", {"saved": spec})
            net.load_state_dict(weights)
