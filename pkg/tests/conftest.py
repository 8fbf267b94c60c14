"""
Shared fixtures: the bundled 20-bond market, single-bond sub-markets and
small synthetic markets.
"""

import numpy as np
import pytest

from rfq_maker.domain.intensity import SuJohnsonCurve
from rfq_maker.domain.market import BondSpec, MarketSpec, PenaltyKind, PenaltySpec
from rfq_maker.infrastructure.persistence import load_market

# Average reward per RFQ of the optimal quotes, BOND.1 .. BOND.20
TABLE4_STDDEV = [
    199.1, 53.3, 354.4, 180.0, 391.6, 155.2, 240.0, 569.3, 75.5, 43.4,
    145.8, 552.2, 81.3, 653.8, 208.5, 171.4, 90.2, 527.7, 469.4, 473.7,
]
TABLE5_VARIANCE = [
    213.8, 59.0, 404.0, 203.1, 302.2, 182.6, 270.2, 522.7, 83.2, 43.2,
    156.1, 520.8, 83.1, 602.2, 224.3, 188.0, 109.6, 464.8, 439.8, 489.0,
]

BOND1_CURVE = SuJohnsonCurve(alpha=0.4, beta=0.6, mu=0.096, sigma_curve=0.086)


def make_market(
    n_bonds: int = 1,
    gamma: float = 0.05,
    kind: PenaltyKind = PenaltyKind.STDDEV,
    max_units: int = 2,
    correlation: float = 0.5,
    discount: float = 1e-2,
) -> MarketSpec:
    """Small synthetic market built from BOND.1-like bonds."""
    bonds = tuple(
        BondSpec(
            id=f"B{k + 1}",
            lambda_bid=0.2 + 0.05 * k,
            lambda_ask=0.2 + 0.05 * k,
            rfq_size_numeraire=500_000.0,
            curve=BOND1_CURVE,
            max_units=max_units,
        )
        for k in range(n_bonds)
    )
    vol = np.full(n_bonds, 0.07)
    corr = np.full((n_bonds, n_bonds), correlation)
    np.fill_diagonal(corr, 1.0)
    return MarketSpec(bonds, np.outer(vol, vol) * corr, PenaltySpec(kind, gamma), discount)


@pytest.fixture(scope="session")
def bundled_market() -> MarketSpec:
    return load_market()


@pytest.fixture(scope="session")
def bond1_market(bundled_market) -> MarketSpec:
    return bundled_market.subset(["BOND.1"])


@pytest.fixture(scope="session")
def pair_market(bundled_market) -> MarketSpec:
    return bundled_market.subset(["BOND.1", "BOND.6"])


@pytest.fixture
def small_market() -> MarketSpec:
    return make_market()


@pytest.fixture
def small_pair_market() -> MarketSpec:
    return make_market(n_bonds=2)
