"""
Unit tests for the market model and the inventory grid
"""

import numpy as np
import pytest

from rfq_maker.domain.intensity import f_eval, myopic_quote
from rfq_maker.domain.market import (
    InventoryGrid,
    InventoryState,
    PenaltyKind,
    Side,
    expected_step_reward,
    gamma_rl,
    penalty_eval,
    penalty_values,
    rfq_event_distribution,
    side_is_admissible,
    total_rfq_rate,
)
from rfq_maker.shared.exceptions import InvalidParameterError

from ..conftest import make_market


@pytest.mark.unit
class TestPenalty:
    """Test ψ(q) for both penalty kinds."""

    def test_flat_inventory_costs_nothing(self, bond1_market):
        assert penalty_eval(bond1_market, InventoryState.flat(1)) == 0.0

    def test_variance_penalty_one_unit_long(self, bond1_market):
        # Given
        market = bond1_market.with_penalty(PenaltyKind.VARIANCE, 2e-5)

        # When
        psi = penalty_eval(market, InventoryState((1,)))

        # Then
        assert psi == pytest.approx(0.5 * 2e-5 * 7000 ** 2 * 0.0049, rel=1e-12)
        assert psi == pytest.approx(2.401, rel=1e-12)

    def test_stddev_penalty_one_unit_long(self, bond1_market):
        assert penalty_eval(bond1_market, InventoryState((1,))) == pytest.approx(12.25, rel=1e-12)

    def test_symmetry_and_homogeneity(self, small_pair_market):
        # Given
        rng = np.random.default_rng(5)
        q = rng.integers(-2, 3, size=(50, 2)).astype(float)
        variance = small_pair_market.with_penalty(PenaltyKind.VARIANCE)

        # Then
        np.testing.assert_allclose(penalty_values(small_pair_market, q), penalty_values(small_pair_market, -q))
        np.testing.assert_allclose(
            penalty_values(small_pair_market, 2 * q), 2 * penalty_values(small_pair_market, q), rtol=1e-12
        )
        np.testing.assert_allclose(penalty_values(variance, 2 * q), 4 * penalty_values(variance, q), rtol=1e-12)

    def test_negative_gamma_rejected(self, small_market):
        with pytest.raises(InvalidParameterError):
            small_market.with_penalty(gamma=-1.0)


@pytest.mark.unit
class TestRates:
    """Test Λ, γ_RL and the RFQ event distribution."""

    def test_gamma_rl_single_bond(self, bond1_market):
        assert gamma_rl(bond1_market) == pytest.approx(0.55 / 0.5501, rel=1e-12)

    def test_gamma_rl_vanishes_for_huge_discount(self, bond1_market):
        assert gamma_rl(bond1_market.with_penalty(discount=1e6)) < 1e-5

    def test_total_rate_of_bundled_market(self, bundled_market):
        # Given
        expected = 2 * sum(b.lambda_bid for b in bundled_market.bonds)

        # Then
        assert total_rfq_rate(bundled_market) == pytest.approx(expected, rel=1e-12)
        assert gamma_rl(bundled_market) == pytest.approx(expected / (expected + 1e-4), rel=1e-12)

    def test_single_bond_distribution_is_symmetric(self, bond1_market):
        np.testing.assert_allclose(rfq_event_distribution(bond1_market), [[0.5, 0.5]])

    def test_pair_distribution(self, pair_market):
        # When
        events = rfq_event_distribution(pair_market)

        # Then
        assert events[0, 0] == pytest.approx(0.275 / 0.75, rel=1e-12)
        assert events.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(events > 0)


@pytest.mark.unit
class TestStepReward:
    """Test the per-RFQ reward f(δ)Δδ − ψ/Λ."""

    def test_myopic_reward_at_flat_inventory(self, bond1_market):
        # Given
        bond = bond1_market.bonds[0]
        dm = myopic_quote(bond.curve)

        # When
        reward = expected_step_reward(bond1_market, InventoryState((0,)), 0, Side.BID, dm)

        # Then
        assert reward == pytest.approx(bond.trade_size * dm * f_eval(bond.curve, dm), rel=1e-12)

    def test_blocked_bid_only_pays_penalty(self, bond1_market):
        # Given
        state = InventoryState((5,))
        cost = penalty_eval(bond1_market, state) / total_rfq_rate(bond1_market)

        # Then
        assert not side_is_admissible(bond1_market, state, 0, Side.BID)
        assert side_is_admissible(bond1_market, state, 0, Side.ASK)
        assert expected_step_reward(bond1_market, state, 0, Side.BID, 0.1) == pytest.approx(-cost)

    def test_non_finite_quote_rejected(self, bond1_market):
        with pytest.raises(InvalidParameterError):
            expected_step_reward(bond1_market, InventoryState((0,)), 0, Side.BID, np.nan)


@pytest.mark.unit
class TestMarketSpec:
    """Test market construction and copies."""

    def test_bundled_market_shape(self, bundled_market):
        assert bundled_market.dimension == 20
        assert bundled_market.bond_ids[0] == "BOND.1"
        assert bundled_market.limits == (5,) * 20
        assert bundled_market.bonds[0].trade_size == pytest.approx(7000.0)

    def test_subset_reslices_covariance(self, bundled_market):
        # When
        sub = bundled_market.subset(["BOND.6", "BOND.1"])

        # Then
        assert sub.bond_ids == ("BOND.6", "BOND.1")
        assert sub.covariance[0, 1] == pytest.approx(0.0056)
        assert sub.covariance[0, 0] == pytest.approx(0.0066)

    def test_unknown_bond_rejected(self, bundled_market):
        with pytest.raises(InvalidParameterError):
            bundled_market.subset(["BOND.99"])

    def test_asymmetric_covariance_rejected(self, small_pair_market):
        with pytest.raises(InvalidParameterError):
            type(small_pair_market)(
                small_pair_market.bonds, np.array([[1.0, 0.2], [0.3, 1.0]]), small_pair_market.penalty, 1e-2
            )

    def test_active_limit_above_maximum_rejected(self, small_market):
        with pytest.raises(InvalidParameterError):
            small_market.with_limits([3])

    def test_with_max_units_resets_active_limits(self, small_pair_market):
        # When
        wider = small_pair_market.with_limits([1, 1]).with_max_units([4, 3])

        # Then
        assert wider.max_units == (4, 3)
        assert wider.limits == (4, 3)

    def test_indefinite_covariance_is_clamped(self):
        # Given
        market = make_market(n_bonds=2, correlation=1.5)

        # Then
        assert np.linalg.eigvalsh(market.psd_covariance).min() >= -1e-12

    def test_state_outside_limits_rejected(self, small_market):
        with pytest.raises(InvalidParameterError):
            InventoryState((3,)).check(small_market)


@pytest.mark.unit
class TestInventoryGrid:
    """Test grid enumeration and neighbour maps."""

    def test_size_and_ordering(self):
        # Given
        grid = InventoryGrid([1, 2])

        # Then
        assert grid.size == 15
        assert tuple(grid.states[0]) == (-1, -2)
        assert tuple(grid.states[1]) == (-1, -1)
        assert tuple(grid.states[-1]) == (1, 2)
        assert grid.index((0, 0)) == 7

    def test_neighbours_and_blocking(self):
        # Given
        grid = InventoryGrid([2])

        # Then
        np.testing.assert_array_equal(grid.neighbour(0, Side.BID), [1, 2, 3, 4, -1])
        np.testing.assert_array_equal(grid.neighbour(0, Side.ASK), [-1, 0, 1, 2, 3])
        assert not grid.admissible(0, Side.BID)[-1]

    def test_embed_into_larger_grid(self):
        # Given
        small = InventoryGrid([1])
        large = InventoryGrid([2])

        # When
        out = small.embed(np.array([1.0, 2.0, 3.0]), large, fill=-1.0)

        # Then
        np.testing.assert_array_equal(out, [-1.0, 1.0, 2.0, 3.0, -1.0])

    def test_off_grid_state_rejected(self):
        with pytest.raises(InvalidParameterError):
            InventoryGrid([1]).index((2,))

    def test_non_positive_limits_rejected(self):
        with pytest.raises(InvalidParameterError):
            InventoryGrid([0])
