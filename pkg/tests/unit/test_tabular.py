"""
Unit tests for the exact grid solvers
"""

import numpy as np
import pytest

from rfq_maker.domain.intensity import myopic_quote
from rfq_maker.domain.market import InventoryGrid, Side, gamma_rl, penalty_values
from rfq_maker.domain.tabular import (
    PolicyTable,
    ValueFlavor,
    ValueTable,
    average_reward_per_rfq,
    bellman_operator,
    check_grid_size,
    greedy_policy,
    myopic_policy,
    no_trade_policy,
    policy_evaluation,
    policy_from_probabilities,
    reward_per_rfq_std,
    stationary_distribution,
    to_any_time_value,
    to_rfq_value,
    transition_matrix,
    value_iteration,
)
from rfq_maker.shared.exceptions import GridTooLargeError, InvalidParameterError, ReducibleChainError

from ..conftest import make_market


@pytest.fixture(scope="module")
def bond1_solution(bond1_market):
    table = value_iteration(bond1_market)
    return table, greedy_policy(bond1_market, table)


@pytest.mark.unit
class TestPolicyTables:
    """Test policy construction helpers."""

    def test_blocked_sides_have_no_quote(self, small_market):
        # When
        policy = myopic_policy(small_market)

        # Then
        assert np.isnan(policy.bid_delta[-1, 0]) and policy.bid_prob[-1, 0] == 0.0
        assert np.isnan(policy.ask_delta[0, 0]) and policy.ask_prob[0, 0] == 0.0
        assert policy.quote_at((0,), 0, Side.BID) == pytest.approx(myopic_quote(small_market.bonds[0].curve))

    def test_zero_probability_means_never_trade(self, small_market):
        # When
        policy = no_trade_policy(small_market)

        # Then
        assert np.all(policy.bid_prob == 0.0)
        assert np.isinf(policy.bid_delta[0, 0])

    def test_probabilities_outside_unit_interval_rejected(self, small_market):
        # Given
        size = InventoryGrid(small_market.limits).size
        bad = np.full((size, 1), 1.0)

        # Then
        with pytest.raises(InvalidParameterError):
            policy_from_probabilities(small_market, bad, bad)

    def test_shape_mismatch_rejected(self, small_market):
        with pytest.raises(InvalidParameterError):
            PolicyTable(InventoryGrid([2]), *(np.zeros((4, 1)) for _ in range(4)))


@pytest.mark.unit
class TestPolicyEvaluation:
    """Test the linear Bellman solve."""

    def test_no_trade_policy_value(self, small_pair_market):
        # Given
        policy = no_trade_policy(small_pair_market)
        psi = penalty_values(small_pair_market, policy.grid.states)

        # When
        table = policy_evaluation(small_pair_market, policy)

        # Then
        assert table.flavor is ValueFlavor.AT_ANY_TIME
        np.testing.assert_allclose(table.values, -psi / small_pair_market.discount, rtol=1e-9, atol=1e-12)

    def test_no_trade_value_is_same_in_both_flavors(self, small_market):
        # Given
        table = policy_evaluation(small_market, no_trade_policy(small_market))

        # When
        at_rfq = to_rfq_value(small_market, table)

        # Then
        np.testing.assert_allclose(at_rfq.values, table.values, rtol=1e-9)

    def test_flavor_coupling_roundtrip(self, bond1_market):
        # Given
        grid = InventoryGrid(bond1_market.limits)
        table = ValueTable(grid, np.linspace(-3e5, 2e5, grid.size), ValueFlavor.AT_ANY_TIME)

        # When
        back = to_any_time_value(bond1_market, to_rfq_value(bond1_market, table))

        # Then
        np.testing.assert_allclose(back.values, table.values, rtol=1e-12, atol=1e-12 * 3e5)

    def test_zero_penalty_coupling_is_a_rescaling(self, small_market):
        # Given
        market = small_market.with_penalty(gamma=0.0)
        grid = InventoryGrid(market.limits)
        table = ValueTable(grid, np.arange(grid.size, dtype=float), ValueFlavor.AT_ANY_TIME)

        # Then
        np.testing.assert_allclose(to_rfq_value(market, table).values, table.values / gamma_rl(market))

    def test_wrong_flavor_rejected(self, small_market):
        # Given
        grid = InventoryGrid(small_market.limits)
        table = ValueTable(grid, np.zeros(grid.size), ValueFlavor.AT_RFQ)

        # Then
        with pytest.raises(InvalidParameterError):
            to_rfq_value(small_market, table)


@pytest.mark.unit
class TestBellmanOperator:
    """Test Γ₂∘Γ₁."""

    def test_constant_shift(self, small_pair_market):
        # Given
        grid = InventoryGrid(small_pair_market.limits)
        u = ValueTable(grid, np.random.default_rng(0).normal(0, 50, grid.size), ValueFlavor.AT_RFQ)
        c = 123.0

        # When
        shifted = bellman_operator(small_pair_market, u.shifted(c)).values
        base = bellman_operator(small_pair_market, u).values

        # Then
        np.testing.assert_allclose(shifted, base + gamma_rl(small_pair_market) * c, rtol=0, atol=1e-9)

    def test_contraction(self, small_pair_market):
        # Given
        grid = InventoryGrid(small_pair_market.limits)
        rng = np.random.default_rng(1)
        gamma = gamma_rl(small_pair_market)

        for _ in range(50):
            u = ValueTable(grid, rng.normal(0, 100, grid.size), ValueFlavor.AT_RFQ)
            v = ValueTable(grid, rng.normal(0, 100, grid.size), ValueFlavor.AT_RFQ)

            # When
            gap = np.max(np.abs(bellman_operator(small_pair_market, u).values - bellman_operator(small_pair_market, v).values))

            # Then
            assert gap <= gamma * np.max(np.abs(u.values - v.values)) + 1e-9

    def test_rejects_at_any_time_table(self, small_market):
        # Given
        grid = InventoryGrid(small_market.limits)

        # Then
        with pytest.raises(InvalidParameterError):
            bellman_operator(small_market, ValueTable(grid, np.zeros(grid.size), ValueFlavor.AT_ANY_TIME))


@pytest.mark.unit
class TestValueIteration:
    """Test value iteration and greedy policies."""

    def test_fixed_point_residual(self, bond1_market, bond1_solution):
        # Given
        table, _ = bond1_solution

        # When
        gap = np.max(np.abs(bellman_operator(bond1_market, table).values - table.values))

        # Then
        assert gap < 1e-4 * (1 - gamma_rl(bond1_market)) + 1e-6

    def test_greedy_policy_is_self_consistent(self, bond1_market, bond1_solution):
        # Given
        table, policy = bond1_solution

        # When
        evaluated = policy_evaluation(bond1_market, policy)

        # Then
        expected = to_any_time_value(bond1_market, table).values
        assert np.max(np.abs(evaluated.values - expected)) <= 1e-6 * table.value_range

    def test_bid_quote_increasing_in_inventory(self, bond1_solution):
        # Given
        _, policy = bond1_solution
        bid = policy.bid_delta[:-1, 0]
        ask = policy.ask_delta[1:, 0]

        # Then
        assert np.all(np.diff(bid) > 0)
        assert np.all(np.diff(ask) < 0)

    def test_symmetric_market_gives_mirrored_quotes(self, bond1_solution):
        # Given
        _, policy = bond1_solution

        # Then
        np.testing.assert_allclose(policy.bid_delta[:-1, 0], policy.ask_delta[1:, 0][::-1], atol=1e-7)

    def test_constant_table_gives_myopic_quotes(self, bond1_market):
        # Given
        grid = InventoryGrid(bond1_market.limits)
        table = ValueTable(grid, np.full(grid.size, 42.0), ValueFlavor.AT_ANY_TIME)
        dm = myopic_quote(bond1_market.bonds[0].curve)

        # When
        policy = greedy_policy(bond1_market, table)

        # Then
        np.testing.assert_allclose(policy.bid_delta[:-1, 0], dm, atol=1e-7)
        np.testing.assert_allclose(policy.ask_delta[1:, 0], dm, atol=1e-7)

    def test_volatile_bond_skews_probabilities(self, bundled_market):
        # Given
        market = bundled_market.subset(["BOND.5"])
        policy = greedy_policy(market, value_iteration(market))
        states = policy.grid.states[:, 0]

        # Then
        assert np.all(policy.bid_prob[(states >= 0) & (states < 5), 0] < 0.10)
        assert np.all(policy.bid_prob[states <= -2, 0] > 0.40)

    def test_rejects_non_positive_tolerance(self, small_market):
        with pytest.raises(InvalidParameterError):
            value_iteration(small_market, tol=0.0)

    def test_refuses_oversized_grid(self):
        # Given
        market = make_market(n_bonds=8, max_units=10)

        # Then
        with pytest.raises(GridTooLargeError) as exc_info:
            value_iteration(market)
        assert exc_info.value.details["size"] == 21 ** 8
        with pytest.raises(GridTooLargeError):
            check_grid_size(InventoryGrid([10] * 8))


@pytest.mark.unit
class TestErgodicReward:
    """Test the stationary distribution and average reward per RFQ."""

    def test_transition_matrix_is_stochastic(self, small_pair_market):
        # When
        p = transition_matrix(small_pair_market, myopic_policy(small_pair_market))

        # Then
        np.testing.assert_allclose(np.asarray(p.sum(axis=1)).ravel(), 1.0, atol=1e-12)
        assert p.min() >= 0

    def test_myopic_chain_is_uniform(self, small_market):
        # Given
        market = small_market.with_penalty(gamma=0.0)

        # When
        m = stationary_distribution(market, myopic_policy(market))

        # Then
        np.testing.assert_allclose(m, 1.0 / m.size, atol=1e-10)

    def test_symmetric_policy_gives_symmetric_distribution(self, bond1_market, bond1_solution):
        # Given
        _, policy = bond1_solution

        # When
        m = stationary_distribution(bond1_market, policy)

        # Then
        assert m.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(m >= 0)
        np.testing.assert_allclose(m, m[::-1], atol=1e-10)

    def test_no_trade_chain_is_reducible(self, small_market):
        with pytest.raises(ReducibleChainError) as exc_info:
            stationary_distribution(small_market, no_trade_policy(small_market))
        assert exc_info.value.details["n_closed"] == 5

    def test_no_trade_without_penalty_earns_nothing(self, small_market):
        # Given
        market = small_market.with_penalty(gamma=0.0)
        point_mass = np.zeros(5)
        point_mass[2] = 1.0

        # Then
        assert average_reward_per_rfq(market, no_trade_policy(market), point_mass) == 0.0

    def test_distribution_shape_checked(self, small_market):
        with pytest.raises(InvalidParameterError):
            average_reward_per_rfq(small_market, myopic_policy(small_market), np.ones(3) / 3)

    def test_optimal_beats_myopic(self, bond1_market, bond1_solution):
        # Given
        _, policy = bond1_solution

        # Then
        assert average_reward_per_rfq(bond1_market, policy) > average_reward_per_rfq(
            bond1_market, myopic_policy(bond1_market)
        )
        assert reward_per_rfq_std(bond1_market, policy) > 0
