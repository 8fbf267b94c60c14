"""
Unit tests for rollouts of the RFQ decision process
"""

import numpy as np
import pytest

from rfq_maker.domain.intensity import f_eval, f_inverse
from rfq_maker.domain.market import InventoryState
from rfq_maker.domain.simulation import (
    NoiseSpec,
    RolloutBatch,
    TableQuoteSource,
    estimate_r_mean,
    expected_rewards,
    perturbed_policy,
    random_start,
    rollout,
    rollout_standard_error,
    shuffle,
)
from rfq_maker.domain.tabular import average_reward_per_rfq, myopic_policy, no_trade_policy
from rfq_maker.shared.exceptions import InvalidParameterError

from ..conftest import BOND1_CURVE


@pytest.mark.unit
class TestPerturbedPolicy:
    """Test the exploration quote δ_ε."""

    def test_small_noise_shifts_probability(self):
        # Given
        delta = 0.1

        # When
        p_eps, delta_eps = perturbed_policy(BOND1_CURVE, delta, 0.02, 0.005)

        # Then
        assert p_eps == pytest.approx(f_eval(BOND1_CURVE, delta) + 0.02, abs=1e-12)
        assert delta_eps < delta
        assert f_eval(BOND1_CURVE, delta_eps) == pytest.approx(p_eps, abs=1e-10)

    def test_probability_clamped_to_floor(self):
        # When
        high, _ = perturbed_policy(BOND1_CURVE, -5.0, 0.5, 0.005)
        low, delta_low = perturbed_policy(BOND1_CURVE, 5.0, -0.5, 0.005)

        # Then
        assert high == pytest.approx(0.995)
        assert low == pytest.approx(0.005)
        assert delta_low == pytest.approx(f_inverse(BOND1_CURVE, 0.005))

    def test_non_finite_quote_rejected(self):
        with pytest.raises(InvalidParameterError):
            perturbed_policy(BOND1_CURVE, np.inf, 0.0, 0.005)

    def test_invalid_noise_rejected(self):
        with pytest.raises(InvalidParameterError):
            NoiseSpec(half_width=0.0)
        with pytest.raises(InvalidParameterError):
            NoiseSpec(nu=0.5)


@pytest.mark.unit
class TestRollout:
    """Test simulated trajectories."""

    def test_same_seed_same_records(self, small_pair_market):
        # Given
        source = TableQuoteSource(myopic_policy(small_pair_market))
        start = InventoryState((0, 0))

        # When
        first = rollout(small_pair_market, source, start, 500, NoiseSpec(), 17)
        second = rollout(small_pair_market, source, start, 500, NoiseSpec(), 17)

        # Then
        for name in RolloutBatch.__dataclass_fields__:
            np.testing.assert_array_equal(getattr(first, name), getattr(second, name))

    def test_inventory_stays_within_limits(self, small_pair_market):
        # When
        batch = rollout(small_pair_market, TableQuoteSource(myopic_policy(small_pair_market)), InventoryState((2, -2)), 3000, NoiseSpec(), 1)

        # Then
        assert np.all(np.abs(batch.next_states) <= 2)
        np.testing.assert_array_equal(batch.states[1:], batch.next_states[:-1])

    def test_blocked_events_do_not_trade(self, small_market):
        # When
        batch = rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((2,)), 2000, NoiseSpec(), 3)

        # Then
        blocked = (batch.states[:, 0] == 2) & (batch.sides == 0)
        assert np.any(blocked)
        assert np.all(batch.probs[blocked] == 0.0)
        assert np.all(np.isnan(batch.deltas[blocked]))
        assert not np.any(batch.fills[blocked])
        assert not np.any(batch.admissible[blocked])

    def test_fill_frequency_follows_perturbed_probability(self, small_market):
        # When
        batch = rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((0,)), 40_000, NoiseSpec(), 5)

        # Then
        live = batch.admissible
        assert np.all((batch.probs_eps[live] >= 0.005) & (batch.probs_eps[live] <= 0.995))
        assert batch.fills[live].mean() == pytest.approx(batch.probs_eps[live].mean(), abs=0.01)

    def test_without_noise_played_quote_is_policy_quote(self, small_market):
        # When
        batch = rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((0,)), 300, None, 2)

        # Then
        np.testing.assert_array_equal(batch.probs_eps, batch.probs)

    def test_records_view(self, small_market):
        # Given
        batch = rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((0,)), 50, NoiseSpec(), 8)

        # When
        record = batch[0]

        # Then
        assert record.state == InventoryState((0,))
        assert record.admissible
        assert len(list(batch)) == 50

    def test_invalid_length_rejected(self, small_market):
        with pytest.raises(InvalidParameterError):
            rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((0,)), 0, None, 0)

    def test_start_outside_limits_rejected(self, small_market):
        with pytest.raises(InvalidParameterError):
            rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((3,)), 10, None, 0)

    def test_random_start_within_limits(self, small_pair_market):
        # Given
        rng = np.random.default_rng(0)

        # When
        starts = np.array([random_start(small_pair_market, rng).units for _ in range(200)])

        # Then
        assert starts.min() == -2 and starts.max() == 2


@pytest.mark.unit
class TestRewardEstimates:
    """Test R_mean and its standard error."""

    def test_no_trade_without_penalty_earns_nothing(self, small_market):
        # Given
        market = small_market.with_penalty(gamma=0.0)

        # When
        batch = rollout(market, TableQuoteSource(no_trade_policy(market)), InventoryState((1,)), 200, None, 0)

        # Then
        assert estimate_r_mean(batch, market) == 0.0
        assert not np.any(batch.fills)

    def test_estimate_matches_exact_average(self, small_market):
        # Given
        policy = myopic_policy(small_market)
        exact = average_reward_per_rfq(small_market, policy)

        # When
        batch = rollout(small_market, TableQuoteSource(policy), InventoryState((0,)), 100_000, None, 11)
        estimate = estimate_r_mean(batch, small_market)
        se = rollout_standard_error(batch, small_market)

        # Then
        assert se > 0
        assert abs(estimate - exact) < 5 * se

    def test_reward_of_flat_fill(self, small_market):
        # Given
        batch = rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((0,)), 1, None, 4)
        bond = small_market.bonds[0]

        # When
        reward = expected_rewards(batch, small_market)[0]

        # Then
        assert reward == pytest.approx(batch.probs[0] * bond.trade_size * batch.deltas[0], rel=1e-9)

    def test_standard_error_needs_enough_records(self, small_market):
        # Given
        batch = rollout(small_market, TableQuoteSource(myopic_policy(small_market)), InventoryState((0,)), 30, None, 0)

        # Then
        with pytest.raises(InvalidParameterError):
            rollout_standard_error(batch, small_market)


@pytest.mark.unit
class TestShuffle:
    """Test record permutation."""

    def test_shuffle_keeps_records(self, small_pair_market):
        # Given
        batch = rollout(small_pair_market, TableQuoteSource(myopic_policy(small_pair_market)), InventoryState((0, 0)), 400, NoiseSpec(), 6)

        # When
        mixed = shuffle(batch, 0)

        # Then
        assert len(mixed) == len(batch)
        np.testing.assert_allclose(np.sort(mixed.probs_eps), np.sort(batch.probs_eps))
        assert not np.array_equal(mixed.bonds, batch.bonds) or not np.array_equal(mixed.states, batch.states)

    def test_concatenate(self, small_market):
        # Given
        source = TableQuoteSource(myopic_policy(small_market))
        parts = [rollout(small_market, source, InventoryState((0,)), 20, None, k) for k in range(3)]

        # When
        joined = RolloutBatch.concatenate(parts)

        # Then
        assert len(joined) == 60
        np.testing.assert_array_equal(joined.bonds[20:40], parts[1].bonds)
