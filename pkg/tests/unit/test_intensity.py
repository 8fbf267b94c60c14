"""
Unit tests for fill curves, myopic quotes and Hamiltonians
"""

import numpy as np
import pytest
from scipy.stats import norm

from rfq_maker.domain.intensity import (
    HamiltonianTable,
    SuJohnsonCurve,
    check_condition,
    f_derivative,
    f_eval,
    f_inverse,
    hamiltonian,
    hamiltonian_argmax,
    myopic_quote,
)
from rfq_maker.shared.exceptions import InvalidParameterError

from ..conftest import BOND1_CURVE


@pytest.mark.unit
class TestSuJohnsonCurve:
    """Test curve evaluation and its inverse."""

    def test_value_at_location(self):
        """At δ = μ the curve equals 1 − Φ(α)."""
        # When
        p = f_eval(BOND1_CURVE, 0.096)

        # Then
        assert p == pytest.approx(1.0 - norm.cdf(0.4), abs=1e-12)
        assert p == pytest.approx(0.34458, abs=1e-5)

    def test_zero_alpha_gives_one_half(self):
        """With α = 0 the curve is 1/2 at its location."""
        # Given
        curve = SuJohnsonCurve(0.0, 1.3, 0.2, 0.05)

        # Then
        assert f_eval(curve, 0.2) == pytest.approx(0.5, abs=1e-15)

    def test_matches_independent_cdf(self):
        """BOND.10 curve against scipy.stats.norm."""
        # Given
        curve = SuJohnsonCurve(0.4, 0.6, 0.0096, 0.0086)
        z = 0.4 + 0.6 * np.arcsinh((0.0182 - 0.0096) / 0.0086)

        # Then
        assert f_eval(curve, 0.0182) == pytest.approx(norm.sf(z), abs=1e-10)

    def test_strictly_decreasing(self):
        """Larger quotes trade less often."""
        # Given
        rng = np.random.default_rng(3)
        a = rng.uniform(-1.0, 3.0, 200)
        b = a + rng.uniform(1e-3, 1.0, 200)

        # Then
        assert np.all(f_eval(BOND1_CURVE, a) > f_eval(BOND1_CURVE, b))

    def test_inverse_roundtrip(self, bundled_market):
        """f_inverse ∘ f_eval is the identity on all 20 curves."""
        # Given
        deltas = np.array([-0.5, 0.0, 0.096, 1.0])

        for bond in bundled_market.bonds:
            # When
            back = f_inverse(bond.curve, f_eval(bond.curve, deltas))

            # Then
            np.testing.assert_allclose(back, deltas, atol=1e-8)

    def test_inverse_of_one_half_is_location(self):
        # Given
        curve = SuJohnsonCurve(0.0, 0.7, 0.3, 0.2)

        # Then
        assert f_inverse(curve, 0.5) == pytest.approx(0.3, abs=1e-12)

    def test_inverse_rejects_probability_outside_unit_interval(self):
        with pytest.raises(InvalidParameterError):
            f_inverse(BOND1_CURVE, 1.0)
        with pytest.raises(InvalidParameterError):
            f_inverse(BOND1_CURVE, 0.0)

    def test_invalid_shape_parameters_rejected(self):
        with pytest.raises(InvalidParameterError):
            SuJohnsonCurve(0.4, 0.0, 0.1, 0.1)
        with pytest.raises(InvalidParameterError):
            SuJohnsonCurve(0.4, 0.6, 0.1, -0.1)

    def test_derivative_matches_central_difference(self):
        # Given
        deltas = np.linspace(-0.2, 0.6, 17)
        h = 1e-6

        # When
        numeric = (f_eval(BOND1_CURVE, deltas + h) - f_eval(BOND1_CURVE, deltas - h)) / (2 * h)

        # Then
        np.testing.assert_allclose(f_derivative(BOND1_CURVE, deltas), numeric, rtol=1e-6, atol=1e-9)


@pytest.mark.unit
class TestConditionCheck:
    """Test the sup f·f″/(f′)² < 2 check."""

    def test_condition_holds_for_table_shape(self):
        # Given
        z = np.linspace(-50.0, 50.0, 20001)
        delta = BOND1_CURVE.mu + BOND1_CURVE.sigma_curve * z

        # When
        check = check_condition(BOND1_CURVE, delta)

        # Then
        assert check.satisfied
        assert check.maximum < 2.0
        assert delta[0] <= check.location <= delta[-1]

    def test_location_and_scale_do_not_change_maximum(self):
        # Given
        z = np.linspace(-50.0, 50.0, 5001)
        other = SuJohnsonCurve(0.4, 0.6, 1.7, 0.9)

        # When
        first = check_condition(BOND1_CURVE, BOND1_CURVE.mu + BOND1_CURVE.sigma_curve * z)
        second = check_condition(other, other.mu + other.sigma_curve * z)

        # Then
        assert first.maximum == pytest.approx(second.maximum, rel=1e-9)

    def test_refined_grid_agrees(self):
        # Given
        coarse = np.linspace(-50.0, 50.0, 10001)
        fine = np.linspace(-50.0, 50.0, 100001)
        to_delta = lambda z: BOND1_CURVE.mu + BOND1_CURVE.sigma_curve * z

        # Then
        assert abs(
            check_condition(BOND1_CURVE, to_delta(coarse)).maximum
            - check_condition(BOND1_CURVE, to_delta(fine)).maximum
        ) < 1e-3

    def test_empty_grid_rejected(self):
        with pytest.raises(InvalidParameterError):
            check_condition(BOND1_CURVE, np.array([]))


@pytest.mark.unit
class TestMyopicQuote:
    """Test the maximizer of δ·f(δ)."""

    def test_matches_grid_search(self):
        # Given
        grid = np.arange(0.0, 1.0, 1e-6)

        # When
        best = grid[np.argmax(grid * f_eval(BOND1_CURVE, grid))]

        # Then
        assert myopic_quote(BOND1_CURVE) == pytest.approx(best, abs=1e-5)
        assert myopic_quote(BOND1_CURVE) > 0

    def test_scales_with_location_and_scale(self):
        # Given
        k = 3.5

        # Then
        assert myopic_quote(BOND1_CURVE.rescaled(k)) == pytest.approx(k * myopic_quote(BOND1_CURVE), rel=1e-6)

    def test_first_order_condition(self):
        # Given
        d = myopic_quote(BOND1_CURVE)

        # Then
        assert f_eval(BOND1_CURVE, d) + d * f_derivative(BOND1_CURVE, d) == pytest.approx(0.0, abs=1e-6)


@pytest.mark.unit
class TestHamiltonian:
    """Test H(p) = Δλ sup f(δ)(δ − p) and its maximizer."""

    LAM = 0.175
    SIZE = 3000.0

    def test_value_at_zero_is_myopic_reward(self):
        # Given
        curve = SuJohnsonCurve(0.4, 0.6, 0.0576, 0.0516)  # BOND.2
        dm = myopic_quote(curve)

        # Then
        expected = self.SIZE * self.LAM * dm * f_eval(curve, dm)
        assert hamiltonian(curve, self.LAM, self.SIZE, 0.0) == pytest.approx(expected, rel=1e-10)
        assert hamiltonian_argmax(curve, 0.0) == pytest.approx(dm, abs=1e-7)

    def test_dominates_myopic_candidate_for_negative_p(self):
        # Given
        dm = myopic_quote(BOND1_CURVE)
        p = np.array([-0.5, -0.1, -0.01])

        # When
        h = hamiltonian(BOND1_CURVE, self.LAM, self.SIZE, p)

        # Then
        bound = self.SIZE * self.LAM * f_eval(BOND1_CURVE, dm) * (dm - p)
        assert np.all(h >= bound - 1e-9)
        assert np.all(h > 0)

    def test_nonincreasing_and_convex(self):
        # Given
        rng = np.random.default_rng(11)
        p1 = rng.uniform(-0.5, 0.5, 100)
        p2 = rng.uniform(-0.5, 0.5, 100)

        # When
        h1 = hamiltonian(BOND1_CURVE, 1.0, 1.0, p1)
        h2 = hamiltonian(BOND1_CURVE, 1.0, 1.0, p2)
        mid = hamiltonian(BOND1_CURVE, 1.0, 1.0, 0.5 * (p1 + p2))

        # Then
        assert np.all(mid <= 0.5 * (h1 + h2) + 1e-9)
        lo, hi = np.minimum(p1, p2), np.maximum(p1, p2)
        assert np.all(hamiltonian(BOND1_CURVE, 1.0, 1.0, hi) <= hamiltonian(BOND1_CURVE, 1.0, 1.0, lo) + 1e-12)

    def test_envelope_identity(self):
        # Given
        p = np.array([-0.2, 0.0, 0.05, 0.3])
        h = 1e-5

        # When
        slope = (hamiltonian(BOND1_CURVE, 1.0, 1.0, p + h) - hamiltonian(BOND1_CURVE, 1.0, 1.0, p - h)) / (2 * h)

        # Then
        np.testing.assert_allclose(f_eval(BOND1_CURVE, hamiltonian_argmax(BOND1_CURVE, p)), -slope, atol=1e-4)

    def test_argmax_increasing_in_p(self):
        assert hamiltonian_argmax(BOND1_CURVE, 1.0) > hamiltonian_argmax(BOND1_CURVE, 0.0)

    def test_argmax_rejects_non_finite(self):
        with pytest.raises(InvalidParameterError):
            hamiltonian_argmax(BOND1_CURVE, np.nan)

    def test_table_matches_direct_evaluation(self):
        # Given
        table = HamiltonianTable(BOND1_CURVE, self.LAM, self.SIZE, -0.3, 0.3, n_nodes=2001)

        # When
        error = table.self_check(n_points=200, tol=1e-6)

        # Then
        assert error < 1e-6

    def test_table_falls_back_outside_range(self):
        # Given
        table = HamiltonianTable(BOND1_CURVE, self.LAM, self.SIZE, -0.1, 0.1, n_nodes=201)

        # Then
        assert table.value(0.5) == pytest.approx(hamiltonian(BOND1_CURVE, self.LAM, self.SIZE, 0.5), rel=1e-12)

    def test_table_rejects_empty_range(self):
        with pytest.raises(InvalidParameterError):
            HamiltonianTable(BOND1_CURVE, self.LAM, self.SIZE, 0.1, 0.1)
