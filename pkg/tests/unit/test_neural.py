"""
Unit tests for the feedforward networks and their optimizers
"""

import math

import numpy as np
import pytest
import torch

from rfq_maker.domain.neural import (
    FeedForwardNet,
    NetworkSpec,
    OptimizerConfig,
    OptimizerKind,
    OutputHead,
    PretrainConfig,
    flat_parameters,
    forward,
    grad_params,
    gradient_check,
    make_optimizer,
    pretrain_supervised,
    set_flat_parameters,
    sgd_step,
)
from rfq_maker.shared.exceptions import InvalidParameterError


def seeded_net(spec: NetworkSpec, seed: int = 0) -> FeedForwardNet:
    return FeedForwardNet(spec, torch.Generator().manual_seed(seed))


def uniform_sampler(dim: int):
    return lambda rng, n: rng.uniform(-1.0, 1.0, size=(n, dim))


@pytest.mark.unit
class TestFeedForwardNet:
    """Test construction and evaluation."""

    def test_parameter_count(self):
        assert seeded_net(NetworkSpec(3, (10, 10))).parameter_count == 3 * 10 + 10 + 10 * 10 + 10 + 10 + 1

    def test_initialization_bounds(self):
        # Given
        net = seeded_net(NetworkSpec(4, (20, 10)))

        # Then
        for layer in net.body:
            if isinstance(layer, torch.nn.Linear):
                bound = math.sqrt(6.0 / (layer.in_features + layer.out_features))
                assert float(layer.weight.abs().max()) <= bound
                assert torch.all(layer.bias == 0)

    def test_same_seed_same_parameters(self):
        # When
        first = flat_parameters(seeded_net(NetworkSpec(2), seed=5))
        second = flat_parameters(seeded_net(NetworkSpec(2), seed=5))
        other = flat_parameters(seeded_net(NetworkSpec(2), seed=6))

        # Then
        np.testing.assert_array_equal(first, second)
        assert not np.array_equal(first, other)

    def test_zero_weights_affine_head_returns_bias(self):
        # Given
        net = seeded_net(NetworkSpec(2))
        params = np.zeros(net.parameter_count)
        params[-1] = 3.5
        set_flat_parameters(net, params)

        # Then
        assert forward(net, [0.3, -0.7]) == pytest.approx(3.5)

    def test_zero_weights_logistic_head_returns_one_half(self):
        # Given
        net = seeded_net(NetworkSpec(2, head=OutputHead.LOGISTIC))
        set_flat_parameters(net, np.zeros(net.parameter_count))

        # When
        out = forward(net, np.random.default_rng(0).normal(size=(8, 2)))

        # Then
        np.testing.assert_allclose(out, 0.5)

    def test_logistic_outputs_in_unit_interval(self):
        # Given
        net = seeded_net(NetworkSpec(3, head=OutputHead.LOGISTIC), seed=2)

        # When
        out = forward(net, np.random.default_rng(1).normal(0, 5, size=(100, 3)))

        # Then
        assert np.all((out > 0) & (out < 1))

    def test_batch_and_single_inputs_agree(self):
        # Given
        net = seeded_net(NetworkSpec(3), seed=4)
        x = np.random.default_rng(2).normal(size=(5, 3))

        # Then
        np.testing.assert_allclose(forward(net, x), [forward(net, row) for row in x], rtol=1e-12)

    def test_wrong_input_dimension_rejected(self):
        with pytest.raises(InvalidParameterError):
            forward(seeded_net(NetworkSpec(3)), [1.0, 2.0])

    def test_invalid_layer_sizes_rejected(self):
        with pytest.raises(InvalidParameterError):
            NetworkSpec(0)
        with pytest.raises(InvalidParameterError):
            NetworkSpec(2, (10, 0))

    def test_spec_dict_roundtrip(self):
        # Given
        spec = NetworkSpec(7, (20, 10), OutputHead.LOGISTIC)

        # Then
        assert NetworkSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.unit
class TestGradients:
    """Test autograd parameter gradients against central differences."""

    @pytest.mark.parametrize(
        "spec",
        [
            NetworkSpec(1, (10, 10)),
            NetworkSpec(2, (10, 10), OutputHead.LOGISTIC),
            NetworkSpec(3, (20, 10)),
            NetworkSpec(4, (20, 20), OutputHead.LOGISTIC),
        ],
    )
    def test_matches_finite_differences(self, spec):
        # Given
        net = seeded_net(spec, seed=3)
        inputs = np.random.default_rng(7).uniform(-1.0, 1.0, size=(20, spec.input_dim))

        # When
        error = gradient_check(net, inputs)

        # Then
        assert error < 1e-4

    def test_check_leaves_parameters_untouched(self):
        # Given
        net = seeded_net(NetworkSpec(2), seed=1)
        before = flat_parameters(net)

        # When
        gradient_check(net, [[0.4, -0.2]])

        # Then
        np.testing.assert_array_equal(flat_parameters(net), before)

    def test_gradient_of_output_bias_is_one(self):
        # Given
        net = seeded_net(NetworkSpec(2), seed=1)

        # When
        grad = grad_params(net, [0.1, 0.9])

        # Then
        assert grad.shape == (net.parameter_count,)
        assert grad[-1] == pytest.approx(1.0)

    def test_grad_params_rejects_batches(self):
        with pytest.raises(InvalidParameterError):
            grad_params(seeded_net(NetworkSpec(2)), np.zeros((3, 2)))


@pytest.mark.unit
class TestFirstOrderSteps:
    """Test plain and Adam parameter moves."""

    def test_plain_step_moves_by_rate_times_direction(self):
        # Given
        net = seeded_net(NetworkSpec(2), seed=1)
        optimizer = make_optimizer(net, OptimizerConfig(OptimizerKind.PLAIN_SGD, rate=0.1))
        before = flat_parameters(net)
        direction = np.random.default_rng(3).normal(size=before.size)

        # When
        sgd_step(net, optimizer, direction, sign=-1.0)

        # Then
        np.testing.assert_allclose(flat_parameters(net), before - 0.1 * direction, rtol=1e-12, atol=1e-15)

    @pytest.mark.parametrize("kind", [OptimizerKind.PLAIN_SGD, OptimizerKind.ADAM])
    def test_zero_direction_leaves_parameters(self, kind):
        # Given
        net = seeded_net(NetworkSpec(2), seed=1)
        optimizer = make_optimizer(net, OptimizerConfig(kind, rate=0.1))
        before = flat_parameters(net)

        # When
        sgd_step(net, optimizer, np.zeros(before.size))

        # Then
        np.testing.assert_array_equal(flat_parameters(net), before)

    def test_first_adam_step_moves_by_rate(self):
        """Bias correction makes the first Adam move ≈ rate·sign(direction)."""
        # Given
        net = seeded_net(NetworkSpec(2), seed=1)
        optimizer = make_optimizer(net, OptimizerConfig(OptimizerKind.ADAM, rate=1e-3))
        before = flat_parameters(net)
        direction = np.random.default_rng(4).uniform(0.5, 2.0, size=before.size)

        # When
        sgd_step(net, optimizer, direction)

        # Then
        np.testing.assert_allclose(flat_parameters(net) - before, 1e-3, rtol=1e-6)

    def test_direction_size_checked(self):
        # Given
        net = seeded_net(NetworkSpec(2))
        optimizer = make_optimizer(net, OptimizerConfig())

        # Then
        with pytest.raises(InvalidParameterError):
            sgd_step(net, optimizer, np.zeros(3))

    def test_invalid_optimizer_settings_rejected(self):
        with pytest.raises(InvalidParameterError):
            OptimizerConfig(rate=0.0)
        with pytest.raises(InvalidParameterError):
            OptimizerConfig(OptimizerKind.ADAM, betas=(0.9, 1.0))


@pytest.mark.unit
class TestPretrainSupervised:
    """Test the supervised fit used to initialize critic and actor."""

    def test_fits_large_affine_target(self):
        # Given
        net = seeded_net(NetworkSpec(2), seed=0)
        target = lambda x: 1000.0 + 50.0 * x[:, 0] - 20.0 * x[:, 1]
        config = PretrainConfig(batches=3000, check_every=250)
        rng = np.random.default_rng(0)

        # When
        report = pretrain_supervised(net, target, uniform_sampler(2), config, rng)

        # Then
        x = uniform_sampler(2)(np.random.default_rng(1), 500)
        variance = float(np.var(target(x)))
        assert np.mean((forward(net, x) - target(x)) ** 2) < 1e-2 * variance
        assert report.mse < report.history[0]
        assert report.batches <= config.batches

    def test_logistic_target(self):
        # Given
        net = seeded_net(NetworkSpec(1, head=OutputHead.LOGISTIC), seed=0)
        target = lambda x: 0.3 + 0.2 * x[:, 0]
        config = PretrainConfig(batches=2000, check_every=250)

        # When
        report = pretrain_supervised(net, target, uniform_sampler(1), config, np.random.default_rng(2))

        # Then
        assert report.mse < 1e-3
        assert forward(net, [0.0]) == pytest.approx(0.3, abs=0.05)

    def test_stops_once_threshold_is_reached(self):
        # Given
        net = seeded_net(NetworkSpec(1), seed=0)
        config = PretrainConfig(batches=1000, check_every=50, threshold=1e9)

        # When
        report = pretrain_supervised(net, lambda x: x[:, 0], uniform_sampler(1), config, np.random.default_rng(3))

        # Then
        assert report.reached
        assert report.batches == 50
        assert report.threshold == 1e9

    def test_unreached_threshold_is_reported(self):
        # Given
        net = seeded_net(NetworkSpec(1), seed=0)
        config = PretrainConfig(batches=10, check_every=5, threshold=1e-30)

        # When
        report = pretrain_supervised(net, lambda x: np.sin(5 * x[:, 0]), uniform_sampler(1), config, np.random.default_rng(4))

        # Then
        assert not report.reached
        assert report.batches == 10
