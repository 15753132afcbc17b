"""Analytic backprop against central finite differences on small networks."""

from __future__ import annotations

import numpy as np
import pytest

from weekcast.nn.gradcheck import (
    finite_difference_gradients,
    kink_margin,
    max_relative_error,
)
from weekcast.nn.network import (
    NetworkSpec,
    conv1d,
    dense,
    flat_shape,
    flatten,
    init_params,
    maxpool1d,
    relu,
    seq_shape,
)
from weekcast.nn.training import batch_gradients


def check(spec, seed, loss="mse", tol=1e-7, min_margin=1e-4):
    """Gradcheck one random instance; returns None if it sits too close to a kink."""
    rng = np.random.default_rng(seed)
    params = init_params(spec, seed)
    inputs = [
        rng.normal(size=(3,) + tuple(s[1:])) for s in spec.input_shapes
    ]
    if loss == "logloss":
        targets = rng.integers(0, 2, size=(3, spec.n_outputs)).astype(float)
    else:
        targets = rng.normal(size=(3, spec.n_outputs))
    if kink_margin(spec, params, inputs) < min_margin:
        return None
    _, analytic = batch_gradients(spec, params, inputs, targets, loss)
    numeric = finite_difference_gradients(spec, params, inputs, targets, loss)
    err = max_relative_error(analytic, numeric)
    assert err < tol, f"seed {seed}: rel err {err:.3e}"
    return err


class TestGradients:
    def test_dense_only(self):
        spec = NetworkSpec(
            input_shapes=(flat_shape(4),), heads=((),), tail=(dense(6), relu(), dense(2))
        )
        assert any(check(spec, seed) is not None for seed in range(5))

    def test_conv_pool_chain(self):
        spec = NetworkSpec(
            input_shapes=(seq_shape(8, 2),),
            heads=((conv1d(3, 3), relu(), maxpool1d(2), flatten()),),
            tail=(dense(5), relu(), dense(2)),
        )
        assert any(check(spec, seed) is not None for seed in range(5))

    def test_two_heads_with_concat(self):
        head = (conv1d(2, 3), relu(), flatten())
        spec = NetworkSpec(
            input_shapes=(seq_shape(6, 1), seq_shape(6, 1)),
            heads=(head, head),
            tail=(dense(4), relu(), dense(3)),
        )
        assert any(check(spec, seed) is not None for seed in range(5))

    def test_logloss_head(self):
        spec = NetworkSpec(
            input_shapes=(flat_shape(3),), heads=((),), tail=(dense(5), relu(), dense(1))
        )
        assert any(check(spec, seed, loss="logloss") is not None for seed in range(5))

    def test_stacked_conv_without_pool(self):
        spec = NetworkSpec(
            input_shapes=(seq_shape(7, 1),),
            heads=((conv1d(3, 2), relu(), conv1d(2, 2), relu(), flatten()),),
            tail=(dense(2),),
        )
        assert any(check(spec, seed) is not None for seed in range(5))


class TestHelpers:
    def test_finite_difference_on_quadratic_is_exact(self):
        # Loss of a linear model under MSE is quadratic in the weights, so
        # central differences are exact up to rounding.
        spec = NetworkSpec(input_shapes=(flat_shape(2),), heads=((),), tail=(dense(1),))
        params = init_params(spec, 3)
        rng = np.random.default_rng(3)
        inputs = [rng.normal(size=(4, 2))]
        targets = rng.normal(size=(4, 1))
        _, analytic = batch_gradients(spec, params, inputs, targets)
        numeric = finite_difference_gradients(spec, params, inputs, targets, h=1e-4)
        assert max_relative_error(analytic, numeric) < 1e-9

    def test_max_relative_error_uses_unit_floor(self):
        a = {"x": {"w": np.array([1e-12])}}
        n = {"x": {"w": np.array([3e-12])}}
        # Denominator is max(|a|, |n|, 1) = 1, so tiny absolute gaps stay tiny.
        assert max_relative_error(a, n) == pytest.approx(2e-12)

    def test_max_relative_error_scales_large_entries(self):
        a = {"x": {"w": np.array([100.0])}}
        n = {"x": {"w": np.array([101.0])}}
        assert max_relative_error(a, n) == pytest.approx(1.0 / 101.0)

    def test_kink_margin_without_kinks_is_infinite(self):
        spec = NetworkSpec(input_shapes=(flat_shape(2),), heads=((),), tail=(dense(1),))
        params = init_params(spec, 0)
        assert kink_margin(spec, params, [np.ones((1, 2))]) == np.inf

    def test_kink_margin_measures_relu_distance(self):
        spec = NetworkSpec(
            input_shapes=(flat_shape(2),), heads=((relu(),),), tail=(dense(1),)
        )
        params = init_params(spec, 0)
        margin = kink_margin(spec, params, [np.array([[0.25, -2.0]])])
        assert margin == pytest.approx(0.25)

    def test_kink_margin_ignores_relu_clamped_zero_ties(self):
        spec = NetworkSpec(
            input_shapes=(seq_shape(4, 1),),
            heads=((relu(), maxpool1d(2), flatten()),),
            tail=(dense(1),),
        )
        params = init_params(spec, 0)
        # First window clamps to [0, 0] (a stable tie); second has gap 1.0.
        x = np.array([[[-1.0], [-2.0], [3.0], [2.0]]])
        assert kink_margin(spec, params, [x]) == pytest.approx(1.0)

    def test_kink_margin_measures_pool_gap(self):
        spec = NetworkSpec(
            input_shapes=(seq_shape(4, 1),),
            heads=((maxpool1d(2), flatten()),),
            tail=(dense(1),),
        )
        params = init_params(spec, 0)
        x = np.array([[[1.0], [1.3], [5.0], [2.0]]])
        # Window gaps: 1.3 - 1.0 = 0.3 and 5.0 - 2.0 = 3.0.
        assert kink_margin(spec, params, [x]) == pytest.approx(0.3)
