import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperball.config import TrainConfig
from hyperball.errors import ConfigError
from hyperball.losses import (
    DoubleWellParams,
    bce_an,
    double_well,
    double_well_grad,
    double_well_terms,
    total_loss,
    uniformity,
)

DEFAULTS = DoubleWellParams(beta1=0.1, beta2=500.0, c1=0.1, c2=0.9)


class TestBCE:
    def test_single_zero_score(self):
        assert bce_an(np.array([0.0]), 0) == pytest.approx(math.log(2), rel=1e-15)

    def test_saturated(self):
        assert bce_an(np.array([20.0, -20.0]), 0) <= 1e-8

    def test_two_zero_scores(self):
        assert bce_an(np.array([0.0, 0.0]), 0) == pytest.approx(math.log(2), rel=1e-15)

    def test_clamp(self):
        assert bce_an(np.array([-1e4]), 0) == pytest.approx(-math.log(1e-12))

    def test_index_range(self):
        with pytest.raises(IndexError):
            bce_an(np.zeros(3), 3)

    def test_batch_form(self, rng):
        S = rng.standard_normal((4, 3))
        pos = np.array([0, 2, 1, 1])
        per = bce_an(S, pos)
        assert per.shape == (4,)
        assert per[1] == pytest.approx(bce_an(S[1], 2))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=6), st.integers(0, 5))
    def test_non_negative(self, scores, pos):
        pos = pos % len(scores)
        assert bce_an(np.array(scores), pos) >= 0.0


def _literal_well(rho, b1, b2, c1, c2):
    # straight transcription, written independently of losses.py
    return (-math.exp(-b1 * (rho - c1) ** 2) * (1 - math.exp(-b2 * rho**2))
            - math.exp(-b1 * (rho - c2) ** 2) * (1 - math.exp(-b2 * (1 - rho) ** 2)))


class TestDoubleWell:
    def test_origin(self):
        assert double_well([0.0], DEFAULTS) == pytest.approx(-0.92219369144460807, rel=1e-12)

    def test_inner_well(self):
        assert double_well([0.1], DEFAULTS) == pytest.approx(-1.9312670525316440, rel=1e-12)

    def test_additive(self):
        assert double_well([0.37, 0.37], DEFAULTS) == 2 * double_well([0.37], DEFAULTS)

    def test_grid_matches_literal(self):
        grid = np.linspace(0, 1, 1001)
        expected = [_literal_well(r, 0.1, 500.0, 0.1, 0.9) for r in grid]
        np.testing.assert_allclose(double_well_terms(grid, DEFAULTS), expected, rtol=0, atol=1e-12)

    def test_width_reading_is_bistable(self):
        p = DoubleWellParams(beta1=0.1, beta2=500.0, c1=0.1, c2=0.9, beta1_as_width=True)
        grid = np.linspace(0.01, 0.99, 981)
        e = double_well_terms(grid, p)
        interior_minima = np.flatnonzero((e[1:-1] < e[:-2]) & (e[1:-1] < e[2:])) + 1
        assert len(interior_minima) == 2

    def test_literal_reading_has_single_minimum(self):
        grid = np.linspace(0.01, 0.99, 981)
        e = double_well_terms(grid, DEFAULTS)
        interior_minima = np.flatnonzero((e[1:-1] < e[:-2]) & (e[1:-1] < e[2:])) + 1
        assert len(interior_minima) == 1
        assert grid[interior_minima[0]] == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize("width", [False, True])
    def test_gradient(self, width):
        p = DoubleWellParams(0.07, 700.0, 0.12, 0.85, width)
        rho = np.linspace(0.02, 0.98, 50)
        h = 1e-6
        fd = (double_well_terms(rho + h, p) - double_well_terms(rho - h, p)) / (2 * h)
        np.testing.assert_allclose(double_well_grad(rho, p), fd, rtol=1e-5, atol=1e-6)

    def test_invalid(self):
        with pytest.raises(ConfigError):
            DoubleWellParams(c1=0.9, c2=0.1)


class TestUniformity:
    def test_orthogonal(self):
        assert uniformity(np.array([[0.5, 0.0], [0.0, 0.3]])) == pytest.approx(0.0, abs=1e-15)

    def test_parallel(self):
        assert uniformity(np.array([[0.5, 0.0], [0.2, 0.0]])) == pytest.approx(1.0, rel=1e-15)

    def test_triangle(self):
        ang = np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])
        C = 0.4 * np.column_stack([np.cos(ang), np.sin(ang)])
        assert uniformity(C) == pytest.approx(0.5, rel=1e-12)

    def test_single_label_noop(self):
        assert uniformity(np.array([[0.3, 0.1]])) == 0.0

    def test_scale_invariant(self, rng):
        C = rng.standard_normal((5, 3))
        scaled = C * rng.uniform(0.1, 3.0, size=(5, 1))
        assert uniformity(C) == pytest.approx(uniformity(scaled), rel=1e-12)

    def test_range(self, rng):
        for _ in range(20):
            assert 0.0 <= uniformity(rng.standard_normal((6, 4))) <= 1.0


class TestTotal:
    def test_weights_zero(self, rng):
        cfg = TrainConfig(lambda1=0.0, lambda2=0.0)
        S = rng.standard_normal((3, 4))
        out = total_loss(S, [0, 1, 2], rng.uniform(-0.4, 0.4, (4, 2)), cfg)
        assert out.total == out.cls

    def test_single_sample_single_label(self):
        cfg = TrainConfig()
        out = total_loss(np.array([[0.0]]), [0], np.array([[0.5, 0.0]]), cfg)
        assert out.uni == 0.0
        assert out.total == pytest.approx(math.log(2) + 10.0 * double_well([0.5]), rel=1e-14)

    def test_default_weights_echoed(self, rng):
        out = total_loss(rng.standard_normal((2, 3)), [0, 1], rng.uniform(-0.4, 0.4, (3, 2)), TrainConfig())
        assert (out.lambda1, out.lambda2) == (10.0, 1.0)

    def test_decomposition(self, rng):
        cfg = TrainConfig(lambda1=3.7, lambda2=0.3)
        out = total_loss(rng.standard_normal((5, 4)), [0, 3, 1, 2, 2], rng.uniform(-0.5, 0.5, (4, 3)), cfg)
        assert abs(out.total - (out.cls + 3.7 * out.reg + 0.3 * out.uni)) <= 1e-12
