import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import g_oracle
from varfdw.exponent import (
    ConstantExponent,
    PolyOffsetExponent,
    SineOffsetExponent,
    TransitionExponent,
    eval_alpha,
    eval_g,
    g_quadrature,
    make_transition_exponent,
    smooth_exponent,
)


def test_family_values():
    assert eval_alpha(ConstantExponent(1.5), 0.3) == 1.5
    assert eval_alpha(PolyOffsetExponent(1.2, 0.5, 3, T=0.5), 0.5) == pytest.approx(1.2625)
    assert eval_alpha(SineOffsetExponent(1.4, 1 / 8), 0.0) == 1.4


def test_alpha0_is_exact_value_at_zero():
    f = SineOffsetExponent(1.85, 1 / 8)
    assert f.alpha0 == f(0.0)


def test_rejects_exponent_leaving_range():
    with pytest.raises(ValueError):
        PolyOffsetExponent(1.9, 0.5, 3, T=1.0)
    with pytest.raises(ValueError):
        ConstantExponent(2.0)
    with pytest.raises(ValueError):
        eval_alpha(ConstantExponent(1.5, T=1.0), 1.5)


def test_transition_endpoints_and_midpoint():
    f = make_transition_exponent(1.4, 1.9, 15.0)
    assert f(0.0) == 1.9
    assert f(15.0) == pytest.approx(1.4, abs=1e-15)
    assert f(7.5) == pytest.approx(1.65, abs=1e-14)
    t = np.linspace(0, 15, 301)
    assert np.all(np.diff(f(t)) <= 1e-15)


def test_transition_held_after_horizon():
    f = TransitionExponent(1.4, 1.9, horizon=1.0, T=15.0)
    assert f(1.0) == pytest.approx(1.4, abs=1e-15)
    assert np.all(f(np.linspace(1, 15, 50)) == 1.4)
    assert f.derivative(1.0 + 1e-9, 1) == 0.0


@pytest.mark.parametrize("f", [
    PolyOffsetExponent(1.5, 0.5, 3, T=0.5),
    SineOffsetExponent(1.4, 1 / 8),
    TransitionExponent(1.4, 1.9, horizon=1.0, T=15.0),
])
def test_derivatives_match_finite_differences(f):
    t = np.linspace(0.05, min(f.T, 0.9) - 0.05, 7)
    for order in (1, 2, 3):
        h = 1e-4
        fd = (f.derivative(t + h, order - 1) - f.derivative(t - h, order - 1)) / (2 * h)
        assert np.allclose(f.derivative(t, order), fd, rtol=1e-5, atol=1e-5)


class TestSmoothed:
    base = SineOffsetExponent(1.4, 1 / 8)

    def test_pieces(self):
        s = smooth_exponent(self.base, 0.1)
        assert s(0.05) == 1.4
        assert s(0.5) == pytest.approx(1.4 + np.sin(0.5) / 8, abs=1e-15)
        assert s.derivative(0.0, 1) == 0.0 and s.derivative(0.0, 2) == 0.0

    def test_matches_base_at_two_sigma(self):
        sig = 0.1
        s = smooth_exponent(self.base, sig)
        # left limits of the joining polynomial at 2σ
        for order in range(4):
            assert s._poly(2 * sig, order) == pytest.approx(self.base.derivative(2 * sig, order), abs=1e-8)
        h = 1e-6
        slope = (s(2 * sig) - s(2 * sig - h)) / h
        assert slope == pytest.approx(self.base.derivative(2 * sig, 1), abs=1e-6)

    def test_matches_constant_at_sigma(self):
        s = smooth_exponent(self.base, 0.1)
        assert s._poly(0.1, 0) == pytest.approx(1.4, abs=1e-14)
        for order in (1, 2, 3):
            assert s._poly(0.1, order) == pytest.approx(0.0, abs=1e-10)

    def test_rejects_large_sigma(self):
        with pytest.raises(ValueError):
            smooth_exponent(self.base, 0.6)

    def test_sup_distance_linear_in_sigma(self):
        t = np.linspace(0, 1, 20001)
        d = [np.max(np.abs(self.base(t) - smooth_exponent(self.base, s)(t))) for s in (0.04, 0.02, 0.01)]
        assert d[0] / d[1] == pytest.approx(2.0, abs=0.3)
        assert d[1] / d[2] == pytest.approx(2.0, abs=0.3)


class TestG:
    def test_g_at_zero(self):
        assert eval_g(SineOffsetExponent(1.4, 1 / 8), 0.0) == 1.0

    @pytest.mark.parametrize("a0", [1.1, 1.5, 1.95])
    def test_constant_exponent_gives_one(self, a0):
        t = np.linspace(0, 1, 100)
        assert np.max(np.abs(eval_g(ConstantExponent(a0), t) - 1)) < 1e-12

    @pytest.mark.parametrize("f, t", [
        (PolyOffsetExponent(1.5, 0.5, 3, T=0.5), 0.5),
        (PolyOffsetExponent(1.2, 0.5, 3, T=0.5), 1 / 64),
        (SineOffsetExponent(1.4, 1 / 8), 0.7),
        (SineOffsetExponent(1.85, 1 / 8), 1.0),
        (TransitionExponent(1.4, 1.9, horizon=1.0, T=15.0), 3.0),
    ])
    def test_against_adaptive_oracle(self, f, t):
        assert eval_g(f, t) == pytest.approx(g_oracle(f, t), rel=1e-10)

    def test_node_doubling_consistency(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        t = np.linspace(0, 1, 65)
        g16 = eval_g(f, t, g_quadrature(f.alpha0, n=16))
        g64 = eval_g(f, t, g_quadrature(f.alpha0, n=64))
        assert np.max(np.abs(g16 - g64)) <= 1e-12

    def test_vectorized_equals_scalar(self):
        f = TransitionExponent(1.4, 1.9, horizon=1.0, T=15.0)
        t = np.array([0.3, 1.0, 2.5, 15.0])
        assert np.allclose(eval_g(f, t), [eval_g(f, s) for s in t], rtol=1e-13)

    def test_rejects_mismatched_rule_and_negative_time(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        with pytest.raises(ValueError):
            eval_g(f, 0.5, g_quadrature(1.5))
        with pytest.raises(ValueError):
            eval_g(f, -0.1)

    def test_cap_reached(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        with pytest.raises(RuntimeError):
            eval_g(f, 0.5, g_quadrature(f.alpha0, n=4, rel_tol=1e-30, max_nodes=16))

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1.05, 1.95), st.floats(-0.04, 0.04))
    def test_bounded_and_continuous(self, a0, amp):
        f = SineOffsetExponent(a0, amp)
        t = np.linspace(0, 1, 41)
        g = eval_g(f, t)
        assert np.all(np.isfinite(g)) and np.max(np.abs(g)) < 10
        assert np.max(np.abs(np.diff(g))) < 0.1
