import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phpcov.errors import MaxSubdivisionsExceeded, NonDecayingIntegrand
from phpcov.quadrature import (
    QuadConfig,
    composite_gl,
    cosine_rule,
    gl_rule,
    integrate,
    integrate_semi_infinite,
    tail_rule,
)


class TestIntegrate:
    def test_polynomial(self):
        v, err = integrate(lambda x: x, 0.0, 1.0)
        assert v == pytest.approx(0.5, rel=1e-14)
        assert err >= 0.0

    def test_sqrt_endpoint(self):
        v, _ = integrate(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, QuadConfig(1e-10, 1e-14))
        assert v == pytest.approx(2.0, rel=1e-8)

    def test_sine(self):
        v, _ = integrate(np.sin, 0.0, math.pi)
        assert v == pytest.approx(2.0, abs=1e-10)

    def test_rayleigh_mass(self):
        v, _ = integrate(lambda r: 2 * np.pi * r * np.exp(-np.pi * r * r), 0.0, 1.0)
        assert v == pytest.approx(1 - math.exp(-math.pi), rel=1e-12)

    def test_kink_point(self):
        f = lambda x: np.abs(x - 1.0 / 3.0)
        v, _ = integrate(f, 0.0, 1.0, points=[1.0 / 3.0])
        assert v == pytest.approx((1 / 9 + 4 / 9) / 2, rel=1e-13)

    def test_empty_interval(self):
        assert integrate(np.sin, 2.0, 2.0) == (0.0, 0.0)

    def test_bad_limits(self):
        with pytest.raises(ValueError):
            integrate(np.sin, 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate(np.sin, 0.0, np.inf)

    def test_subdivision_budget(self):
        f = lambda x: np.sin(1.0 / np.maximum(x, 1e-300))
        with pytest.raises(MaxSubdivisionsExceeded) as info:
            integrate(f, 1e-6, 1.0, QuadConfig(1e-14, 1e-300, max_subdivisions=20))
        assert np.isfinite(info.value.value)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            QuadConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadConfig(max_subdivisions=0)


class TestSemiInfinite:
    def test_exponential(self):
        v, _ = integrate_semi_infinite(lambda x: np.exp(-x), 0.0)
        assert v == pytest.approx(1.0, rel=1e-10)

    def test_rational(self):
        v, _ = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x * x), 0.0)
        assert v == pytest.approx(math.pi / 2, rel=1e-8)

    def test_quartic_kernel(self):
        # int_0^inf r / (1 + r^4) dr = pi / 4
        v, _ = integrate_semi_infinite(lambda r: r / (1 + r**4), 0.0)
        assert v == pytest.approx(math.pi / 4, rel=1e-8)

    @pytest.mark.parametrize("lam,c", [(1.0, 1.0), (2.5, 0.3), (1e-4, 1e6)])
    def test_laplace_kernel(self, lam, c):
        f = lambda r: 2 * np.pi * lam * r / (1 + r**4 / c)
        v, _ = integrate_semi_infinite(f, 0.0, scale=c**0.25)
        assert v == pytest.approx(math.pi**2 * lam * math.sqrt(c) / 2, rel=1e-8)

    def test_arctan_tail(self):
        # 1 - 1 / (1 + x) written as x / (1 + x) so the far tail does not cancel to zero
        v, _ = integrate_semi_infinite(lambda v: v**-4.0 / (1 + v**-4.0) * v, 1.0)
        assert v == pytest.approx(math.pi / 8, rel=1e-8)

    @pytest.mark.parametrize("alpha", [2.1, 2.5, 3.0])
    def test_slow_algebraic_decay(self, alpha):
        # int_0^inf r / (1 + r^alpha) dr = pi / (alpha sin(2 pi / alpha))
        v, _ = integrate_semi_infinite(lambda r: r / (1 + r**alpha), 0.0, QuadConfig(1e-10, 1e-14))
        assert v == pytest.approx(math.pi / (alpha * math.sin(2 * math.pi / alpha)), rel=1e-8)

    def test_matches_truncation_plus_tail(self):
        f = lambda r: r * np.exp(-0.3 * r * r)
        full, _ = integrate_semi_infinite(f, 0.0, scale=2.0)
        head, _ = integrate(f, 0.0, 5.0)
        tail, _ = integrate_semi_infinite(f, 5.0, scale=2.0)
        assert full == pytest.approx(head + tail, rel=1e-10)

    def test_not_decaying(self):
        with pytest.raises(NonDecayingIntegrand):
            integrate_semi_infinite(lambda x: np.ones_like(x), 0.0)
        with pytest.raises(NonDecayingIntegrand):
            integrate_semi_infinite(lambda x: 1.0 / (1.0 + x), 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(0.01, 5))
def test_additive_over_split(a, w1, w2):
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    b, c = a + w1, a + w1 + w2
    whole, _ = integrate(f, a, c)
    left, _ = integrate(f, a, b)
    right, _ = integrate(f, b, c)
    assert whole == pytest.approx(left + right, rel=1e-8, abs=1e-12)


class TestFixedRules:
    def test_gl_exact_for_polynomials(self):
        x, w = gl_rule(0.0, 2.0, 5)
        assert np.sum(w * x**9) == pytest.approx(2.0**10 / 10, rel=1e-13)

    def test_gl_broadcast(self):
        x, w = gl_rule(np.zeros(3), np.array([1.0, 2.0, 3.0]), 4)
        assert x.shape == (3, 4)
        assert np.allclose(w.sum(axis=1), [1.0, 2.0, 3.0])

    def test_cosine_rule_arccos_endpoint(self):
        # int_{-1}^{1} arccos(x) dx = pi
        x, w = cosine_rule(-1.0, 1.0, 32)
        assert np.sum(w * np.arccos(x)) == pytest.approx(math.pi, rel=1e-12)
        x, w = cosine_rule(-1.0, 1.0, 32)
        assert np.sum(w * np.sqrt(1 - x * x)) == pytest.approx(math.pi / 2, rel=1e-10)

    def test_tail_rule(self):
        x, w = tail_rule(1.0, 1.0, 48)
        assert np.sum(w * np.exp(-x)) == pytest.approx(math.exp(-1), rel=1e-10)

    def test_composite_sorted_and_zero_width(self):
        x, w = composite_gl(np.array([0.0, 1.0, 1.0, 3.0]), 6, sub=2)
        assert x.shape == (3 * 2 * 6,)
        assert np.all(np.diff(x) >= 0)
        assert np.sum(w) == pytest.approx(3.0, rel=1e-14)
        assert np.sum(w * x**3) == pytest.approx(81 / 4, rel=1e-13)
