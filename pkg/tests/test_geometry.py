import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phpcov.errors import ArgumentOutOfRange, NegativeRadicand, OutsideOverlapRegime
from phpcov.geometry import LensQuery, arc_inside, fn_A, fn_B, lens_area, lens_area_dr


def dart_lens_area(r, r_hole, d, n, seed=0, chunk=2_000_000):
    """Uniform darts in the bounding box of the smaller-extent region."""
    rng = np.random.default_rng(seed)
    x0, x1 = max(-r, d - r_hole), min(r, d + r_hole)
    y0, y1 = -min(r, r_hole), min(r, r_hole)
    if x1 <= x0:
        return 0.0
    hits = 0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        x = rng.uniform(x0, x1, m)
        y = rng.uniform(y0, y1, m)
        hits += np.count_nonzero((x * x + y * y <= r * r) & ((x - d) ** 2 + y * y <= r_hole * r_hole))
        done += m
    return hits / n * (x1 - x0) * (y1 - y0)


def central_diff(r, r_hole, d, h=1e-6):
    return (lens_area(r + h, r_hole, d) - lens_area(r - h, r_hole, d)) / (2 * h)


class TestFnA:
    def test_equilateral(self):
        assert fn_A(1, 1, 1) == pytest.approx(math.sqrt(3), rel=1e-15)
        mp = mpmath.sqrt((1 - 0) * (4 - 1))
        assert float(mp) == pytest.approx(float(fn_A(1, 1, 1)), rel=1e-15)

    def test_tangency_is_zero(self):
        assert fn_A(2, 1, 1) == 0.0

    def test_generic(self):
        mp = mpmath.sqrt((1 - mpmath.mpf("0.01")) * (mpmath.mpf("1.21") - 1))
        assert fn_A(1, 0.5, 0.6) == pytest.approx(float(mp), rel=1e-12)
        assert fn_A(1, 0.5, 0.6) == pytest.approx(0.455961, abs=1e-6)

    def test_outside_overlap_raises(self):
        with pytest.raises(NegativeRadicand):
            fn_A(3, 1, 1)


class TestFnB:
    def test_values(self):
        assert fn_B(1, 1, 1) == pytest.approx(math.pi / 3, rel=1e-14)
        assert fn_B(1, 0, 1) == 0.0
        assert fn_B(1, math.sqrt(2), 1) == pytest.approx(math.pi / 2, rel=1e-14)

    def test_out_of_range(self):
        with pytest.raises(ArgumentOutOfRange):
            fn_B(1, 3, 1)

    def test_clamps_rounding_noise(self):
        # argument is 1 up to rounding
        assert fn_B(0.1, 0.2, 0.3) == pytest.approx(0.0, abs=1e-6)


class TestLensArea:
    def test_disjoint(self):
        assert lens_area(1, 1, 3) == 0.0

    def test_containment(self):
        assert lens_area(1, 3, 0.5) == pytest.approx(math.pi)
        assert lens_area(3, 1, 0.5) == pytest.approx(math.pi)

    def test_equal_circles(self):
        assert lens_area(1, 1, 1) == pytest.approx(2 * math.pi / 3 - math.sqrt(3) / 2, rel=1e-14)

    def test_equal_circles_darts(self):
        est = dart_lens_area(1.0, 1.0, 1.0, 10_000_000, seed=1)
        assert abs(est - lens_area(1, 1, 1)) < 1e-3

    def test_query_tuple(self):
        assert lens_area(*LensQuery(1.0, 1.0, 3.0)) == 0.0

    def test_vectorised(self):
        out = lens_area(np.array([1.0, 1.0, 1.0]), 1.0, np.array([3.0, 1.0, 0.0]))
        assert out.shape == (3,)
        assert out[2] == pytest.approx(math.pi)


class TestLensAreaDr:
    def test_equal_circles(self):
        assert lens_area_dr(1, 1, 1) == pytest.approx(2 * math.pi / 3, rel=1e-14)
        assert lens_area_dr(1, 1, 1) == pytest.approx(central_diff(1, 1, 1), rel=1e-6)

    def test_tangency_limit(self):
        assert lens_area_dr(1, 1, 2 - 1e-10) < 1e-4

    def test_finite_difference_generic(self):
        assert lens_area_dr(0.5, 1, 1.2) == pytest.approx(central_diff(0.5, 1, 1.2), rel=1e-6)

    def test_outside_regime(self):
        with pytest.raises(OutsideOverlapRegime):
            lens_area_dr(1, 1, 3)

    def test_arc_inside_is_total(self):
        assert arc_inside(1, 1, 3) == 0.0
        assert arc_inside(0.5, 3, 1) == pytest.approx(math.pi)
        assert arc_inside(5, 1, 1) == 0.0

    def test_randomised_finite_differences(self):
        rng = np.random.default_rng(7)
        n = 0
        while n < 1000:
            rh, d = rng.uniform(0.1, 10.0, 2)
            lo, hi = abs(d - rh), d + rh
            # keep away from the regime edges where the slope vanishes or kinks
            r = rng.uniform(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo))
            if r < 1e-3:
                continue
            assert lens_area_dr(r, rh, d) == pytest.approx(central_diff(r, rh, d), rel=1e-6)
            n += 1


radius = st.floats(0.0, 100.0, allow_nan=False)


@given(radius, radius, radius)
def test_symmetric_in_radii(r1, r2, d):
    assert lens_area(r1, r2, d) == pytest.approx(lens_area(r2, r1, d), rel=1e-9, abs=1e-9)


@given(radius, radius, radius)
def test_bounded(r1, r2, d):
    a = lens_area(r1, r2, d)
    assert 0.0 <= a <= math.pi * min(r1, r2) ** 2 + 1e-12


@given(st.floats(0.01, 100.0), st.floats(0.01, 100.0))
def test_continuous_at_tangency(r1, r2):
    outer = r1 + r2
    assert abs(lens_area(r1, r2, outer - 1e-9) - lens_area(r1, r2, outer + 1e-9)) < 1e-6
    inner = abs(r1 - r2)
    if inner > 1e-6:
        assert abs(lens_area(r1, r2, inner - 1e-9) - lens_area(r1, r2, inner + 1e-9)) < 1e-6


def composed_mp(r, rh, d, dps=50):
    """Sector-minus-triangle composition evaluated in high precision."""
    with mpmath.workdps(dps):
        r, rh, d = (mpmath.mpf(v) for v in (r, rh, d))
        sector = lambda k, z, e: k**2 * mpmath.acos((k**2 - z**2 + e**2) / (2 * k * e))
        tri = mpmath.sqrt((rh**2 - (r - d) ** 2) * ((d + r) ** 2 - rh**2))
        return sector(rh, r, d) + sector(r, rh, d) - tri / 2


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 50.0), st.floats(0.1, 50.0), st.floats(0.05, 0.95))
def test_matches_composition(r, rh, frac):
    lo, hi = abs(r - rh), r + rh
    d = lo + frac * (hi - lo)
    assert lens_area(r, rh, d) == pytest.approx(float(composed_mp(r, rh, d)), rel=1e-12)


def test_near_tangency_against_high_precision():
    for r, rh, d in [(1.0, 74.0, 75 - 1e-9), (34.0, 0.01171875, 33.98828125 + 1e-9), (5.0, 5.0, 10 - 1e-12)]:
        assert lens_area(r, rh, d) == pytest.approx(float(composed_mp(r, rh, d)), rel=1e-6)
