"""Circle-circle intersection quantities.

All functions accept scalars or broadcastable numpy arrays. Scalar inputs
give numpy float scalars back.

The two helper functions ``fn_A`` and ``fn_B`` are the building blocks of
the lens area in the partial-overlap regime::

    lens = fn_B(r_hole, r, d) + fn_B(r, r_hole, d) - 0.5 * fn_A(r_hole, r, d)

where ``r`` is the radius of the circle centered at the origin and
``r_hole`` the radius of the circle whose center is ``d`` away.
"""

from typing import NamedTuple

import numpy as np

from .errors import ArgumentOutOfRange, NegativeRadicand, OutsideOverlapRegime

#: arccos arguments within this distance of +-1 are clamped, beyond it they raise.
CLAMP_TOL = 1e-9


class LensQuery(NamedTuple):
    r_centered: float
    r_hole: float
    d: float


def _clamped_arccos(arg):
    arg = np.asarray(arg, dtype=float)
    if np.any(np.abs(arg) > 1.0 + CLAMP_TOL):
        raise ArgumentOutOfRange(f"arccos argument out of range: {arg[np.abs(arg) > 1.0 + CLAMP_TOL]}")
    return np.arccos(np.clip(arg, -1.0, 1.0))


def fn_A(kappa, zeta, eta):
    """Root term ``sqrt((k^2 - (e - z)^2) * ((z + e)^2 - k^2))``.

    This is four times the area of the triangle with sides ``kappa``,
    ``zeta`` and ``eta``; it is real only when the three lengths satisfy
    the triangle inequality.
    """
    kappa, zeta, eta = (np.asarray(v, dtype=float) for v in (kappa, zeta, eta))
    rad = (kappa**2 - (eta - zeta) ** 2) * ((zeta + eta) ** 2 - kappa**2)
    scale = np.maximum((kappa + zeta + eta) ** 4, np.finfo(float).tiny)
    if np.any(rad < -CLAMP_TOL * scale):
        raise NegativeRadicand("geometry outside the partial-overlap regime")
    return np.sqrt(np.maximum(rad, 0.0))


def fn_B(kappa, zeta, eta):
    """Sector term ``kappa^2 * arccos((k^2 - z^2 + e^2) / (2 k e))``."""
    kappa, zeta, eta = (np.asarray(v, dtype=float) for v in (kappa, zeta, eta))
    if np.any(kappa <= 0) or np.any(eta <= 0):
        raise ArgumentOutOfRange("fn_B needs kappa > 0 and eta > 0")
    arg = (kappa**2 - zeta**2 + eta**2) / (2.0 * kappa * eta)
    return kappa**2 * _clamped_arccos(arg)


def _regimes(r, r_hole, d):
    disjoint = d >= r + r_hole
    # one disc inside the other (includes d == 0)
    nested = d <= np.abs(r - r_hole)
    partial = ~(disjoint | nested)
    return disjoint, nested, partial


def _x_minus_sin(x):
    """``x - sin(x)`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    x2 = x * x
    series = x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    return np.where(small, series, x - np.sin(x))


def _lens_partial(r1, r2, d):
    """Lens area for partially overlapping discs as the sum of two circular segments.

    Equal to ``fn_B(r2, r1, d) + fn_B(r1, r2, d) - 0.5 * fn_A(r2, r1, d)``, but
    each segment ``r^2 (2t - sin 2t) / 2`` is formed from its half-angle
    ``t`` directly, which avoids the cancellation of the sector-minus-triangle
    form near tangency.
    """
    scale = np.maximum(np.maximum(r1, r2), d)
    r1, r2, d = r1 / scale, r2 / scale, d / scale
    # four times the triangle area; each factor is formed without cancellation
    quad = (r1 + r2 - d) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    tri4 = np.sqrt(np.maximum(quad, 0.0))
    t1 = np.arctan2(tri4, d * d + r1 * r1 - r2 * r2)
    t2 = np.arctan2(tri4, d * d + r2 * r2 - r1 * r1)
    seg = 0.5 * (r1 * r1 * _x_minus_sin(2.0 * t1) + r2 * r2 * _x_minus_sin(2.0 * t2))
    return seg * scale * scale


def lens_area(r_centered, r_hole, d):
    """Area of ``b(0, r_centered)`` intersected with a disc of radius ``r_hole`` at distance ``d``.

    Total over nonnegative inputs: disjoint discs give 0 and nested discs
    give the area of the smaller one.
    """
    r, rh, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r_centered, r_hole, d)))
    if np.any(r < 0) or np.any(rh < 0) or np.any(d < 0):
        raise ValueError("lens_area needs nonnegative radii and separation")
    disjoint, nested, partial = _regimes(r, rh, d)
    out = np.zeros(r.shape)
    out[nested] = np.pi * np.minimum(r, rh)[nested] ** 2
    if np.any(partial):
        out[partial] = _lens_partial(r[partial], rh[partial], d[partial])
    out = np.clip(out, 0.0, np.pi * np.minimum(r, rh) ** 2)
    return out[()] if out.ndim == 0 else out


def arc_inside(r_centered, r_hole, d):
    """Length of the circle ``|x| = r_centered`` lying inside the hole disc.

    Equals the derivative of :func:`lens_area` with respect to
    ``r_centered`` wherever that derivative exists: 0 for disjoint discs or
    when the hole sits inside the centered circle, the full circumference
    when the centered circle sits inside the hole.
    """
    r, rh, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r_centered, r_hole, d)))
    out = np.zeros(r.shape)
    inside_hole = r + d <= rh
    out[inside_hole] = 2.0 * np.pi * r[inside_hole]
    partial = (np.abs(d - rh) < r) & (r < d + rh) & ~inside_hole
    if np.any(partial):
        rp, hp, dp = r[partial], rh[partial], d[partial]
        out[partial] = 2.0 * rp * _clamped_arccos((rp**2 + dp**2 - hp**2) / (2.0 * rp * dp))
    return out[()] if out.ndim == 0 else out


def lens_area_dr(r_centered, r_hole, d):
    """Derivative of :func:`lens_area` with respect to ``r_centered``.

    Only defined in the partial-overlap regime
    ``|d - r_hole| < r_centered < d + r_hole``; use :func:`arc_inside` for a
    version that is total.
    """
    r, rh, d = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r_centered, r_hole, d)))
    ok = (np.abs(d - rh) < r) & (r < d + rh)
    if not np.all(ok):
        raise OutsideOverlapRegime("lens_area_dr is only defined for partially overlapping circles")
    return arc_inside(r, rh, d)
