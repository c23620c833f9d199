"""Distance from the typical user to its nearest macro and nearest small cell.

``Z1`` (nearest macro) is Rayleigh. For the small-cell tier only the hole
of the nearest macro is carved out of the baseline PPP, which gives a
variable ``Z2hat`` that is stochastically smaller than the true ``Z2``:
conditioned on ``Z1 = z1``, ``P(Z2hat > z) = exp(-lambda2 * (pi z^2 - lens))``
where ``lens`` is the area of ``b(0, z)`` covered by the hole ``b(z1, D)``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, RootNotBracketed
from .geometry import arc_inside, lens_area
from .params import NetworkParams
from .pointprocess import RngStream
from .quadrature import QuadConfig, integrate

#: densities below this are treated as zero when truncating infinite integrals
TRUNC_EPS = 1e-16


def pdf_z1(z1, lambda1):
    z1 = np.asarray(z1, dtype=float)
    out = np.where(z1 > 0, 2.0 * np.pi * lambda1 * z1 * np.exp(-np.pi * lambda1 * z1**2), 0.0)
    return out[()] if out.ndim == 0 else out


def survival_z1(z1, lambda1):
    z1 = np.maximum(np.asarray(z1, dtype=float), 0.0)
    out = np.exp(-np.pi * lambda1 * z1**2)
    return out[()] if out.ndim == 0 else out


def z1_truncation(lambda1, eps=TRUNC_EPS):
    """Radius beyond which the Rayleigh mass of ``Z1`` is below ``eps``."""
    return math.sqrt(math.log(1.0 / eps) / (math.pi * lambda1))


def z2_truncation(params, eps=TRUNC_EPS):
    """Radius beyond which ``P(Z2hat > z) < eps`` for every ``z1``."""
    return math.sqrt(math.log(1.0 / eps) / (math.pi * params.lambda2) + params.D**2)


@dataclass(frozen=True)
class ConditionalDistanceDist:
    """Law of ``Z2hat`` given the nearest-macro distance ``z1``."""

    params: NetworkParams
    z1: float

    def __post_init__(self):
        if not self.z1 > 0:
            raise DomainError("conditioning distance z1 must be positive")

    @property
    def support_start(self):
        return max(self.params.D - self.z1, 0.0)

    @property
    def kinks(self):
        D, z1 = self.params.D, self.z1
        return tuple(sorted({abs(z1 - D), z1 + D}))

    def survival(self, z):
        return survival_z2hat(z, self)

    def pdf(self, z):
        return pdf_z2hat(z, self)

    def sample(self, rng, size=None):
        return sample_z2hat(self, rng, size)


def exposed_area(z, z1, D):
    """Area of ``b(0, z)`` outside the hole ``b(z1, D)``."""
    return np.pi * np.asarray(z, dtype=float) ** 2 - lens_area(z, D, z1)


def survival_z2hat(z2hat, cond):
    p = cond.params
    z = np.maximum(np.asarray(z2hat, dtype=float), 0.0)
    out = np.exp(-p.lambda2 * np.maximum(exposed_area(z, cond.z1, p.D), 0.0))
    return out[()] if out.ndim == 0 else out


def pdf_z2hat(z2hat, cond):
    """Density of ``Z2hat`` given ``Z1 = cond.z1``; exactly 0 outside the support.

    A single expression covers every branch: the derivative of the exposed
    area is ``2 pi z`` minus the arc of ``|x| = z`` inside the hole, which is
    the full circle inside the hole, a partial arc across it, and zero once
    the circle clears it.
    """
    p = cond.params
    z = np.maximum(np.asarray(z2hat, dtype=float), 0.0)
    dexposed = 2.0 * np.pi * z - arc_inside(z, p.D, cond.z1)
    out = p.lambda2 * np.maximum(dexposed, 0.0) * survival_z2hat(z, cond)
    out = np.where(z > cond.support_start, out, 0.0)
    return out[()] if out.ndim == 0 else out


def _z1_breaks(z, D, z1_max):
    pts = [D, D - z, z - D, z + D]
    return sorted({q for q in pts if 0.0 < q < z1_max})


def marginal_pdf_z2hat(z2hat, params, cfg=None):
    """Density of ``Z2hat`` after averaging over ``Z1``.

    Scalar ``z2hat`` only; use :func:`marginal_pdf_z2hat_grid` for arrays.
    """
    cfg = cfg or QuadConfig(rel_tol=1e-9, abs_tol=1e-16)
    z = float(z2hat)
    if z <= 0:
        return 0.0
    z1_max = z1_truncation(params.lambda1)

    def integrand(z1):
        return _cond_pdf_vec(z, z1, params) * pdf_z1(z1, params.lambda1)

    val, _ = integrate(integrand, 0.0, z1_max, cfg, points=_z1_breaks(z, params.D, z1_max))
    return val


def marginal_survival_z2hat(z2hat, params, cfg=None):
    """``P(Z2hat > z)`` after averaging over ``Z1`` (scalar ``z2hat``)."""
    cfg = cfg or QuadConfig(rel_tol=1e-10, abs_tol=1e-16)
    z = float(z2hat)
    if z <= 0:
        return 1.0
    z1_max = z1_truncation(params.lambda1)
    D = params.D

    def integrand(z1):
        return np.exp(-params.lambda2 * np.maximum(exposed_area(z, z1, D), 0.0)) * pdf_z1(z1, params.lambda1)

    val, _ = integrate(integrand, 0.0, z1_max, cfg, points=_z1_breaks(z, D, z1_max))
    return min(val, 1.0)


def marginal_cdf_z2hat(z2hat, params, cfg=None):
    z = np.asarray(z2hat, dtype=float)
    out = np.array([1.0 - marginal_survival_z2hat(v, params, cfg) for v in z.ravel()]).reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def marginal_pdf_z2hat_grid(z, params, cfg=None):
    z = np.asarray(z, dtype=float)
    out = np.array([marginal_pdf_z2hat(v, params, cfg) for v in z.ravel()]).reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def _cond_pdf_vec(z, z1, params):
    """``pdf_z2hat`` for fixed ``z`` and an array of ``z1`` (no object per node)."""
    z1 = np.asarray(z1, dtype=float)
    D = params.D
    dexposed = 2.0 * np.pi * z - arc_inside(z, D, z1)
    surv = np.exp(-params.lambda2 * np.maximum(exposed_area(z, z1, D), 0.0))
    return np.where(z > D - z1, params.lambda2 * np.maximum(dexposed, 0.0) * surv, 0.0)


def sample_z2hat(cond, rng, size=None, iters=200):
    """Inverse-transform samples of ``Z2hat`` given ``Z1 = cond.z1``.

    Solves ``lambda2 * exposed_area(z) = -log(u)`` by vectorised bisection;
    the exposed area is continuous and strictly increasing past the support
    start, and is bracketed by ``pi (z^2 - D^2)`` from below.
    """
    p = cond.params
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    u = gen.random(size)
    target = -np.log1p(-u) / p.lambda2  # exposed area to reach; 1 - u is uniform too
    lo = np.full(np.shape(u), cond.support_start)
    # the bound is tight when the hole is fully inside b(0, z); widen it past rounding
    hi = np.sqrt(target / np.pi + p.D**2) * (1.0 + 1e-9) + 1e-12
    f_lo = exposed_area(lo, cond.z1, p.D) - target
    f_hi = exposed_area(hi, cond.z1, p.D) - target
    if np.any(f_lo > 0) or np.any(f_hi < 0):
        raise RootNotBracketed("inverse-transform bracket does not contain the root")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = exposed_area(mid, cond.z1, p.D) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * hi):
            break
    out = 0.5 * (lo + hi)
    return out[()] if np.ndim(out) == 0 else out
