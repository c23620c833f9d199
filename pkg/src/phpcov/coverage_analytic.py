"""Analytic coverage probability for closed-access users of each tier.

Four evaluators are provided:

=====================================  ============  ===================================
function                               served by     treatment of the small-cell holes
=====================================  ============  ===================================
:func:`macro_coverage_lower`           macro         nearest hole only (lower bound)
:func:`macro_coverage_upper`           macro         every hole, overlaps ignored (upper bound)
:func:`small_coverage_closest_hole`    small cell    nearest hole only
:func:`small_coverage_all_holes`       small cell    every hole, overlaps ignored
=====================================  ============  ===================================

Every factor is a Laplace transform of interference under Rayleigh
fading, with ``s = gamma * d**alpha / P`` evaluated at the serving distance.
The recurring radial kernel ``int_a^inf r / (1 + r^alpha / c) dr`` has a
closed form through the regularised incomplete beta function
(:func:`laplace_tail`), and the hole corrections are one-dimensional
integrals over the annulus crossed by a hole (:func:`hole_integral`).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.special import betainc

from .curves import CoverageCurve
from .errors import DomainError
from .geometry import arc_inside, lens_area
from .params import db_to_linear
from .quadrature import OUTER, QuadConfig, composite_gl, cosine_rule, gl_rule, integrate, tail_rule
from .serving_distance import pdf_z1, z1_truncation, z2_truncation

# fixed-rule orders for vectorised inner integrals (accuracy pinned in tests)
N_HOLE = 32  # radial nodes across a hole
N_Z1 = 16  # nodes per z1 sub-panel
SUB_Z1 = 3  # sub-panels per z1 panel
N_GAP = 5  # nodes per gap in cumulative sums
N_TAIL = 48  # nodes on [a, inf)
BATCH = 24  # outer abscissae evaluated together (bounds memory)


class IntegrandSignWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SirThreshold:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("SIR threshold must be positive")

    @classmethod
    def from_db(cls, gamma_db):
        return cls(db_to_linear(gamma_db))

    @property
    def db(self):
        return 10.0 * math.log10(self.gamma)

    def __float__(self):
        return float(self.gamma)


def _kernel(r, c, alpha):
    """``1 / (1 + r^alpha / c)`` written so that ``c = 0`` gives 0."""
    c = np.asarray(c, dtype=float)
    rp = np.asarray(r, dtype=float) ** alpha
    den = c + rp
    return np.divide(c, den, out=np.zeros(np.broadcast(c, den).shape), where=den > 0)


def laplace_tail(a, c, alpha):
    """``int_a^inf r / (1 + r^alpha / c) dr`` for ``a >= 0``, ``c >= 0``.

    With ``p = 2 / alpha`` this equals
    ``c^p / alpha * B(1 - p, p) * I_x(1 - p, p)``, ``x = 1 / (1 + a^alpha / c)``.
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    p = 2.0 / alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(c > 0, 1.0 / (1.0 + a**alpha / np.where(c > 0, c, 1.0)), 0.0)
        out = np.where(c > 0, c**p / alpha * (math.pi / math.sin(math.pi * p)) * betainc(1.0 - p, p, x), 0.0)
    return out[()] if out.ndim == 0 else out


def zeta(s, v, P1, alpha):
    """Laplace factor ``1 / (1 + s P1 v^-alpha)`` of one Rayleigh-faded macro at distance ``v``."""
    v = np.asarray(v, dtype=float)
    # v = 0 only occurs at zero-weight nodes; 1 / (1 + inf) = 0 is the right limit
    with np.errstate(divide="ignore"):
        return 1.0 / (1.0 + s * P1 * v ** (-alpha))


def g1_hat(s, lambda2, P2, alpha):
    """Laplace factor of a whole-plane PPP of small cells."""
    c = np.asarray(s, dtype=float) * P2
    return np.exp(-math.pi * lambda2 * c ** (2.0 / alpha) / np.sinc(2.0 / alpha))


def g1_inside(s, z1, params):
    """Laplace factor of the baseline PPP outside ``b(0, D - z1)``; needs ``0 < z1 < D``."""
    z1 = np.asarray(z1, dtype=float)
    if np.any(z1 <= 0) or np.any(z1 >= params.D):
        raise DomainError("g1_inside needs 0 < z1 < D; use g1_hat otherwise")
    p = params
    return np.exp(-2.0 * math.pi * p.lambda2 * laplace_tail(p.D - z1, np.asarray(s) * p.P2, p.alpha))


def hole_integral(s, u, z2hat, params, n=None):
    """Interference exponent removed by one hole at distance ``u``, beyond radius ``z2hat``.

    ``lambda2 * int (arc of |x| = r inside b(u, D)) / (1 + r^alpha / (s P2)) dr``
    over ``r`` from ``max(z2hat, |u - D|)`` to ``max(z2hat, u + D)``.
    Broadcasts over ``s``, ``u`` and ``z2hat``.
    """
    p = params
    s, u, z2hat = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (s, u, z2hat)))
    if p.D == 0:
        return np.zeros(s.shape)[()]
    lo = np.maximum(z2hat, np.abs(u - p.D))
    hi = np.maximum(z2hat, u + p.D)
    r, w = cosine_rule(lo, hi, n or N_HOLE)
    uu = u[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        cosang = (r * r + uu * uu - p.D * p.D) / (2.0 * uu * r)
    arc = 2.0 * r * np.arccos(np.clip(np.nan_to_num(cosang, nan=1.0), -1.0, 1.0))
    k = _kernel(r, (s * p.P2)[..., None], p.alpha)
    out = p.lambda2 * np.sum(w * arc * k, axis=-1)
    return out[()] if out.ndim == 0 else out


def f_removed(s, z1, params):
    """Hole correction of the macro at ``z1`` over its whole hole; ``G2 = exp(f_removed)``."""
    return hole_integral(s, z1, 0.0, params)


def g_removed(s, z1, z2hat, params):
    """Hole correction restricted to radii beyond the serving small-cell distance.

    Written as ``g = int(...)`` with ``G2 = exp(g)``; the nested ``exp`` that
    appears in some printed statements of this factor is a typo, since the
    derivation multiplies by ``exp`` of the integral exactly once.
    """
    return hole_integral(s, z1, z2hat, params)


# ---------------------------------------------------------------------------
# macro tier


def _hole_correction_tail(s, z1, params, z2hat=0.0):
    """``int_{z1}^inf (exp(h(s, v)) - 1) zeta(s, v) v dv`` where ``h`` is the hole exponent.

    Arrays ``s``, ``z1`` and ``z2hat`` broadcast together. The integrand has a
    kink at ``v = D`` so ``[z1, max(z1, D)]`` is a separate panel.
    """
    p = params
    s, z1, z2hat = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (s, z1, z2hat)))
    if p.D == 0:
        return np.zeros(s.shape)
    knee = np.maximum(z1, p.D)
    v1, w1 = gl_rule(z1, knee, N_TAIL // 2)
    scale = np.maximum.reduce([knee, (s * p.P1) ** (1.0 / p.alpha), np.full(s.shape, p.D)])
    v2, w2 = tail_rule(knee, scale, N_TAIL)
    v = np.concatenate([v1, v2], axis=-1)
    w = np.concatenate([w1, w2], axis=-1)
    h = hole_integral(s[..., None], v, z2hat[..., None], p)
    vals = np.expm1(h) * zeta(s[..., None], v, p.P1, p.alpha) * v
    return np.sum(w * vals, axis=-1)


def _macro_integrand(z1, gamma, params, upper):
    p = params
    z1 = np.asarray(z1, dtype=float)
    s = gamma * z1**p.alpha / p.P1
    c2 = s * p.P2
    inside = z1 < p.D
    g1 = np.where(
        inside,
        np.exp(-2.0 * math.pi * p.lambda2 * laplace_tail(np.maximum(p.D - z1, 0.0), c2, p.alpha)),
        g1_hat(s, p.lambda2, p.P2, p.alpha),
    )
    g2 = np.exp(f_removed(s, z1, p))
    exponent = laplace_tail(z1, s * p.P1, p.alpha)
    if upper:
        exponent = exponent - _hole_correction_tail(s, z1, p)
    g34 = np.exp(-2.0 * math.pi * p.lambda1 * exponent)
    return g1 * g2 * g34 * pdf_z1(z1, p.lambda1)


def _batched(fn, batch=BATCH):
    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([fn(x[i:i + batch]) for i in range(0, len(x), batch)]) if len(x) else x
    return wrapped


def _finish(value, label):
    if value > 1.0 + 1e-9:
        warnings.warn(f"{label}: coverage {value:.12g} exceeds 1; clamped", IntegrandSignWarning, stacklevel=3)
    return float(min(max(value, 0.0), 1.0))


def _macro(gamma, params, upper, cfg):
    gamma = float(gamma)
    cfg = cfg or OUTER
    z1_max = z1_truncation(params.lambda1)
    pts = [params.D] if 0 < params.D < z1_max else []
    f = _batched(lambda z: _macro_integrand(z, gamma, params, upper))
    val, _ = integrate(f, 0.0, z1_max, cfg, points=pts)
    return val


def macro_coverage_lower(gamma, params, cfg=None):
    """Coverage of a macro-served user keeping only the nearest hole (a lower bound)."""
    return _finish(_macro(gamma, params, False, cfg), "macro_coverage_lower")


def macro_coverage_upper(gamma, params, cfg=None):
    """Coverage of a macro-served user carving every hole independently (an upper bound)."""
    return _finish(_macro(gamma, params, True, cfg), "macro_coverage_upper")


# ---------------------------------------------------------------------------
# small-cell tier
#
# The double integral over (z1, z2hat) is evaluated with z2hat outermost.
# For fixed z2hat the threshold s is fixed, so the macro-tier factor for
# every-hole carving is a tail integral in z1 of one fixed function, and a
# single reverse cumulative sum yields it at all z1 nodes at once.


def _z1_breaks(zh, D, z1_max):
    """Panel boundaries in z1 for each serving distance ``zh``: shape ``(m, 5)``."""
    lo = np.maximum(D - zh, 0.0)
    inner = np.stack([np.full(zh.shape, D), zh - D, zh + D], axis=-1)
    inner = np.sort(np.clip(inner, lo[:, None], z1_max), axis=-1)
    return np.concatenate([lo[:, None], inner, np.full((len(zh), 1), z1_max)], axis=-1)


def _cond_pdf(zh, z1, params):
    """Density of the one-hole serving distance ``zh`` given ``z1`` (broadcasting)."""
    p = params
    zh, z1 = np.broadcast_arrays(zh, z1)
    exposed = np.maximum(math.pi * zh * zh - lens_area(zh, p.D, z1), 0.0)
    slope = np.maximum(2.0 * math.pi * zh - arc_inside(zh, p.D, z1), 0.0)
    return np.where(zh > p.D - z1, p.lambda2 * slope * np.exp(-p.lambda2 * exposed), 0.0)


def _small_integrand(zh, gamma, params, all_holes):
    p = params
    zh = np.asarray(zh, dtype=float)
    m = len(zh)
    s = gamma * zh**p.alpha / p.P2
    z1_max = z1_truncation(p.lambda1)
    breaks = _z1_breaks(zh, p.D, z1_max)
    z1, w = composite_gl(breaks, N_Z1, SUB_Z1)  # (m, K)
    sc = s[:, None]
    zc = zh[:, None]

    g1 = np.exp(-2.0 * math.pi * p.lambda2 * laplace_tail(zh, s * p.P2, p.alpha))
    g2 = np.exp(hole_integral(sc, z1, zc, p))
    g3 = zeta(sc, z1, p.P1, p.alpha)
    exponent = laplace_tail(z1, sc * p.P1, p.alpha)
    if all_holes and p.D > 0:
        exponent = exponent - _cumulative_correction(s, zh, breaks, z1, p)
    g45 = np.exp(-2.0 * math.pi * p.lambda1 * exponent)
    weight = _cond_pdf(zc, z1, p) * pdf_z1(z1, p.lambda1)
    inner = np.sum(w * g2 * g3 * g45 * weight, axis=-1)
    return g1 * inner


def _cumulative_correction(s, zh, breaks, z1, params):
    """``int_{z1}^inf (exp(g(s, v, zh)) - 1) zeta(s, v) v dv`` at every z1 node.

    The nodes of each panel are already sorted, so interleaving the panel
    boundaries gives an ordered grid whose gaps contain no kink; the tail
    beyond the last boundary is integrated on ``[z1_max, inf)``.
    """
    p = params
    m = len(zh)
    n_pan = breaks.shape[1] - 1
    per = z1.shape[1] // n_pan
    nodes = z1.reshape(m, n_pan, per)
    grid = np.concatenate([breaks[:, :-1, None], nodes], axis=-1).reshape(m, -1)
    grid = np.concatenate([grid, breaks[:, -1:]], axis=-1)  # (m, G + 1)
    sc = s[:, None, None]
    zc = zh[:, None, None]
    v, wv = gl_rule(grid[:, :-1], grid[:, 1:], N_GAP)  # (m, G, N_GAP)
    h = np.expm1(hole_integral(sc, v, zc, p)) * zeta(sc, v, p.P1, p.alpha) * v
    gaps = np.sum(wv * h, axis=-1)  # (m, G)

    last = breaks[:, -1]
    scale = np.maximum.reduce([last, (s * p.P1) ** (1.0 / p.alpha), np.full(m, p.D)])
    vt, wt = tail_rule(last, scale, N_TAIL)
    ht = np.expm1(hole_integral(s[:, None], vt, zh[:, None], p)) * zeta(s[:, None], vt, p.P1, p.alpha) * vt
    tail = np.sum(wt * ht, axis=-1)

    # T(grid_k) = tail + sum_{j >= k} gaps_j
    cum = tail[:, None] + np.cumsum(gaps[:, ::-1], axis=-1)[:, ::-1]
    cum = cum.reshape(m, n_pan, per + 1)[:, :, 1:]  # drop the panel-boundary entries
    return cum.reshape(m, -1)


def _small(gamma, params, all_holes, cfg):
    gamma = float(gamma)
    cfg = cfg or OUTER
    zh_max = z2_truncation(params)
    pts = [params.D] if 0 < params.D < zh_max else []
    f = _batched(lambda z: _small_integrand(z, gamma, params, all_holes))
    val, _ = integrate(f, 0.0, zh_max, cfg, points=pts)
    return val


def small_coverage_closest_hole(gamma, params, cfg=None):
    """Coverage of a small-cell-served user keeping only the nearest hole."""
    return _finish(_small(gamma, params, False, cfg), "small_coverage_closest_hole")


def small_coverage_all_holes(gamma, params, cfg=None):
    """Coverage of a small-cell-served user carving every hole independently."""
    return _finish(_small(gamma, params, True, cfg), "small_coverage_all_holes")


EVALUATORS = {
    "T1_lower": macro_coverage_lower,
    "T2_upper": macro_coverage_upper,
    "T3_approx": small_coverage_closest_hole,
    "T4_approx": small_coverage_all_holes,
}


def truncation_radii(params):
    return {"z1_max_m": z1_truncation(params.lambda1), "z2hat_max_m": z2_truncation(params)}


def coverage_curve(method, gammas_dB, params, threads=1, cfg=None):
    """Evaluate one analytic method over a threshold grid given in dB."""
    fn = EVALUATORS[method]
    gammas = [db_to_linear(g) for g in gammas_dB]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            values = list(ex.map(lambda g: fn(g, params, cfg), gammas))
    else:
        values = [fn(g, params, cfg) for g in gammas]
    return CoverageCurve(list(gammas_dB), values, method, meta=truncation_radii(params))
