"""Monte Carlo ground truth for serving distances and SIR coverage.

Each trial draws its own point processes and fades from the stream
``RngStream(seed, trial_id)``, so results do not depend on how trials are
distributed across threads. Macro sites are drawn on a window enlarged by
``D`` so that holes centred just outside the observation window still
carve small cells inside it.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri

from .curves import CoverageCurve
from .errors import EmptyTier
from .params import db_to_linear
from .pointprocess import RngStream, carve_mask, ppp_xy

log = logging.getLogger(__name__)

HOLE_MODES = ("all_holes", "closest_hole_only")
TIERS = ("macro", "small")
MAX_REDRAWS = 100
Z95 = float(ndtri(0.975))


def default_window_radius(params):
    return max(5.0 / math.sqrt(math.pi * params.lambda1), 10.0 * params.D, 2000.0)


@dataclass(frozen=True)
class SimConfig:
    window_radius: float
    n_trials: int
    seed: int = 0
    hole_mode: str = "all_holes"

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if not self.window_radius > 0:
            raise ValueError("window_radius must be positive")
        if self.hole_mode not in HOLE_MODES:
            raise ValueError(f"hole_mode must be one of {HOLE_MODES}")

    @classmethod
    def for_params(cls, params, n_trials, seed=0, hole_mode="all_holes", window_radius=None):
        return cls(window_radius or default_window_radius(params), n_trials, seed, hole_mode)


class TrialRecord(NamedTuple):
    z1: float
    z2: float
    sir_macro: float
    sir_small: float
    redraws: int = 0


@dataclass(frozen=True)
class Estimate:
    mean: float
    ci_halfwidth: float
    n: int


def sir_at_origin(macros, smalls, params, h_macro, h_small):
    """Closed-access SIRs at the origin for given sites and fades.

    ``macros`` and ``smalls`` are ``(n, 2)`` arrays of positions, ``h_macro``
    and ``h_small`` the matching fade powers. Returns
    ``(z1, z2, sir_macro, sir_small)``; each user is served by the nearest
    site of its own tier and hears every other site of both tiers.
    """
    p = params
    r1 = np.hypot(macros[:, 0], macros[:, 1])
    r2 = np.hypot(smalls[:, 0], smalls[:, 1])
    if len(r1) == 0 or len(r2) == 0:
        raise EmptyTier("a tier has no site in the window")
    rx1 = p.P1 * h_macro * r1 ** (-p.alpha)
    rx2 = p.P2 * h_small * r2 ** (-p.alpha)
    i1, i2 = int(np.argmin(r1)), int(np.argmin(r2))
    total = rx1.sum() + rx2.sum()
    with np.errstate(divide="ignore"):
        sir_macro = rx1[i1] / (total - rx1[i1])
        sir_small = rx2[i2] / (total - rx2[i2])
    return float(r1[i1]), float(r2[i2]), float(sir_macro), float(sir_small)


def _exp_fades(gen):
    return lambda n1, n2: (gen.standard_exponential(n1), gen.standard_exponential(n2))


def run_trial(params, cfg, trial_id, fades=None):
    """One realisation of the network seen from the typical user.

    ``fades``, if given, is called as ``fades(n_macro, n_small)`` and must
    return the two fade arrays; by default they are unit-mean exponentials
    from the trial's own stream.
    """
    if not 0 <= trial_id < cfg.n_trials:
        raise IndexError("trial_id out of range")
    p = params
    R = cfg.window_radius
    for attempt in range(MAX_REDRAWS):
        # draw order is fixed (macros, baseline, fades), so one generator per attempt suffices
        gen = RngStream(cfg.seed, trial_id).child(attempt).generator()
        macros = ppp_xy(p.lambda1, R + p.D, gen)
        baseline = ppp_xy(p.lambda2, R, gen)
        if cfg.hole_mode == "all_holes":
            centers = macros
        else:
            centers = macros[np.argmin(np.hypot(macros[:, 0], macros[:, 1]))][None, :] if len(macros) else macros
        smalls = baseline[carve_mask(baseline, centers, p.D)]
        in_window = np.hypot(macros[:, 0], macros[:, 1]) <= R
        macros = macros[in_window]
        if len(macros) == 0 or len(smalls) == 0:
            continue
        draw = fades or _exp_fades(gen)
        h1, h2 = draw(len(macros), len(smalls))
        return TrialRecord(*sir_at_origin(macros, smalls, p, np.asarray(h1), np.asarray(h2)), redraws=attempt)
    raise EmptyTier(f"trial {trial_id}: empty tier after {MAX_REDRAWS} redraws")


@dataclass
class TrialBatch:
    """Per-trial records in trial-id order."""

    z1: np.ndarray
    z2: np.ndarray
    sir_macro: np.ndarray
    sir_small: np.ndarray
    redraws: int

    def sir(self, tier):
        return {"macro": self.sir_macro, "small": self.sir_small}[tier]

    def distance(self, tier):
        return {"macro": self.z1, "small": self.z2}[tier]


def _run_range(params, cfg, lo, hi):
    return [run_trial(params, cfg, t) for t in range(lo, hi)]


def simulate(params, cfg, threads=1, chunk=2000):
    """Run all trials; the result is identical for any ``threads``."""
    bounds = [(lo, min(lo + chunk, cfg.n_trials)) for lo in range(0, cfg.n_trials, chunk)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda b: _run_range(params, cfg, *b), bounds))
    else:
        parts = [_run_range(params, cfg, *b) for b in bounds]
    recs = [r for part in parts for r in part]
    arr = np.array([r[:4] for r in recs], dtype=float).reshape(-1, 4)
    redraws = sum(r.redraws for r in recs)
    if redraws:
        log.info("%d empty-tier redraws over %d trials", redraws, cfg.n_trials)
    return TrialBatch(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], redraws)


def binomial_ci(k, n, z=Z95):
    """95 % half-width: normal approximation, Wilson when ``k/n`` is within ``5/n`` of 0 or 1."""
    p = k / n
    if min(p, 1.0 - p) <= 5.0 / n:
        return z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    return z * math.sqrt(p * (1 - p) / n)


def coverage_estimate(sir, gamma):
    sir = np.asarray(sir)
    k = int(np.count_nonzero(sir >= gamma))
    return Estimate(k / len(sir), binomial_ci(k, len(sir)), len(sir))


def estimate_coverage(tier, gammas_dB, params, cfg, threads=1, batch=None):
    """Monte Carlo coverage curve; every threshold reuses the same trials."""
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}")
    batch = batch or simulate(params, cfg, threads)
    sir = batch.sir(tier)
    ests = [coverage_estimate(sir, db_to_linear(g)) for g in gammas_dB]
    return CoverageCurve(
        list(gammas_dB),
        [e.mean for e in ests],
        "MC",
        [e.ci_halfwidth for e in ests],
        meta={"tier": tier, "n_trials": len(sir), "hole_mode": cfg.hole_mode, "redraws": batch.redraws},
    )


class DistanceCDF(NamedTuple):
    r_m: np.ndarray
    cdf: np.ndarray

    def to_csv(self, path):
        np.savetxt(path, np.column_stack([self.r_m, self.cdf]), delimiter=",", header="r_m,cdf", comments="", fmt="%.10g")


def empirical_distance_cdf(tier, params, cfg, threads=1, batch=None, n_grid=512):
    """Empirical CDF of the serving distance on ``n_grid`` points up to the 99.9th percentile."""
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}")
    batch = batch or simulate(params, cfg, threads)
    d = np.sort(batch.distance(tier))
    grid = np.linspace(0.0, np.quantile(d, 0.999), n_grid)
    cdf = np.searchsorted(d, grid, side="right") / len(d)
    return DistanceCDF(grid, cdf)
