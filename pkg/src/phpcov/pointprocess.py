"""Point-process realisations on a disc window centred at the typical user."""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import EmptySet, InvalidDensity


class Point(NamedTuple):
    x: float
    y: float


ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True)
class RngStream:
    """Counter-style random stream: the same ``(seed, stream_id)`` always gives the same draws.

    ``child(k)`` derives independent sub-streams, e.g. one per point process
    inside a trial, so that the number of draws consumed by one component
    never shifts another.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()

    def child(self, k):
        return RngStream(self.seed, self.stream_id, self.path + (int(k),))

    def generator(self):
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id), *self.path))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray = field(repr=False)
    window_radius: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def distances(self, origin=ORIGIN):
        return np.hypot(self.points[:, 0] - origin[0], self.points[:, 1] - origin[1])

    def to_csv(self, path):
        np.savetxt(path, self.points, delimiter=",", header="x_m,y_m", comments="", fmt="%.6f")


def ppp_xy(density, window_radius, gen):
    """Raw ``(n, 2)`` coordinates of a PPP on a disc, drawn from a numpy Generator."""
    n = gen.poisson(density * np.pi * window_radius**2)
    u = gen.random((2, n))
    rad = window_radius * np.sqrt(u[0])
    ang = 2.0 * np.pi * u[1]
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


def sample_ppp(density, window_radius, rng):
    """Homogeneous PPP of ``density`` points/m^2 on the disc of ``window_radius``."""
    if density < 0:
        raise InvalidDensity("density must be nonnegative")
    if window_radius <= 0:
        raise ValueError("window_radius must be positive")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return PointSet(ppp_xy(density, window_radius, gen), window_radius)


def carve_mask(points, hole_centers, D):
    """Boolean mask of ``points`` lying at distance >= D from every hole centre."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    centers = np.asarray(hole_centers, dtype=float).reshape(-1, 2)
    keep = np.ones(len(points), dtype=bool)
    if D <= 0 or len(centers) == 0 or len(points) == 0:
        return keep
    # only points in the x-strip [cx - D, cx + D] of a centre can fall in its hole
    order = np.argsort(points[:, 0], kind="stable")
    xs = points[order, 0]
    lo = np.searchsorted(xs, centers[:, 0] - D, side="left")
    hi = np.searchsorted(xs, centers[:, 0] + D, side="right")
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return keep
    which = np.repeat(np.arange(len(centers)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    cand = order[np.repeat(lo, counts) + offsets]
    dx = points[cand, 0] - centers[which, 0]
    dy = points[cand, 1] - centers[which, 1]
    keep[cand[dx * dx + dy * dy < D * D]] = False
    return keep


def carve_php(baseline, hole_centers, D):
    """Remove from ``baseline`` every point within distance ``D`` of a hole centre."""
    if D < 0:
        raise ValueError("hole radius must be nonnegative")
    centers = hole_centers.points if isinstance(hole_centers, PointSet) else hole_centers
    keep = carve_mask(baseline.points, centers, D)
    return PointSet(baseline.points[keep], baseline.window_radius)


def nearest_distance(origin, point_set):
    pts = point_set.points if isinstance(point_set, PointSet) else np.asarray(point_set, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise EmptySet("nearest_distance of an empty point set")
    return float(np.min(np.hypot(pts[:, 0] - origin[0], pts[:, 1] - origin[1])))
