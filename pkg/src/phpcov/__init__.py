"""Serving distance and downlink coverage in a two-tier network whose
small cells form a Poisson hole process around the macro sites."""

from .coverage_analytic import (
    SirThreshold,
    coverage_curve,
    macro_coverage_lower,
    macro_coverage_upper,
    small_coverage_all_holes,
    small_coverage_closest_hole,
)
from .coverage_sim import SimConfig, empirical_distance_cdf, estimate_coverage, simulate
from .curves import CoverageCurve
from .params import PRESETS, SETUP1, SETUP2, NetworkParams
from .serving_distance import ConditionalDistanceDist, marginal_pdf_z2hat, pdf_z1

__all__ = [
    "ConditionalDistanceDist",
    "CoverageCurve",
    "NetworkParams",
    "PRESETS",
    "SETUP1",
    "SETUP2",
    "SimConfig",
    "SirThreshold",
    "coverage_curve",
    "empirical_distance_cdf",
    "estimate_coverage",
    "macro_coverage_lower",
    "macro_coverage_upper",
    "marginal_pdf_z2hat",
    "pdf_z1",
    "simulate",
    "small_coverage_all_holes",
    "small_coverage_closest_hole",
]
