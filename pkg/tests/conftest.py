from functools import lru_cache

import pytest

from phpcov.coverage_analytic import coverage_curve
from phpcov.coverage_sim import SimConfig, simulate
from phpcov.params import PRESETS

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def cached_batch(preset, n_trials, hole_mode="all_holes", seed=2024, D=None):
    """Monte Carlo batches shared by several test modules (they are expensive)."""
    params = PRESETS[preset]
    if D is not None:
        params = params.with_(D=D)
    cfg = SimConfig.for_params(params, n_trials, seed=seed, hole_mode=hole_mode)
    return params, cfg, simulate(params, cfg)


GRID_DB = tuple(range(-10, 21))


@lru_cache(maxsize=None)
def cached_curve(preset, method, gammas_dB=GRID_DB):
    """Analytic curves on the standard threshold grid, shared across modules."""
    return coverage_curve(method, list(gammas_dB), PRESETS[preset])


@pytest.fixture
def acceptance_report():
    def report(tag, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
