"""Coverage curves and their CSV form."""

import csv
from dataclasses import dataclass, field

import numpy as np

METHODS = ("T1_lower", "T2_upper", "T3_approx", "T4_approx", "MC")
CURVE_HEADER = ["gamma_dB", "value", "method", "ci_halfwidth"]


@dataclass
class CoverageCurve:
    gammas_dB: list
    values: list
    method: str
    ci_halfwidth: list | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        self.gammas_dB = [float(g) for g in self.gammas_dB]
        self.values = [float(v) for v in self.values]
        if len(self.gammas_dB) != len(self.values):
            raise ValueError("gammas_dB and values differ in length")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("coverage values must lie in [0, 1]")
        if self.ci_halfwidth is not None:
            self.ci_halfwidth = [float(c) for c in self.ci_halfwidth]
            if len(self.ci_halfwidth) != len(self.values):
                raise ValueError("ci_halfwidth and values differ in length")

    def rows(self):
        ci = self.ci_halfwidth or [None] * len(self.values)
        for g, v, c in zip(self.gammas_dB, self.values, ci):
            yield [f"{g:g}", f"{v:.10f}", self.method, "" if c is None else f"{c:.10f}"]

    def as_array(self):
        return np.asarray(self.values)


def write_curves_csv(curves, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for curve in curves:
            w.writerows(curve.rows())


def read_curves_csv(path):
    """Inverse of :func:`write_curves_csv`; returns ``{method: CoverageCurve}``."""
    by_method = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CURVE_HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        for row in reader:
            entry = by_method.setdefault(row["method"], ([], [], []))
            entry[0].append(float(row["gamma_dB"]))
            entry[1].append(float(row["value"]))
            entry[2].append(float(row["ci_halfwidth"]) if row["ci_halfwidth"] else None)
    out = {}
    for method, (g, v, c) in by_method.items():
        ci = None if all(x is None for x in c) else c
        out[method] = CoverageCurve(g, v, method, ci)
    return out
