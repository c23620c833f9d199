"""Command-line reproduction harness.

Example::

    phpcov --preset setup1 --tasks cov_macro,cov_small --trials 10000 --out runs/s1

Configuration files are flat JSON; densities are given per km^2 and lengths
in metres. Command-line flags override file values, which override the
preset.
"""

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import coverage_analytic as ca
from . import coverage_sim as cs
from .curves import write_curves_csv
from .errors import ConfigParse, InvalidParams
from .params import PER_KM2, PRESETS, NetworkParams
from .serving_distance import marginal_pdf_z2hat, marginal_survival_z2hat

log = logging.getLogger("phpcov")

EXIT_OK, EXIT_CONFIG, EXIT_PARAMS, EXIT_IO = 0, 2, 3, 4
TASKS = ("dist_z2", "cov_macro", "cov_small")
DEFAULT_GAMMAS = list(range(-10, 21))

CONFIG_KEYS = {
    "preset", "lambda1_per_km2", "lambda2_per_km2", "D_m", "alpha", "P1", "P2",
    "gammas_dB", "tasks", "n_trials", "seed", "window_radius_m", "hole_mode",
    "threads", "output_dir",
}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "config", "truncation_radii", "curves", "distances", "mc", "timings_s"],
    "properties": {
        "schema_version": {"const": 1},
        "config": {
            "type": "object",
            "required": ["params", "gammas_dB", "tasks", "n_trials", "seed", "window_radius_m", "hole_mode", "output_dir"],
        },
        "truncation_radii": {
            "type": "object",
            "required": ["z1_max_m", "z2hat_max_m"],
            "additionalProperties": {"type": "number"},
        },
        "curves": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["task", "method", "max_abs_diff_vs_mc"],
                "properties": {
                    "task": {"enum": list(TASKS)},
                    "method": {"type": "string"},
                    "max_abs_diff_vs_mc": {"type": ["number", "null"]},
                    "max_ci_halfwidth": {"type": ["number", "null"]},
                },
            },
        },
        "distances": {"type": "object"},
        "mc": {
            "type": ["object", "null"],
            "properties": {"n_trials": {"type": "integer"}, "redraws": {"type": "integer"}},
        },
        "timings_s": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}


@dataclass
class RunConfig:
    params: NetworkParams
    gammas_dB: list = field(default_factory=lambda: list(DEFAULT_GAMMAS))
    tasks: tuple = TASKS
    n_trials: int = 0
    seed: int = 0
    window_radius_m: float | None = None
    hole_mode: str = "all_holes"
    threads: int = 1
    output_dir: str = "phpcov_out"

    def __post_init__(self):
        if not self.tasks:
            raise ConfigParse("tasks must not be empty")
        bad = [t for t in self.tasks if t not in TASKS]
        if bad:
            raise ConfigParse(f"unknown task(s) {bad}; choose from {TASKS}")
        if self.hole_mode not in cs.HOLE_MODES:
            raise ConfigParse(f"hole_mode must be one of {cs.HOLE_MODES}")
        g = self.gammas_dB
        if not g or any(b <= a for a, b in zip(g, g[1:])):
            raise InvalidParams("gammas_dB must be a nonempty, strictly increasing list")
        if self.n_trials < 0 or self.threads < 1:
            raise InvalidParams("n_trials must be >= 0 and threads >= 1")
        if self.window_radius_m is not None and not self.window_radius_m > 0:
            raise InvalidParams("window_radius_m must be positive")

    def sim_config(self):
        if self.n_trials == 0:
            return None
        return cs.SimConfig.for_params(self.params, self.n_trials, self.seed, self.hole_mode, self.window_radius_m)

    def resolved(self):
        p = self.params
        return {
            "params": {
                "lambda1_per_km2": p.lambda1 / PER_KM2,
                "lambda2_per_km2": p.lambda2 / PER_KM2,
                "D_m": p.D,
                "alpha": p.alpha,
                "P1": p.P1,
                "P2": p.P2,
            },
            "gammas_dB": list(self.gammas_dB),
            "tasks": list(self.tasks),
            "n_trials": self.n_trials,
            "seed": self.seed,
            "window_radius_m": (self.sim_config().window_radius if self.n_trials else self.window_radius_m),
            "hole_mode": self.hole_mode,
            "output_dir": self.output_dir,
        }


def _params_from(raw, base):
    kw = {}
    if base is not None:
        kw = {
            "lambda1_per_km2": base.lambda1 / PER_KM2,
            "lambda2_per_km2": base.lambda2 / PER_KM2,
            "D": base.D, "alpha": base.alpha, "P1": base.P1, "P2": base.P2,
        }
    for src, dst in (("lambda1_per_km2", "lambda1_per_km2"), ("lambda2_per_km2", "lambda2_per_km2"),
                     ("D_m", "D"), ("alpha", "alpha"), ("P1", "P1"), ("P2", "P2")):
        if src in raw:
            kw[dst] = raw[src]
    missing = {"lambda1_per_km2", "lambda2_per_km2", "D"} - kw.keys()
    if missing:
        raise ConfigParse(f"missing network parameters: {sorted(missing)} (give them or a preset)")
    try:
        kw = {k: float(v) for k, v in kw.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"network parameters must be numbers: {exc}") from exc
    return NetworkParams.from_km2(kw.pop("lambda1_per_km2"), kw.pop("lambda2_per_km2"), **kw)


def load_config(path=None, overrides=None):
    """Build a :class:`RunConfig` from an optional JSON file plus overrides."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigParse(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigParse("config must be a JSON object")
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigParse(f"unknown config keys: {sorted(unknown)}")
    preset = raw.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigParse(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    params = _params_from(raw, PRESETS.get(preset))
    tasks = raw.get("tasks", TASKS)
    if isinstance(tasks, str):
        tasks = [t.strip() for t in tasks.split(",") if t.strip()]
    try:
        return RunConfig(
            params=params,
            gammas_dB=[float(g) for g in raw.get("gammas_dB", DEFAULT_GAMMAS)],
            tasks=tuple(tasks),
            n_trials=int(raw.get("n_trials", 0)),
            seed=int(raw.get("seed", 0)),
            window_radius_m=None if raw.get("window_radius_m") is None else float(raw["window_radius_m"]),
            hole_mode=raw.get("hole_mode", "all_holes"),
            threads=int(raw.get("threads", 1)),
            output_dir=str(raw.get("output_dir", "phpcov_out")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (InvalidParams, ConfigParse)):
            raise
        raise ConfigParse(f"malformed config value: {exc}") from exc


def _max_abs_diff(curve, mc):
    if mc is None:
        return None
    return float(np.max(np.abs(curve.as_array() - mc.as_array())))


def _ks_grid(cdf_emp, params):
    """Largest gap between the empirical CDF table and the one-hole analytic CDF."""
    analytic = np.array([1.0 - marginal_survival_z2hat(r, params) for r in cdf_emp.r_m])
    return float(np.max(np.abs(analytic - cdf_emp.cdf)))


def _dist_table(params, n=201):
    # up to where the one-hole survival is ~1e-4
    z_hi = math.sqrt(math.log(1e4) / (math.pi * params.lambda2) + params.D**2)
    z = np.linspace(0.0, z_hi, n)
    pdf = [marginal_pdf_z2hat(v, params) for v in z]
    surv = [marginal_survival_z2hat(v, params) for v in z]
    return np.column_stack([z, pdf, surv])


def run(cfg):
    """Execute ``cfg``; returns the summary dict (also written to disk)."""
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    p = cfg.params
    timings, curves, distances = {}, {}, {}
    sim_cfg = cfg.sim_config()
    batch = None
    if sim_cfg is not None:
        t0 = time.perf_counter()
        batch = cs.simulate(p, sim_cfg, cfg.threads)
        timings["simulation"] = time.perf_counter() - t0

    if "dist_z2" in cfg.tasks:
        t0 = time.perf_counter()
        np.savetxt(os.path.join(out, "dist_z2_analytic.csv"), _dist_table(p), delimiter=",",
                   header="z_m,pdf_per_m,survival", comments="", fmt="%.10g")
        entry = {"analytic_file": "dist_z2_analytic.csv"}
        if batch is not None:
            emp = cs.empirical_distance_cdf("small", p, sim_cfg, batch=batch)
            name = f"dist_z2_mc_{cfg.hole_mode}.csv"
            emp.to_csv(os.path.join(out, name))
            emp1 = cs.empirical_distance_cdf("macro", p, sim_cfg, batch=batch)
            emp1.to_csv(os.path.join(out, "dist_z1_mc.csv"))
            entry.update({"mc_file": name, "ks_grid_vs_analytic": _ks_grid(emp, p)})
        distances["dist_z2"] = entry
        timings["dist_z2"] = time.perf_counter() - t0

    for task, tier, methods in (("cov_macro", "macro", ("T1_lower", "T2_upper")),
                                ("cov_small", "small", ("T3_approx", "T4_approx"))):
        if task not in cfg.tasks:
            continue
        t0 = time.perf_counter()
        analytic = [ca.coverage_curve(m, cfg.gammas_dB, p, cfg.threads) for m in methods]
        mc = cs.estimate_coverage(tier, cfg.gammas_dB, p, sim_cfg, batch=batch) if batch is not None else None
        write_curves_csv(analytic + ([mc] if mc else []), os.path.join(out, f"{task}.csv"))
        for c in analytic:
            curves[f"{task}/{c.method}"] = {
                "task": task, "method": c.method, "max_abs_diff_vs_mc": _max_abs_diff(c, mc), "max_ci_halfwidth": None,
            }
        if mc is not None:
            curves[f"{task}/MC"] = {
                "task": task, "method": "MC", "max_abs_diff_vs_mc": None,
                "max_ci_halfwidth": float(max(mc.ci_halfwidth)),
            }
        timings[task] = time.perf_counter() - t0

    summary = {
        "schema_version": 1,
        "config": cfg.resolved(),
        "truncation_radii": ca.truncation_radii(p),
        "curves": curves,
        "distances": distances,
        "mc": None if batch is None else {"n_trials": int(len(batch.z1)), "redraws": int(batch.redraws)},
        "timings_s": timings,
    }
    jsonschema.validate(summary, SUMMARY_SCHEMA)
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def build_parser():
    ap = argparse.ArgumentParser(prog="phpcov", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--preset", choices=sorted(PRESETS), help="built-in network parameters")
    ap.add_argument("--tasks", help=f"comma-separated subset of {','.join(TASKS)}")
    ap.add_argument("--trials", type=int, help="Monte Carlo trials (0 = analytic only)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--threads", type=int)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    overrides = {
        "preset": args.preset, "tasks": args.tasks, "n_trials": args.trials, "seed": args.seed,
        "output_dir": args.out, "threads": args.threads,
    }
    try:
        cfg = load_config(args.config, overrides)
    except ConfigParse as exc:
        print(f"phpcov: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidParams as exc:
        print(f"phpcov: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    try:
        summary = run(cfg)
    except OSError as exc:
        print(f"phpcov: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %s", os.path.join(cfg.output_dir, "summary.json"))
    for key, c in summary["curves"].items():
        if c["max_abs_diff_vs_mc"] is not None:
            print(f"{key}: max |analytic - MC| = {c['max_abs_diff_vs_mc']:.4f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
