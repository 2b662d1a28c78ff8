"""Deterministic parameter sweeps and power-law regression.

A sweep patches one configuration key across a value list and collects one
observable per value.  Row seeds are fixed by the row index, rows are
computed independently (optionally in a process pool) and the result table
is sorted by the swept value, so the output is byte-identical regardless
of worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import droplet
from .config import OBSERVABLES, RunConfig, config_from_resolved, run_from_config
from .diagnostics import growth_rate_fit
from .errors import FitFailureError, InvalidParameterError


@dataclass(frozen=True)
class SweepSpec:
    """A validated sweep: base config, swept key, values, observable."""

    base: RunConfig
    key: str
    values: tuple[float, ...]
    observable: str = "m_max"
    seed_base: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise InvalidParameterError(
                f"unknown observable {self.observable!r}; pick one of {OBSERVABLES}"
            )
        if len(self.values) < 1:
            raise InvalidParameterError("sweep needs at least one value")
        diffs = np.diff(self.values)
        if len(self.values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InvalidParameterError("sweep values must be strictly monotone")
        for v in self.values:
            _patched_config(self.base, self.key, float(v))  # validates


@dataclass(frozen=True)
class FitResult:
    """Log-log least-squares fit y = prefactor * x**exponent."""

    exponent: float
    prefactor: float
    r_squared: float
    residuals: tuple[float, ...]


def spec_from_config(cfg: RunConfig) -> SweepSpec:
    """Build a sweep from the [sweep] section of a parsed config."""
    sec = cfg.section("sweep")
    if not sec:
        raise InvalidParameterError("config has no [sweep] section")
    if sec["num"] > 0:
        if sec["spacing"] == "log":
            values = np.logspace(np.log10(sec["start"]), np.log10(sec["stop"]), sec["num"])
        elif sec["spacing"] == "linear":
            values = np.linspace(sec["start"], sec["stop"], sec["num"])
        else:
            raise InvalidParameterError(f"unknown spacing {sec['spacing']!r}")
        values = tuple(float(v) for v in values)
    else:
        values = tuple(sec["values"])
    return SweepSpec(
        base=cfg,
        key=sec["key"],
        values=values,
        observable=sec["observable"],
        seed_base=sec["seed_base"],
        workers=sec["workers"],
    )


def _patched_config(base: RunConfig, key: str, value: float) -> RunConfig:
    """Re-resolve the base config with one key replaced."""
    if "." not in key:
        raise InvalidParameterError(f"swept key {key!r} needs a section prefix")
    section, name = key.split(".", 1)
    resolved = {sec: dict(keys) for sec, keys in base.resolved.items()}
    if section not in resolved or name not in resolved[section]:
        raise InvalidParameterError(f"swept key {key!r} is not a config key")
    resolved[section][name] = value
    return config_from_resolved(resolved)


def _run_row(args) -> dict:
    base, key, value, observable, seed, scan_options = args
    row = {"value": float(value), "seed": int(seed), "observable": observable,
           "result": float("nan"), "error": ""}
    try:
        cfg = _patched_config(base, key, float(value))
        cfg = replace(cfg, seed=int(seed))
        if observable == "droplet_width":
            scan = droplet.scan_row(cfg.params, **scan_options)
            row["result"] = scan.sigma_fit
            row["width_variation"] = scan.width_variation
            row["mapping_valid"] = scan.mapping_valid
        else:
            traj = run_from_config(cfg)
            if observable == "m_max":
                row["result"] = float(np.max(traj.m))
                row["tau_at_max"] = float(traj.taus[int(np.argmax(traj.m))])
            elif observable == "growth_rate":
                fit = growth_rate_fit(traj.taus, traj.m)
                row["result"] = fit.rate
                row["fit_residual"] = fit.residual_rms
    except Exception as exc:  # recorded, not fatal: long sweeps must survive rows
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(spec: SweepSpec, scan_options: Optional[dict] = None) -> list[dict]:
    """Run every row; failed rows carry an error message instead of aborting."""
    jobs = [
        (spec.base, spec.key, v, spec.observable, spec.seed_base + i,
         scan_options or {})
        for i, v in enumerate(spec.values)
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_run_row, jobs))
    else:
        rows = [_run_row(j) for j in jobs]
    rows.sort(key=lambda r: r["value"])
    if rows and all(r["error"] for r in rows):
        raise FitFailureError(
            "every sweep row failed; first error: " + rows[0]["error"]
        )
    return rows


def powerlaw_fit(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Least squares on (log x, log y) with r^2 and per-point residuals."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 4:
        raise FitFailureError("power-law fit needs >= 4 matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitFailureError("power-law fit needs strictly positive data")
    if np.ptp(x) == 0:
        raise FitFailureError("degenerate x axis: all values equal")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return FitResult(
        exponent=float(slope),
        prefactor=float(np.exp(intercept)),
        r_squared=r2,
        residuals=tuple(float(r) for r in (ly - pred)),
    )
