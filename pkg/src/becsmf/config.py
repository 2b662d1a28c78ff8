"""Run configuration: the key = value file format and its resolution.

A run file is INI-style text with ``[section]`` headers and ``key = value``
lines.  Unknown sections or keys are errors, duplicate keys are errors
(reported with line numbers), and every value carries a provenance tag
(explicit, override or default) into the run manifest.  The resolved
configuration is hashed so outputs can be traced back to their inputs.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .core import PhysParams
from .errors import ConfigError
from .initial import cosine_seed, gaussian_profile, pulse_matched_phase
from .reduced import ReducedState, seeded_state
from .spectral import Grid

REQUIRED = object()

MODELS = ("smf", "hmf", "reduced")
INITIAL_KINDS = ("cosine", "gaussian", "file")
OBSERVABLES = ("m_max", "growth_rate", "droplet_width")
PROTOCOLS = ("median", "averaged")


def _phase(text: str):
    """Seed phase: a float in radians, or 'sech' for the pulse-matched value."""
    if text.strip().lower() == "sech":
        return "sech"
    return float(text)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str):
    return tuple(float(tok) for tok in text.replace(",", " ").split())


# section -> key -> (converter, default-or-REQUIRED, help text)
SCHEMA: dict[str, dict[str, tuple]] = {
    "run": {
        "model": (str, REQUIRED, "solver: smf | hmf | reduced"),
        "seed": (int, 1234, "seed for any random content of the initial state"),
        "out_dir": (str, "", "output directory (often set from the command line)"),
    },
    "params": {
        "b0": (float, REQUIRED, "optical thickness at resonance"),
        "delta": (float, REQUIRED, "detuning in half-linewidths"),
        "p0": (float, REQUIRED, "scaled pump intensity"),
        "R": (float, REQUIRED, "mirror reflectivity in (0, 1]"),
        "omega_r": (float, REQUIRED, "recoil frequency over the linewidth"),
    },
    "grid": {
        "n_points": (int, 1024, "samples over the whole domain (power of two)"),
        "n_periods": (int, 8, "pattern periods in the domain"),
    },
    "time": {
        "dtau": (float, 1e-3, "step in recoil-time units"),
        "t_end": (float, 200.0, "horizon in recoil-time units"),
        "trace_stride": (int, 10, "steps between trace samples"),
        "snapshot_stride": (int, 500, "steps between snapshots (0: none)"),
    },
    "initial": {
        "kind": (str, "cosine", "cosine | gaussian | file"),
        "amplitude": (float, 1e-3, "modulation amplitude of the cosine seed"),
        "phase": (_phase, 0.0, "seed phase in radians, or 'sech'"),
        "noise_rms": (float, 0.0, "rms of extra seeded multimode noise"),
        "width": (float, 0.07, "Gaussian width sigma_x/Lambda_c (kind = gaussian)"),
        "file": (str, "", "snapshot file to start from (kind = file)"),
    },
    "sweep": {
        "key": (str, "params.p0", "dotted config key to sweep"),
        "values": (_float_list, (), "explicit swept values"),
        "start": (float, 0.0, "generated range start (with num > 0)"),
        "stop": (float, 0.0, "generated range stop"),
        "num": (int, 0, "number of generated values (0: use 'values')"),
        "spacing": (str, "log", "log | linear spacing of the generated range"),
        "observable": (str, "m_max", "m_max | growth_rate | droplet_width"),
        "workers": (int, 1, "parallel worker processes"),
        "seed_base": (int, 0, "row seeds are seed_base + row index"),
    },
    "droplet_scan": {
        "values": (_float_list, (), "explicit pump intensities"),
        "center": (float, 6.3e-8, "center of a generated decade of p0"),
        "decades": (float, 1.0, "width of the generated range in decades"),
        "num": (int, 9, "number of generated values"),
        "paper_init": (_bool, False, "start every row at width 0.07 instead of closed form"),
        "init_width": (float, 0.0, "explicit start width (0: closed form)"),
        "t_end": (float, 40.0, "horizon per row"),
        "n_points": (int, 256, "grid size per row (single period)"),
        "protocol": (str, "median", "width estimator: median | averaged"),
        "workers": (int, 1, "parallel worker processes"),
    },
}

OPTIONAL_SECTIONS = ("sweep", "droplet_scan")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration."""

    model: str
    params: PhysParams
    n_points: int
    n_periods: int
    dtau: float
    t_end: float
    trace_stride: int
    snapshot_stride: int
    init_kind: str
    init_amplitude: float
    init_phase: Any              # float or "sech"
    init_noise_rms: float
    init_width: float
    init_file: str
    seed: int
    out_dir: str
    resolved: dict = field(repr=False)
    provenance: dict = field(repr=False)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dtau))

    def section(self, name: str) -> dict:
        return self.resolved.get(name, {})


def _convert(section: str, key: str, raw: str):
    conv = SCHEMA[section][key][0]
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"bad value for [{section}] {key}: {raw!r} ({exc})"
        ) from exc


def parse_config(text: str, overrides: tuple[str, ...] = ()) -> RunConfig:
    """Parse configuration text, apply overrides, resolve defaults.

    Overrides are ``section.key=value`` strings applied after the file and
    recorded as such in the provenance map.
    """
    parser = configparser.ConfigParser(
        interpolation=None, strict=True, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # keys are case-sensitive (R vs r)
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key: {exc}") from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    values: dict[str, dict[str, Any]] = {}
    provenance: dict[str, str] = {}

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(
                f"unknown section [{section}]; known: {', '.join(SCHEMA)}"
            )
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}]; known: "
                    f"{', '.join(SCHEMA[section])}"
                )
            values.setdefault(section, {})[key] = _convert(section, key, raw)
            provenance[f"{section}.{key}"] = "explicit"

    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, raw = item.split("=", 1)
        dotted = dotted.strip()
        if "." not in dotted:
            raise ConfigError(f"override key {dotted!r} needs a section prefix")
        section, key = dotted.split(".", 1)
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown override key {dotted!r}")
        values.setdefault(section, {})[key] = _convert(section, key, raw.strip())
        provenance[dotted] = "override"

    missing = []
    resolved: dict[str, dict[str, Any]] = {}
    for section, keys in SCHEMA.items():
        if section in OPTIONAL_SECTIONS and section not in values:
            continue
        resolved[section] = {}
        for key, (_conv, default, _help) in keys.items():
            if key in values.get(section, {}):
                resolved[section][key] = values[section][key]
            elif default is REQUIRED:
                missing.append(f"[{section}] {key}")
            else:
                resolved[section][key] = default
                provenance.setdefault(f"{section}.{key}", "default")
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    run, par = resolved["run"], resolved["params"]
    if run["model"] not in MODELS:
        raise ConfigError(f"unknown model {run['model']!r}; pick one of {MODELS}")
    init = resolved["initial"]
    if init["kind"] not in INITIAL_KINDS:
        raise ConfigError(f"unknown initial kind {init['kind']!r}")
    grid_sec, time_sec = resolved["grid"], resolved["time"]
    if time_sec["dtau"] <= 0 or time_sec["t_end"] <= 0:
        raise ConfigError("dtau and t_end must be positive")
    if "sweep" in resolved and resolved["sweep"]["observable"] not in OBSERVABLES:
        raise ConfigError(f"unknown observable {resolved['sweep']['observable']!r}")
    if "droplet_scan" in resolved and resolved["droplet_scan"]["protocol"] not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {resolved['droplet_scan']['protocol']!r}")

    params = PhysParams(
        b0=par["b0"], delta=par["delta"], p0=par["p0"],
        R=par["R"], omega_r=par["omega_r"],
    )
    return RunConfig(
        model=run["model"],
        params=params,
        n_points=grid_sec["n_points"],
        n_periods=grid_sec["n_periods"],
        dtau=time_sec["dtau"],
        t_end=time_sec["t_end"],
        trace_stride=time_sec["trace_stride"],
        snapshot_stride=time_sec["snapshot_stride"],
        init_kind=init["kind"],
        init_amplitude=init["amplitude"],
        init_phase=init["phase"],
        init_noise_rms=init["noise_rms"],
        init_width=init["width"],
        init_file=init["file"],
        seed=run["seed"],
        out_dir=run["out_dir"],
        resolved=resolved,
        provenance=provenance,
    )


def config_from_file(path, overrides: tuple[str, ...] = ()) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not text.strip():
        required = [
            f"[{sec}] {key}"
            for sec, keys in SCHEMA.items()
            for key, spec in keys.items()
            if spec[1] is REQUIRED
        ]
        raise ConfigError("empty config; required keys: " + ", ".join(required))
    return parse_config(text, overrides)


def config_hash(resolved: dict) -> str:
    """Stable hash of a resolved configuration tree.

    Execution details that cannot change what is computed are excluded:
    the output directory and worker counts.  The same job must hash
    identically wherever and however it ran.
    """
    pruned = {sec: dict(keys) for sec, keys in resolved.items()}
    pruned.get("run", {}).pop("out_dir", None)
    pruned.get("sweep", {}).pop("workers", None)
    pruned.get("droplet_scan", {}).pop("workers", None)
    text = json.dumps(pruned, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def resolved_to_text(resolved: dict) -> str:
    """Render a resolved configuration tree back to config-file text."""
    lines = []
    for section, keys in resolved.items():
        lines.append(f"[{section}]")
        for key, value in keys.items():
            if isinstance(value, (tuple, list)):
                value = " ".join(repr(float(v)) for v in value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def config_from_resolved(resolved: dict, overrides: tuple[str, ...] = ()) -> RunConfig:
    """Rebuild a RunConfig from a manifest's resolved configuration."""
    return parse_config(resolved_to_text(resolved), overrides)


def build_grid(cfg: RunConfig) -> Grid:
    return Grid(cfg.n_points, cfg.n_periods)


def seed_phase_value(cfg: RunConfig) -> float:
    if cfg.init_phase == "sech":
        return pulse_matched_phase(cfg.params.drive)
    return float(cfg.init_phase)


def build_initial(cfg: RunConfig, grid: Grid) -> np.ndarray:
    """Initial wavefunction for the field solvers."""
    if cfg.init_kind == "cosine":
        return cosine_seed(
            grid,
            amplitude=cfg.init_amplitude,
            phase=seed_phase_value(cfg),
            noise_rms=cfg.init_noise_rms,
            seed=cfg.seed,
        )
    if cfg.init_kind == "gaussian":
        return gaussian_profile(grid, cfg.init_width)
    if cfg.init_kind == "file":
        from .io import read_snapshot

        values, header = read_snapshot(cfg.init_file)
        if header["n_points"] != grid.n_points or header["n_periods"] != grid.n_periods:
            raise ConfigError(
                f"snapshot grid {header['n_points']}x{header['n_periods']} does not "
                f"match configured grid {grid.n_points}x{grid.n_periods}"
            )
        return values
    raise ConfigError(f"unknown initial kind {cfg.init_kind!r}")


def build_reduced_state(cfg: RunConfig) -> ReducedState:
    """Initial order-parameter state for the reduced model."""
    drive = cfg.params.drive
    m0 = cfg.init_amplitude
    if cfg.init_phase == "sech":
        return seeded_state(drive, m0, on_pulse=True)
    phase = float(cfg.init_phase)
    s = m0 * np.exp(-1j * phase)
    return ReducedState(s=complex(s), d=drive * s.real**2 - 1.0, drive=drive)


def run_from_config(cfg: RunConfig):
    """Dispatch a configured run; returns the trajectory object."""
    from . import hmf, reduced, smf

    if cfg.model == "reduced":
        state0 = build_reduced_state(cfg)
        return reduced.integrate(
            state0, cfg.dtau, cfg.n_steps, record_stride=cfg.trace_stride
        )
    grid = build_grid(cfg)
    psi0 = build_initial(cfg, grid)
    run = smf.evolve if cfg.model == "smf" else hmf.evolve
    return run(
        psi0, cfg.params, grid, cfg.dtau, cfg.n_steps,
        trace_stride=cfg.trace_stride, snapshot_stride=cfg.snapshot_stride,
    )
