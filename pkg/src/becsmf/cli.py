"""Command-line front end.

Subcommands: ``simulate`` (field solvers), ``reduced`` (order-parameter
model), ``droplet-scan``, ``sweep`` and ``analyze``.  Every run writes a
self-describing directory: ``manifest.json`` (enough to re-run the job),
``trace.csv``, binary snapshots and ``summary.json``.  Failures print one
machine-parsable line ``error: <category>: <message>`` to stderr and exit
with the category's code (2 config/parameters, 3 numerics, 4 fit, 5 io).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, droplet, io, sweep as sweep_mod
from .config import (
    SCHEMA, REQUIRED, RunConfig, config_from_file, config_from_resolved,
    config_hash, run_from_config,
)
from .diagnostics import growth_rate_fit
from .errors import ArtifactError, ConfigError
from .reduced import pulse_amplitude


def _schema_epilog() -> str:
    lines = ["configuration keys (key = value under [section] headers):"]
    for section, keys in SCHEMA.items():
        lines.append(f"  [{section}]")
        for key, (_conv, default, help_text) in keys.items():
            tag = "required" if default is REQUIRED else f"default {default!r}"
            lines.append(f"    {key:<16} {help_text} ({tag})")
    return "\n".join(lines)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="becsmf",
        description="Mirror-feedback condensate simulator",
        epilog=_schema_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, manifest_ok=False):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="run configuration file")
        if manifest_ok:
            src.add_argument(
                "--from-manifest",
                help="re-run the job described by an existing manifest.json",
            )
        p.add_argument(
            "--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
            help="override one config value (repeatable)",
        )
        p.add_argument("--out", help="output directory (overrides run.out_dir)")

    add_common(sub.add_parser("simulate", help="run the configured field solver"),
               manifest_ok=True)
    add_common(sub.add_parser("reduced", help="run the order-parameter model"))
    add_common(sub.add_parser("droplet-scan", help="droplet width scan over p0"))
    add_common(sub.add_parser("sweep", help="parameter sweep from [sweep]"))

    ana = sub.add_parser("analyze", help="post-process a finished run directory")
    ana.add_argument("--run", required=True, help="run directory with trace.csv")
    return parser


def _load_config(args) -> RunConfig:
    overrides = tuple(args.set)
    if getattr(args, "from_manifest", None):
        doc = io.read_manifest(Path(args.from_manifest).parent)
        cfg = config_from_resolved(doc["config"], overrides)
    else:
        cfg = config_from_file(args.config, overrides)
    if args.out:
        resolved = {sec: dict(keys) for sec, keys in cfg.resolved.items()}
        resolved["run"]["out_dir"] = args.out
        prov = dict(cfg.provenance, **{"run.out_dir": "override"})
        cfg = replace(cfg, out_dir=args.out, resolved=resolved, provenance=prov)
    if not cfg.out_dir:
        raise ConfigError("no output directory: set run.out_dir or pass --out")
    return cfg


def _manifest_doc(cfg: RunConfig, command: str) -> dict:
    return {
        "artifact_version": __version__,
        "command": command,
        "config": cfg.resolved,
        "config_hash": config_hash(cfg.resolved),
        "provenance": cfg.provenance,
        "formats": {"trace_csv": 1, "snapshot": io.SNAPSHOT_VERSION, "sweep_csv": 1},
    }


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    if cfg.model == "reduced":
        raise ConfigError("model = reduced belongs to the 'reduced' subcommand")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg.resolved)
    traj = run_from_config(cfg)
    io.write_manifest(out, _manifest_doc(cfg, "simulate"))
    io.write_trajectory(out, traj, chash)
    ipk = int(np.argmax(traj.m))
    io.write_summary(out, {
        "model": traj.model,
        "config_hash": chash,
        "m_max": float(traj.m[ipk]),
        "tau_at_m_max": float(traj.taus[ipk]),
        "n2_abs_max": float(np.max(np.abs(traj.n2))),
        "norm_drift": traj.max_norm_drift,
        "n_trace_samples": int(len(traj.taus)),
        "n_snapshots": int(len(traj.snap_taus)),
    })
    print(f"simulate: {traj.model} run -> {out} (M_max = {traj.m[ipk]:.4g} "
          f"at tau = {traj.taus[ipk]:.4g})")
    return 0


def _cmd_reduced(args) -> int:
    cfg = _load_config(args)
    if cfg.model != "reduced":
        raise ConfigError("the 'reduced' subcommand needs run.model = reduced")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg.resolved)
    traj = run_from_config(cfg)
    io.write_manifest(out, _manifest_doc(cfg, "reduced"))
    io.write_reduced_trajectory(out, traj, chash)
    drift1, drift2 = traj.invariant_drift()
    summary = {
        "model": "reduced",
        "config_hash": chash,
        "m_peak": float(np.max(traj.m)),
        "spin_invariant_drift": drift1,
        "parabolic_invariant_drift": drift2,
    }
    if cfg.params.drive > 1.0:
        summary["pulse_amplitude"] = pulse_amplitude(cfg.params.drive)
    io.write_summary(out, summary)
    print(f"reduced: -> {out} (peak M = {summary['m_peak']:.5g})")
    return 0


def _cmd_droplet_scan(args) -> int:
    cfg = _load_config(args)
    sec = cfg.section("droplet_scan")
    if not sec:
        raise ConfigError("config has no [droplet_scan] section")
    if sec["values"]:
        p0_list = list(sec["values"])
    else:
        half = 0.5 * sec["decades"]
        center = np.log10(sec["center"])
        p0_list = list(np.logspace(center - half, center + half, sec["num"]))
    init_width = None
    if sec["paper_init"]:
        init_width = 0.07
    elif sec["init_width"] > 0:
        init_width = sec["init_width"]
    rows = droplet.droplet_scan(
        p0_list, cfg.params, workers=sec["workers"],
        n_points=sec["n_points"], t_end=sec["t_end"],
        init_width=init_width, protocol=sec["protocol"],
    )
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_manifest(out, _manifest_doc(cfg, "droplet-scan"))
    cols = {k: np.asarray([getattr(r, k) for r in rows])
            for k in ("p0", "drive", "sigma_fit", "sigma_closed",
                      "width_variation", "width_excursion", "fit_residual",
                      "chi0_n_peak")}
    cols["mapping_valid"] = np.asarray([str(r.mapping_valid).lower() for r in rows])
    cols["error"] = np.asarray([r.error.replace(",", ";") for r in rows])
    io.write_csv(out / "scan.csv", cols, comments={
        "config_hash": config_hash(cfg.resolved),
        "artifact_version": __version__,
        "widths": "wavefunction sigma_x/Lambda_c",
    })
    ok = [r for r in rows if not r.error]
    summary = {"rows": len(rows), "failed_rows": len(rows) - len(ok)}
    if len(ok) >= 4:
        fit = sweep_mod.powerlaw_fit([r.p0 for r in ok], [r.sigma_fit for r in ok])
        summary["width_exponent"] = fit.exponent
        summary["width_exponent_r2"] = fit.r_squared
    io.write_summary(out, summary)
    print(f"droplet-scan: {len(ok)}/{len(rows)} rows ok -> {out}"
          + (f" (exponent {summary['width_exponent']:.3f})"
             if "width_exponent" in summary else ""))
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    spec = sweep_mod.spec_from_config(cfg)
    rows = sweep_mod.run_sweep(spec)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_manifest(out, _manifest_doc(cfg, "sweep"))
    keys = sorted({k for row in rows for k in row})
    front = [k for k in ("value", "result", "seed", "observable") if k in keys]
    ordered = front + [k for k in keys if k not in front]
    cols = {}
    for k in ordered:
        vals = [row.get(k, "") for row in rows]
        if all(isinstance(v, str) for v in vals):
            cols[k] = np.asarray([v.replace(",", ";") for v in vals])
        elif all(isinstance(v, (int, bool)) for v in vals):
            cols[k] = np.asarray(vals)
        else:
            cols[k] = np.asarray([v if not isinstance(v, str) else np.nan for v in vals],
                                 dtype=float)
    io.write_csv(out / "sweep.csv", cols, comments={
        "config_hash": config_hash(cfg.resolved),
        "artifact_version": __version__,
        "swept_key": spec.key,
        "observable": spec.observable,
        "seed_policy": f"seed_base {spec.seed_base} + row index",
    })
    ok = [r for r in rows if not r["error"]]
    io.write_summary(out, {
        "rows": len(rows),
        "failed_rows": len(rows) - len(ok),
        "observable": spec.observable,
    })
    print(f"sweep: {len(ok)}/{len(rows)} rows ok -> {out}")
    return 0


def _cmd_analyze(args) -> int:
    run_dir = Path(args.run)
    manifest = io.read_manifest(run_dir)
    _comments, columns = io.read_csv(run_dir / "trace.csv")
    taus, m = columns["tau"], columns["m"]
    ipk = int(np.argmax(m))
    analysis = {
        "config_hash": manifest.get("config_hash"),
        "m_max": float(m[ipk]),
        "tau_at_m_max": float(taus[ipk]),
    }
    if "n2_abs" in columns:
        analysis["n2_abs_max"] = float(np.max(columns["n2_abs"]))
    try:
        fit = growth_rate_fit(taus, m)
        analysis["growth_rate"] = fit.rate
        analysis["growth_rate_window"] = list(fit.window)
        analysis["growth_rate_residual_rms"] = fit.residual_rms
    except ArtifactError as exc:
        analysis["growth_rate"] = None
        analysis["growth_rate_error"] = f"{exc.category}: {exc}"
    (run_dir / "analysis.json").write_text(
        json.dumps(analysis, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    for key, value in analysis.items():
        print(f"analyze: {key} = {value}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "reduced": _cmd_reduced,
    "droplet-scan": _cmd_droplet_scan,
    "sweep": _cmd_sweep,
    "analyze": _cmd_analyze,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ArtifactError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # anything unexpected still yields one clean line
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
