"""Run-directory writers and readers: manifest, trace CSV, binary snapshots.

All formats are frozen and versioned through the manifest so downstream
tooling (plot scripts, regression tests) can rely on them:

* manifest.json - resolved configuration, provenance, hashes, versions;
* trace.csv / sweep.csv / scan.csv - comma-separated with ``# key: value``
  provenance comment lines above a mandatory header row; floats are
  written with shortest round-trip precision, so identical runs produce
  byte-identical files;
* snapshots/*.bin - magic ``BSMF``, little-endian u32 format version,
  u32 header length, UTF-8 JSON header (grid metadata, tau, model, config
  hash, field name), then the samples as little-endian complex128 pairs.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import OutputError

MAGIC = b"BSMF"
SNAPSHOT_VERSION = 1
MANIFEST_VERSION = 1
TRACE_COLUMNS = ("tau", "m", "n2_abs")
REDUCED_COLUMNS = ("tau", "s_re", "s_im", "d", "m", "s_abs",
                   "spin_invariant_drift", "parabolic_invariant_drift")


def fmt(x) -> str:
    """Shortest exact decimal form of a float (deterministic output)."""
    return repr(float(x))


def write_csv(path, columns: dict, comments: dict | None = None) -> None:
    """Write named columns with optional ``# key: value`` comment lines."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n_rows = len(arrays[0]) if arrays else 0
    lines = []
    for key, value in (comments or {}).items():
        lines.append(f"# {key}: {value}")
    lines.append(",".join(names))
    for i in range(n_rows):
        cells = []
        for arr in arrays:
            v = arr[i]
            if isinstance(v, (str, np.str_)):
                cells.append(str(v))
            elif isinstance(v, (bool, np.bool_)) or np.issubdtype(type(v), np.integer):
                cells.append(str(v).lower() if isinstance(v, (bool, np.bool_)) else str(int(v)))
            else:
                cells.append(fmt(v))
        lines.append(",".join(cells))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def read_csv(path):
    """Read a CSV written by :func:`write_csv`; returns (comments, columns)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    comments: dict[str, str] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        if ":" in body:
            key, value = body.split(":", 1)
            comments[key.strip()] = value.strip()
        i += 1
    if i >= len(lines):
        raise OutputError(f"{path} has no header row")
    names = lines[i].split(",")
    rows = [line.split(",") for line in lines[i + 1:] if line]
    columns: dict[str, np.ndarray] = {}
    for j, name in enumerate(names):
        cells = [row[j] for row in rows]
        try:
            columns[name] = np.asarray([float(c) for c in cells])
        except ValueError:
            columns[name] = np.asarray(cells)
    return comments, columns


def write_snapshot(path, values: np.ndarray, header: dict) -> None:
    """Write one complex field with its metadata header."""
    path = Path(path)
    payload = np.ascontiguousarray(values, dtype="<c16").tobytes()
    header = dict(header)
    header.setdefault("dtype", "complex128")
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", SNAPSHOT_VERSION, len(header_bytes)))
            fh.write(header_bytes)
            fh.write(payload)
    except OSError as exc:
        raise OutputError(f"cannot write snapshot {path}: {exc}") from exc


def read_snapshot(path):
    """Read a snapshot file; returns (values, header)."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise OutputError(f"cannot read snapshot {path}: {exc}") from exc
    if blob[:4] != MAGIC:
        raise OutputError(f"{path} is not a snapshot file (bad magic)")
    version, header_len = struct.unpack("<II", blob[4:12])
    if version != SNAPSHOT_VERSION:
        raise OutputError(f"{path}: unsupported snapshot version {version}")
    header = json.loads(blob[12:12 + header_len].decode("utf-8"))
    payload = blob[12 + header_len:]
    n = header["n_points"]
    if len(payload) != 16 * n:
        raise OutputError(
            f"{path}: payload holds {len(payload)} bytes, expected {16 * n}"
        )
    values = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    return values, header


def write_manifest(out_dir, doc: dict) -> None:
    doc = dict(doc)
    doc["manifest_version"] = MANIFEST_VERSION
    path = Path(out_dir) / "manifest.json"
    try:
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write manifest {path}: {exc}") from exc


def read_manifest(run_dir) -> dict:
    path = Path(run_dir) / "manifest.json"
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OutputError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise OutputError(f"manifest {path} is not valid JSON: {exc}") from exc
    if doc.get("manifest_version") != MANIFEST_VERSION:
        raise OutputError(
            f"manifest version {doc.get('manifest_version')!r} not supported"
        )
    return doc


def write_summary(out_dir, summary: dict) -> None:
    path = Path(out_dir) / "summary.json"
    try:
        path.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n",
                        encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write summary {path}: {exc}") from exc


def write_trajectory(out_dir, traj, config_hash: str) -> None:
    """Write trace.csv plus the snapshot series of a field-solver run."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(
        out / "trace.csv",
        {
            "tau": traj.taus,
            "m": traj.m,
            "n2_abs": np.abs(traj.n2),
        },
        comments={
            "model": traj.model,
            "config_hash": config_hash,
            "time_unit": "1/omega_r",
            "columns": "tau,m,n2_abs",
        },
    )
    if len(traj.snap_taus):
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        base_header = {
            "n_points": traj.grid.n_points,
            "n_periods": traj.grid.n_periods,
            "model": traj.model,
            "config_hash": config_hash,
        }
        for i, tau in enumerate(traj.snap_taus):
            for fieldname, series in (("psi", traj.psi_snaps), ("s", traj.s_snaps)):
                header = dict(base_header, tau=float(tau), field=fieldname)
                write_snapshot(
                    snap_dir / f"snap_{i:06d}_{fieldname}.bin",
                    np.asarray(series[i], dtype=complex),
                    header,
                )


def write_reduced_trajectory(out_dir, traj, config_hash: str) -> None:
    """Write the order-parameter trace of a reduced-model run."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    inv1 = traj.d**2 + 2.0 * np.abs(traj.s) ** 2
    inv2 = traj.d - traj.drive * traj.s.real**2
    write_csv(
        out / "trace.csv",
        {
            "tau": traj.taus,
            "s_re": traj.s.real,
            "s_im": traj.s.imag,
            "d": traj.d,
            "m": traj.s.real,
            "s_abs": np.abs(traj.s),
            "spin_invariant_drift": inv1 - inv1[0],
            "parabolic_invariant_drift": inv2 - inv2[0],
        },
        comments={
            "model": "reduced",
            "config_hash": config_hash,
            "time_unit": "1/omega_r",
            "m_convention": "m = Re(S); |S| recorded alongside",
        },
    )
