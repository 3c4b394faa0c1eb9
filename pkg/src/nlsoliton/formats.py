"""Flat-file formats: snapshot CSVs plus manifest, invariants, spectra, PMFs, reports.

Floats are written with ``repr`` (shortest round-trip form), so a file read
back reproduces the in-memory values bit for bit and identical runs produce
identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .field import ComplexField, Grid, WaveguideParams

SNAPSHOT_HEADER = ("z", "re", "im")
MANIFEST_NAME = "manifest.json"


def _f(x) -> str:
    return repr(float(x))


def _write_rows(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_snapshot(path, f: ComplexField):
    z = f.grid.z
    s = f.samples
    _write_rows(Path(path), SNAPSHOT_HEADER, ((_f(zj), _f(a.real), _f(a.imag)) for zj, a in zip(z, s)))


def read_snapshot(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if tuple(header or ()) != SNAPSHOT_HEADER:
            raise ValueError(f"{path}: expected header {','.join(SNAPSHOT_HEADER)}, got {header}")
        rows = [tuple(map(float, row)) for row in r if row]
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return arr[:, 0], arr[:, 1] + 1j * arr[:, 2]


def write_trajectory(out_dir, traj, w: WaveguideParams) -> Path:
    """Snapshot CSVs under ``out_dir/snapshots`` and ``out_dir/manifest.json``."""
    out = Path(out_dir)
    entries = []
    for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
        name = f"snapshots/snap_{i:05d}.csv"
        write_snapshot(out / name, snap)
        entries.append({"index": i, "time": float(t), "file": name})
    manifest = {
        "grid": asdict(traj.grid),
        "waveguide": asdict(w),
        "snapshots": entries,
    }
    path = out / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def read_manifest(path) -> tuple[Grid, WaveguideParams, np.ndarray, list[ComplexField]]:
    path = Path(path)
    m = json.loads(path.read_text())
    grid = Grid(**m["grid"])
    w = WaveguideParams(**m["waveguide"])
    times = np.array([e["time"] for e in m["snapshots"]], dtype=float)
    snaps = []
    for e in m["snapshots"]:
        _, a = read_snapshot(path.parent / e["file"])
        snaps.append(ComplexField(grid, a))
    return grid, w, times, snaps


def write_invariants(path, traj):
    rows = ((_f(t), _f(n), _f(p), _f(e)) for t, (n, p, e) in zip(traj.times, traj.invariants))
    _write_rows(Path(path), ("time", "N", "P", "E"), rows)


def read_csv_columns(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [list(map(float, row)) for row in r if row]
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return {h: arr[:, i] for i, h in enumerate(header)}


def write_spectrum(path, k, abs_fft, analytic):
    order = np.argsort(k, kind="stable")
    rows = ((_f(k[i]), _f(abs_fft[i]), _f(analytic[i])) for i in order)
    _write_rows(Path(path), ("k", "abs_fft", "analytic"), rows)


def write_pmf(path, pmf):
    rows = ((str(n), _f(p)) for n, p in zip(pmf.n, pmf.probabilities))
    _write_rows(Path(path), ("n", "p_n"), rows)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path
