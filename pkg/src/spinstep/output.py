"""Artifact persistence: versioned manifests, raw spectra, analysis CSVs.

Every run directory is reproducible byte for byte from (config, seed): float
cells are written with ``repr``, which round-trips exactly, and the manifest
carries no timestamps — only the schema tag, the config digest, and a sha256
per emitted file.  Downstream plotting reads the CSVs; nothing here renders.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .edgemodes import EigenReport
from .floquet import BoxModelReport, MonodromyReport
from .spectral import Grid, SpectrumField
from .stepping import Trajectory

__all__ = [
    "MANIFEST_SCHEMA",
    "config_digest",
    "read_spectra",
    "write_box_csv",
    "write_crossval_csv",
    "write_edge_csv",
    "write_floor_csv",
    "write_growth_csv",
    "write_manifest",
    "write_spectra",
]

MANIFEST_SCHEMA = "spinstep.run/1"


def _cell(value) -> str:
    """One CSV cell; floats go through repr so they round-trip exactly."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def config_digest(config: dict) -> str:
    """sha256 over the canonical JSON form of a config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_manifest(out_dir: Path, command: str, config: dict, files: Sequence[Path]) -> Path:
    """Tie every artifact in ``out_dir`` to the exact config that made it."""
    entries = []
    for p in files:
        p = Path(p)
        entries.append(
            {
                "name": p.name,
                "bytes": p.stat().st_size,
                "sha256": hashlib.sha256(p.read_bytes()).hexdigest(),
            }
        )
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "version": __version__,
        "command": command,
        "config_digest": config_digest(config),
        "config": config,
        "files": entries,
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# raw spectra

def write_spectra(path: Path, traj: Trajectory) -> Path:
    """Dump recorded spectra as little-endian float64.

    Layout: ``[N, count]`` header, then per snapshot ``t`` followed by each
    component's coefficients as interleaved (re, im) pairs in ascending-k
    order — s1 first, then s2.  Readable with a plain ``numpy.fromfile``.
    """
    spectra = traj.spectra if traj.spectra is not None else (traj.final_spectrum,)
    N = traj.grid.N
    times = traj.times if traj.spectra is not None else traj.times[-1:]
    chunks = [np.array([float(N), float(len(spectra))])]
    for t, spec in zip(times, spectra):
        rec = np.empty(1 + 4 * N)
        rec[0] = t
        rec[1 : 1 + 2 * N : 2] = spec.s1.real
        rec[2 : 2 + 2 * N : 2] = spec.s1.imag
        rec[1 + 2 * N :: 2] = spec.s2.real
        rec[2 + 2 * N :: 2] = spec.s2.imag
        chunks.append(rec)
    path = Path(path)
    path.write_bytes(np.concatenate(chunks).astype("<f8").tobytes())
    return path


def read_spectra(path: Path, grid: Grid) -> tuple[np.ndarray, tuple[SpectrumField, ...]]:
    """Inverse of :func:`write_spectra` for a known grid."""
    raw = np.fromfile(path, dtype="<f8")
    N, count = int(raw[0]), int(raw[1])
    if N != grid.N:
        raise ValueError(f"file holds N={N} spectra but the grid has N={grid.N}")
    rec_len = 1 + 4 * N
    body = raw[2:].reshape(count, rec_len)
    times = body[:, 0].copy()
    fields = []
    for rec in body:
        s1 = rec[1 : 1 + 2 * N : 2] + 1j * rec[2 : 2 + 2 * N : 2]
        s2 = rec[1 + 2 * N :: 2] + 1j * rec[2 + 2 * N :: 2]
        fields.append(SpectrumField(grid=grid, s1=s1, s2=s2))
    return times, tuple(fields)


# ---------------------------------------------------------------------------
# CSV schemas (documented here; see README for the column glossary)

GROWTH_HEADER = (
    "scenario", "model", "scheme", "frequency", "L", "L_over_pi", "N", "dt",
    "band_center", "band_halfwidth", "rate", "r_squared", "tag",
    "window_start", "window_end",
)

EDGE_HEADER = ("frequency", "L", "L_over_pi", "dk", "M", "N",
               "max_re_lambda", "second_re_lambda")

FLOOR_HEADER = ("frequency", "L", "L_over_pi", "rho", "norm", "det_error",
                "growth_rate")

BOX_HEADER = ("frequency", "L", "L_over_pi", "A", "B", "L_sol", "abs_phi11",
              "abs_phi12", "arg_phi11", "rho", "growth_rate", "det_error")

CROSSVAL_HEADER = ("scenario", "predicted_rate", "measured_rate",
                   "relative_error", "tolerance", "status")


def write_growth_csv(path: Path, rows: Iterable[Sequence]) -> Path:
    """Rows are pre-assembled to match GROWTH_HEADER."""
    return _write_csv(Path(path), GROWTH_HEADER, rows)


def write_edge_csv(path: Path, frequency: float, reports: Iterable[EigenReport]) -> Path:
    ordered = sorted(reports, key=lambda r: r.L)
    rows = [
        (frequency, r.L, r.L / np.pi, 2.0 * np.pi / r.L, r.M, r.N,
         r.growth_rate, r.second_rate)
        for r in ordered
    ]
    return _write_csv(Path(path), EDGE_HEADER, rows)


def write_floor_csv(path: Path, frequency: float, reports: Iterable[MonodromyReport]) -> Path:
    ordered = sorted(reports, key=lambda r: r.L)
    rows = [
        (frequency, r.L, r.L / np.pi, r.rho, r.norm, r.det_error, r.growth_rate)
        for r in ordered
    ]
    return _write_csv(Path(path), FLOOR_HEADER, rows)


def write_box_csv(path: Path, frequency: float, reports: Iterable[BoxModelReport]) -> Path:
    ordered = sorted(reports, key=lambda r: r.L)
    rows = [
        (frequency, b.L, b.L / np.pi, b.params.A, b.params.B, b.params.L_sol,
         abs(b.phi11), abs(b.phi12), float(np.angle(b.phi11)),
         b.report.rho, b.report.growth_rate, b.report.det_error)
        for b in ordered
    ]
    return _write_csv(Path(path), BOX_HEADER, rows)


def write_crossval_csv(path: Path, rows: Iterable[Sequence]) -> Path:
    return _write_csv(Path(path), CROSSVAL_HEADER, rows)
