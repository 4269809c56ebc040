"""Result persistence: stable CSV/JSON schemas and the run manifest.

Numbers are written with repr-level precision ('%.17g') so a rerun with the
same config and seed reproduces every artifact byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .detector import VisibilitySurface
from .spectrum import SpectrumMatrix

__all__ = [
    "SCHEMA_VERSION",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_spectrum_json",
    "write_visibility_csv",
    "read_visibility_csv",
    "write_surface_csv",
    "write_sweep_csv",
    "write_json",
    "write_manifest",
]

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_spectrum_csv(path: str, spec: SpectrumMatrix):
    """CSV schema: header 'l_s,l_i,P', rows in row-major (l_s, l_i) order."""
    n = spec.n_max
    with open(path, "w", newline="") as fh:
        fh.write("l_s,l_i,P\n")
        for i, ls in enumerate(range(-n, n + 1)):
            for j, li in enumerate(range(-n, n + 1)):
                fh.write(f"{ls},{li},{_fmt(spec.values[i, j])}\n")


def read_spectrum_csv(path: str) -> SpectrumMatrix:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected columns l_s,l_i,P")
    ls = data[:, 0].astype(int)
    n = int(ls.max())
    size = 2 * n + 1
    if data.shape[0] != size * size:
        raise ValueError(f"{path}: expected a full ({size}x{size}) grid of rows")
    values = np.zeros((size, size))
    values[ls + n, data[:, 1].astype(int) + n] = data[:, 2]
    spec = SpectrumMatrix(n, values)
    return spec.normalize() if abs(values.sum() - 1.0) < 1e-6 else spec


def write_spectrum_json(path: str, spec: SpectrumMatrix, config_echo: dict,
                        nonconservation: float | None = None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n_max": spec.n_max,
        "normalized": spec.normalized,
        "values": [[float(x) for x in row] for row in spec.values],
        "nonconservation_percent": nonconservation,
        "quadrature_report": _plain(spec.report),
        "config_echo": config_echo,
    }
    write_json(path, doc)


def write_surface_csv(path: str, theta_deg: np.ndarray, values: np.ndarray,
                      column: str = "value"):
    """CSV schema: theta_s_deg,theta_i_deg,<column>; row-major grid order."""
    with open(path, "w", newline="") as fh:
        fh.write(f"theta_s_deg,theta_i_deg,{column}\n")
        for i, ts in enumerate(theta_deg):
            for j, ti in enumerate(theta_deg):
                fh.write(f"{_fmt(ts)},{_fmt(ti)},{_fmt(values[i, j])}\n")


def write_visibility_csv(path: str, surface: VisibilitySurface):
    write_surface_csv(path, surface.theta_deg,
                      np.where(surface.valid, surface.values, np.nan), "V")


def read_visibility_csv(path: str) -> VisibilitySurface:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected columns theta_s_deg,theta_i_deg,V")
    theta = np.unique(data[:, 0])
    n = len(theta)
    if data.shape[0] != n * n:
        raise ValueError(f"{path}: expected a full ({n}x{n}) grid of rows")
    values = data[:, 2].reshape(n, n)
    steps = np.diff(theta)
    step = float(steps[0])
    valid = np.isfinite(values)
    return VisibilitySurface(theta, np.nan_to_num(values), step, valid=valid)


def write_sweep_csv(path: str, rows):
    """CSV schema: axis_value,nonconservation_percent,status."""
    with open(path, "w", newline="") as fh:
        fh.write("axis_value,nonconservation_percent,status\n")
        for value, result, status in rows:
            res = _fmt(result) if result is not None else ""
            fh.write(f"{_fmt(value)},{res},{status}\n")


def _plain(obj):
    """Recursively convert numpy scalars/arrays so json can serialize them."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def write_json(path: str, doc: dict):
    with open(path, "w") as fh:
        json.dump(_plain(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir: str, config_echo: dict, seed: int,
                   wall_time_s: float, extra: dict | None = None):
    """Digest every artifact in out_dir into manifest.json.

    Data artifacts are byte-reproducible from (config, seed, version); the
    manifest's wall_time_s field is the one intentionally non-reproducible
    value, kept out of the digested artifact set by construction.
    """
    from . import __version__

    files = sorted(f for f in os.listdir(out_dir)
                   if f != "manifest.json" and os.path.isfile(os.path.join(out_dir, f)))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config_echo": config_echo,
        "seed": seed,
        "wall_time_s": wall_time_s,
        "artifacts": {f: sha256_file(os.path.join(out_dir, f)) for f in files},
    }
    if extra:
        doc.update(_plain(extra))
    write_json(os.path.join(out_dir, "manifest.json"), doc)
