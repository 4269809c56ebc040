"""Run-configuration parsing: JSON in, validated engine objects out.

All unit conversions happen here, once: the file speaks degrees, millimeters
and nanometers; the engine speaks radians and micrometers. Unknown keys are
rejected with the offending path so typos fail loudly instead of silently
falling back to defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .crystal import CrystalConfig, load_sellmeier
from .detector import InterferometerParams, NoiseModel, PolarizationResponse
from .spectrum import QuadratureSpec, SpdcConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


@dataclass
class RunConfig:
    """Everything one CLI invocation needs, in engine units."""

    spdc: SpdcConfig
    n_max: int
    p_modes: str = "all"
    detector: InterferometerParams = field(default_factory=InterferometerParams)
    noise: NoiseModel = field(default_factory=NoiseModel)
    step_deg: float = 0.9
    four_shot: bool = False
    input_spectrum_csv: str | None = None
    sweep_axis: str | None = None
    sweep_values: list | None = None  # engine units (um or rad)
    raw: dict = field(default_factory=dict)  # parsed file, for the config echo


def _section(raw: dict, name: str, allowed: set, where: str) -> dict:
    sec = raw.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{where}{name}: expected an object")
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(
            f"{where}{name}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    return sec


def _number(sec: dict, key: str, default, where: str, positive=False):
    v = sec.get(key, default)
    if v is None:
        return None
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{where}{key}: expected a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{where}{key}: must be > 0, got {v}")
    return float(v)


def _load_pol_table(path: str, where: str) -> PolarizationResponse:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"{where}: cannot read polarization table {path}: {exc}")
    if data.shape[1] != 2:
        raise ConfigError(f"{where}: {path} must have columns theta_deg,psi_rad")
    try:
        return PolarizationResponse(data[:, 0], data[:, 1])
    except ValueError as exc:
        raise ConfigError(f"{where}: {path}: {exc}")


def parse_config(raw: dict) -> RunConfig:
    """Validate a parsed JSON document and build the engine objects."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")
    top_allowed = {"n_max", "crystal", "pump", "quadrature", "clip_ratio",
                   "p_modes", "detector", "noise", "sweep"}
    unknown = set(raw) - top_allowed
    if unknown:
        raise ConfigError(f"top level: unknown key(s) {sorted(unknown)}")

    n_max = raw.get("n_max", 40)
    if not isinstance(n_max, int) or isinstance(n_max, bool) or n_max < 0:
        raise ConfigError(f"n_max: expected a non-negative integer, got {n_max!r}")

    cry = _section(raw, "crystal",
                   {"theta_p_deg", "length_mm", "pump_wavelength_nm",
                    "sellmeier_file"}, "")
    theta_deg = _number(cry, "theta_p_deg", 28.66, "crystal.")
    length_mm = _number(cry, "length_mm", 15.0, "crystal.")
    lam_nm = _number(cry, "pump_wavelength_nm", 405.0, "crystal.", positive=True)
    if length_mm is None or length_mm < 0:
        raise ConfigError("crystal.length_mm: must be >= 0")
    sell_file = cry.get("sellmeier_file")
    try:
        sellmeier = load_sellmeier(sell_file)
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"crystal.sellmeier_file: {exc}")
    try:
        crystal = CrystalConfig(theta_p=math.radians(theta_deg),
                                length_um=length_mm * 1000.0,
                                lambda_p_um=lam_nm / 1000.0,
                                sellmeier=sellmeier)
    except ValueError as exc:
        raise ConfigError(f"crystal: {exc}")

    pump = _section(raw, "pump", {"waist_um"}, "")
    waist = _number(pump, "waist_um", 388.0, "pump.", positive=True)

    quad = _section(raw, "quadrature",
                    {"azimuthal_samples", "radial_nodes", "rho_hi"}, "")
    m = quad.get("azimuthal_samples")
    if m is not None and (not isinstance(m, int) or isinstance(m, bool) or m < 4):
        raise ConfigError(f"quadrature.azimuthal_samples: expected int >= 4, got {m!r}")
    nodes = quad.get("radial_nodes")
    if nodes is not None and (not isinstance(nodes, int) or isinstance(nodes, bool)
                              or nodes < 2):
        raise ConfigError(f"quadrature.radial_nodes: expected int >= 2, got {nodes!r}")
    rho_hi = _number(quad, "rho_hi", None, "quadrature.", positive=True)

    clip = raw.get("clip_ratio")
    if clip is not None:
        clip = _number({"clip_ratio": clip}, "clip_ratio", None, "", positive=True)

    try:
        spdc = SpdcConfig(crystal=crystal, pump_waist_um=waist,
                          quadrature=QuadratureSpec(azimuthal_m=m,
                                                    radial_nodes=nodes,
                                                    rho_hi=rho_hi),
                          clip_ratio=clip)
    except ValueError as exc:
        raise ConfigError(f"pump/quadrature: {exc}")

    p_modes = raw.get("p_modes", "all")
    if p_modes not in ("all", "p0"):
        raise ConfigError(f"p_modes: expected 'all' or 'p0', got {p_modes!r}")

    det = _section(raw, "detector",
                   {"step_deg", "k1", "k2", "delta", "four_shot",
                    "pol_response_s", "pol_response_i", "input_spectrum_csv"}, "")
    step = _number(det, "step_deg", 0.9, "detector.", positive=True)
    k1 = _number(det, "k1", 1.0, "detector.", positive=True)
    k2 = _number(det, "k2", 1.0, "detector.", positive=True)
    delta = _number(det, "delta", 0.0, "detector.")
    four_shot = det.get("four_shot", False)
    if not isinstance(four_shot, bool):
        raise ConfigError(f"detector.four_shot: expected true/false, got {four_shot!r}")
    pol_s = det.get("pol_response_s")
    pol_i = det.get("pol_response_i")
    params = InterferometerParams(
        k1=k1, k2=k2, delta=delta,
        pol_s=_load_pol_table(pol_s, "detector.pol_response_s") if pol_s else None,
        pol_i=_load_pol_table(pol_i, "detector.pol_response_i") if pol_i else None,
    )

    noi = _section(raw, "noise",
                   {"flux_fluctuation", "accidental_rate", "seed"}, "")
    flux = _number(noi, "flux_fluctuation", 0.0, "noise.")
    acc = _number(noi, "accidental_rate", 0.0, "noise.")
    seed = noi.get("seed", 1)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"noise.seed: expected an integer, got {seed!r}")
    try:
        noise = NoiseModel(flux_fluctuation=flux, accidental_rate=acc, seed=seed)
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}")

    sweep_axis = sweep_values = None
    if "sweep" in raw:
        sw = _section(raw, "sweep", {"axis", "values"}, "")
        sweep_axis = sw.get("axis")
        if sweep_axis not in ("thickness", "angle"):
            raise ConfigError(f"sweep.axis: expected 'thickness' or 'angle', got {sweep_axis!r}")
        vals = sw.get("values")
        if not isinstance(vals, list) or not vals:
            raise ConfigError("sweep.values: expected a non-empty list")
        for v in vals:
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"sweep.values: expected numbers, got {v!r}")
        if sweep_axis == "thickness":
            sweep_values = [float(v) * 1000.0 for v in vals]       # mm -> um
        else:
            sweep_values = [math.radians(float(v)) for v in vals]  # deg -> rad

    return RunConfig(spdc=spdc, n_max=n_max, p_modes=p_modes, detector=params,
                     noise=noise, step_deg=step, four_shot=four_shot,
                     input_spectrum_csv=det.get("input_spectrum_csv"),
                     sweep_axis=sweep_axis, sweep_values=sweep_values, raw=raw)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    return parse_config(raw)
