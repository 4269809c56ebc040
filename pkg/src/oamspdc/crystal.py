"""Material dispersion and phase matching for a uniaxial crystal.

Units: lengths in micrometers, transverse wavevectors in rad/um, angles in
radians. Degrees only appear at the CLI boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

__all__ = [
    "SellmeierData",
    "CrystalConfig",
    "CrystalOpticalConstants",
    "TransverseMomentum",
    "load_sellmeier",
    "refractive_index",
    "optical_constants",
    "delta_kz",
    "phase_matching_amplitude",
    "pump_amplitude",
]


@dataclass(frozen=True)
class SellmeierData:
    """Per-polarization coefficients of n^2 = A + B/(lam^2 - C) + D*lam^2."""

    material: str
    ordinary: tuple[float, float, float, float]
    extraordinary: tuple[float, float, float, float]
    valid_band_um: tuple[float, float]
    source: str = ""


def load_sellmeier(path=None) -> SellmeierData:
    """Load Sellmeier data from a JSON file; default is the bundled BBO set."""
    if path is None:
        text = resources.files("oamspdc.data").joinpath("bbo_sellmeier.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = json.loads(text)
    coeff = raw["coefficients"]

    def as_tuple(d):
        return (d["A"], d["B"], d["C"], d["D"])

    return SellmeierData(
        material=raw["material"],
        ordinary=as_tuple(coeff["ordinary"]),
        extraordinary=as_tuple(coeff["extraordinary"]),
        valid_band_um=tuple(raw["valid_band_um"]),
        source=raw.get("source", ""),
    )


def refractive_index(lambda_um: float, polarization: str, sellmeier: SellmeierData) -> float:
    """Refractive index n(lambda) for 'ordinary' or 'extraordinary' polarization."""
    lo, hi = sellmeier.valid_band_um
    if not (lo <= lambda_um <= hi):
        raise ValueError(
            f"wavelength {lambda_um} um outside supported band [{lo}, {hi}] um"
        )
    if polarization == "ordinary":
        a, b, c, d = sellmeier.ordinary
    elif polarization == "extraordinary":
        a, b, c, d = sellmeier.extraordinary
    else:
        raise ValueError(f"unknown polarization {polarization!r}")
    n2 = a + b / (lambda_um**2 - c) + d * lambda_um**2
    return math.sqrt(n2)


@dataclass(frozen=True)
class CrystalConfig:
    """Crystal cut and pump: phase-matching angle, thickness, pump wavelength."""

    theta_p: float          # rad, angle between optic axis and pump propagation
    length_um: float        # crystal thickness L
    lambda_p_um: float      # pump vacuum wavelength
    sellmeier: SellmeierData = field(default_factory=load_sellmeier)

    def __post_init__(self):
        if not (0.0 <= self.theta_p <= math.pi / 2):
            raise ValueError("theta_p must lie in [0, pi/2]")
        if self.length_um < 0:
            raise ValueError("crystal thickness must be >= 0")
        if self.lambda_p_um <= 0:
            raise ValueError("pump wavelength must be > 0")


@dataclass(frozen=True)
class CrystalOpticalConstants:
    """Derived quantities entering the longitudinal phase mismatch.

    alpha_p is the walk-off slope (tan of the Poynting-vector walk-off angle
    zeta_p), beta_p/gamma_p the elliptical anisotropy factors, and eta_p the
    effective extraordinary index seen by the pump at theta_p.
    """

    n_po: float
    n_pe: float
    n_so: float
    k_po: float     # pump vacuum wavenumber 2*pi/lambda_p, rad/um
    alpha_p: float
    beta_p: float
    gamma_p: float
    eta_p: float
    zeta_p: float   # walk-off angle, rad


def optical_constants(cfg: CrystalConfig) -> CrystalOpticalConstants:
    """Evaluate all anisotropy constants at the configured angle and wavelength."""
    n_po = refractive_index(cfg.lambda_p_um, "ordinary", cfg.sellmeier)
    n_pe = refractive_index(cfg.lambda_p_um, "extraordinary", cfg.sellmeier)
    # degenerate, ordinary-polarized signal/idler at twice the pump wavelength
    n_so = refractive_index(2.0 * cfg.lambda_p_um, "ordinary", cfg.sellmeier)

    st, ct = math.sin(cfg.theta_p), math.cos(cfg.theta_p)
    den = n_po**2 * st**2 + n_pe**2 * ct**2
    alpha_p = (n_po**2 - n_pe**2) * st * ct / den
    beta_p = n_po * n_pe / den
    gamma_p = n_po / math.sqrt(den)
    eta_p = n_po * n_pe / math.sqrt(den)

    return CrystalOpticalConstants(
        n_po=n_po,
        n_pe=n_pe,
        n_so=n_so,
        k_po=2.0 * math.pi / cfg.lambda_p_um,
        alpha_p=alpha_p,
        beta_p=beta_p,
        gamma_p=gamma_p,
        eta_p=eta_p,
        zeta_p=math.atan(alpha_p),
    )


@dataclass(frozen=True)
class TransverseMomentum:
    """Polar transverse-wavevector coordinate of a down-converted photon."""

    rho: float  # rad/um, >= 0
    phi: float  # rad

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be >= 0")


def delta_kz(q_s: TransverseMomentum, q_i: TransverseMomentum,
             k: CrystalOpticalConstants) -> float:
    """Longitudinal phase mismatch k_sz + k_iz - k_pz, in rad/um.

    Four terms: collinear offset, paraxial curvature, walk-off (linear in
    alpha_p) and the elliptical quadratic correction in beta_p, gamma_p.
    """
    a = q_s.rho * math.cos(q_s.phi) + q_i.rho * math.cos(q_i.phi)
    b = q_s.rho * math.sin(q_s.phi) + q_i.rho * math.sin(q_i.phi)
    return (
        k.k_po * (k.n_so - k.eta_p)
        - (q_s.rho**2 + q_i.rho**2) / (k.n_so * k.k_po)
        + k.alpha_p * a
        + (k.beta_p**2 * a**2 + k.gamma_p**2 * b**2) / (2.0 * k.eta_p * k.k_po)
    )


def phase_matching_amplitude(q_s: TransverseMomentum, q_i: TransverseMomentum,
                             k: CrystalOpticalConstants, length_um: float) -> complex:
    """L * sinc(dkz*L/2) * exp(i*dkz*L/2), with sinc(0) = 1."""
    if length_um < 0:
        raise ValueError("crystal thickness must be >= 0")
    x = delta_kz(q_s, q_i, k) * length_um / 2.0
    return length_um * np.sinc(x / np.pi) * complex(math.cos(x), math.sin(x))


def pump_amplitude(q_s: TransverseMomentum, q_i: TransverseMomentum, w0_um: float) -> float:
    """Gaussian pump angular spectrum exp(-(w0^2/4) |q_s + q_i|^2)."""
    if w0_um <= 0:
        raise ValueError("pump waist must be > 0")
    s2 = (
        q_s.rho**2 + q_i.rho**2
        + 2.0 * q_s.rho * q_i.rho * math.cos(q_s.phi - q_i.phi)
    )
    return math.exp(-(w0_um**2 / 4.0) * s2)
