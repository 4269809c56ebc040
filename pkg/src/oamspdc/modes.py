"""Laguerre-Gaussian mode radial profiles in the transverse-momentum basis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre

__all__ = ["LgModeSpec", "lg_radial_momentum"]


@dataclass(frozen=True)
class LgModeSpec:
    """One LG mode: OAM index l, radial index p, momentum-space waist w (um)."""

    l: int
    p: int
    w: float

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("radial index p must be >= 0")
        if self.w <= 0:
            raise ValueError("mode waist must be > 0")


def lg_radial_momentum(spec: LgModeSpec, rho) -> np.ndarray:
    """Radial profile LG^|l|_p(rho) of the momentum-space mode.

    Normalized so that integral of |LG|^2 rho drho over [0, inf) equals
    1/(2*pi); the full 2-D mode LG(rho) * exp(-i*l*phi) is then orthonormal.
    The |l|=1, p=0 profile peaks at rho = sqrt(2)/w under this convention.
    """
    rho = np.asarray(rho, dtype=float)
    la, p, w = abs(spec.l), spec.p, spec.w
    u = 0.5 * (w * rho) ** 2
    norm = w * math.sqrt(
        math.gamma(p + 1) / (2.0 * math.pi * math.gamma(p + la + 1))
    )
    return norm * u ** (la / 2.0) * eval_genlaguerre(p, la, u) * np.exp(-u / 2.0)
