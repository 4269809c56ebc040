"""Numerical kernels: azimuthal Fourier extraction and radial quadrature rules."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AzimuthalGrid",
    "RadialRule",
    "azimuthal_nodes",
    "azimuthal_fourier_coefficients",
    "radial_rule",
    "parallel_reduce",
]


def azimuthal_nodes(m: int) -> np.ndarray:
    """Uniform angular samples phi_k = -pi + 2*pi*k/m, k = 0..m-1."""
    if m <= 0:
        raise ValueError("sample count must be positive")
    return -np.pi + 2.0 * np.pi * np.arange(m) / m


@dataclass(frozen=True)
class AzimuthalGrid:
    """Samples of f(phi_s, phi_i) on the m x m uniform angular grid."""

    samples: np.ndarray  # (m, m), complex or real

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 2:
            raise ValueError("samples must be a square matrix with m >= 2")

    @property
    def m(self) -> int:
        return self.samples.shape[0]


def azimuthal_fourier_coefficients(grid: AzimuthalGrid, n_max: int) -> np.ndarray:
    """All 2-D Fourier coefficients F(l_s, l_i) for |l_s|, |l_i| <= n_max.

    F(l_s, l_i) = (1/4pi^2) * integral of f * exp(i*(l_s*phi_s + l_i*phi_i)),
    approximated by the discrete transform over the uniform grid. Exact for
    trigonometric polynomials of azimuthal degree < m/2.

    The returned matrix is indexed by (l_s + n_max, l_i + n_max).
    """
    m = grid.m
    if m < 2 * (2 * n_max + 1):
        raise ValueError(
            f"m = {m} azimuthal samples alias mode cutoff {n_max}; "
            f"need m >= {2 * (2 * n_max + 1)}"
        )
    # FFT computes sum f * exp(-2i*pi*k*j/m); the +l kernel lands at bin -l.
    # With phi starting at -pi each coefficient also picks up (-1)^(l_s+l_i).
    f = np.fft.fft2(grid.samples) / m**2
    ls = np.arange(-n_max, n_max + 1)
    idx = (-ls) % m
    sign = (-1.0) ** np.abs(ls)
    return f[np.ix_(idx, idx)] * np.outer(sign, sign)


@dataclass(frozen=True)
class RadialRule:
    """Tensor-product nodes/weights for the double radial integral.

    Weights include the polar Jacobian rho_s * rho_i, so summing
    weight * g(rho_s, rho_i) approximates
    integral g * rho_s * rho_i drho_s drho_i over [0, rho_hi]^2.
    """

    nodes: np.ndarray    # (n,), 1-D nodes shared by both axes
    weights: np.ndarray  # (n,), 1-D weights without the Jacobian
    rho_hi: float

    def pair_weight(self, i: int, j: int) -> float:
        return (self.weights[i] * self.nodes[i]) * (self.weights[j] * self.nodes[j])


def radial_rule(n_nodes: int, rho_hi: float, scheme: str = "gauss") -> RadialRule:
    """Build a tensor-product radial rule on [0, rho_hi]^2."""
    if n_nodes < 2:
        raise ValueError("need at least 2 nodes per axis")
    if rho_hi <= 0:
        raise ValueError("rho_hi must be > 0")
    if scheme == "gauss":
        x, w = np.polynomial.legendre.leggauss(n_nodes)
        nodes = 0.5 * rho_hi * (x + 1.0)
        weights = 0.5 * rho_hi * w
    elif scheme == "trapezoid":
        nodes = np.linspace(0.0, rho_hi, n_nodes)
        weights = np.full(n_nodes, rho_hi / (n_nodes - 1))
        weights[0] *= 0.5
        weights[-1] *= 0.5
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return RadialRule(nodes=nodes, weights=weights, rho_hi=rho_hi)


def parallel_reduce(items, evaluate, combine, identity, threads: int = 1):
    """Deterministic fixed-order reduction of evaluate(item) over items.

    The combine order is the input order regardless of thread count, so the
    result is bit-reproducible. `combine` must be associative; items must be
    independent.
    """
    items = list(items)
    if not items:
        return identity
    if threads <= 1:
        acc = identity
        for it in items:
            acc = combine(acc, evaluate(it))
        return acc
    with ThreadPoolExecutor(max_workers=threads) as pool:
        acc = identity
        # executor.map preserves input order
        for value in pool.map(evaluate, items):
            acc = combine(acc, value)
        return acc
