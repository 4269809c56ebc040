"""Azimuthal Fourier extraction and radial quadrature unit tests."""

import math

import numpy as np
import pytest

from oamspdc.quadrature import (AzimuthalGrid, azimuthal_fourier_coefficients,
                                azimuthal_nodes, parallel_reduce, radial_rule)


def grid_from_function(fn, m):
    phi = azimuthal_nodes(m)
    ps, pi = np.meshgrid(phi, phi, indexing="ij")
    return AzimuthalGrid(fn(ps, pi))


def test_constant_function():
    g = grid_from_function(lambda ps, pi: np.ones_like(ps), 64)
    f = azimuthal_fourier_coefficients(g, 3)
    expect = np.zeros((7, 7), dtype=complex)
    expect[3, 3] = 1.0
    assert np.abs(f - expect).max() < 1e-14


def test_single_harmonic():
    # f = exp(-i(phi_s - phi_i)) -> only F(1, -1) survives
    g = grid_from_function(lambda ps, pi: np.exp(-1j * (ps - pi)), 64)
    f = azimuthal_fourier_coefficients(g, 3)
    assert f[3 + 1, 3 - 1] == pytest.approx(1.0, abs=1e-13)
    mask = np.ones((7, 7), dtype=bool)
    mask[3 + 1, 3 - 1] = False
    assert np.abs(f[mask]).max() < 1e-13


def test_random_trig_polynomial_vs_brute_force():
    """Degree <= 5 trigonometric polynomial against an explicit double sum."""
    rng = np.random.default_rng(11)
    deg = 5
    coef = rng.normal(size=(2 * deg + 1, 2 * deg + 1)) \
        + 1j * rng.normal(size=(2 * deg + 1, 2 * deg + 1))
    m = 64
    phi = azimuthal_nodes(m)

    def f(ps, pi):
        out = np.zeros(np.broadcast(ps, pi).shape, dtype=complex)
        for a in range(-deg, deg + 1):
            for b in range(-deg, deg + 1):
                out = out + coef[a + deg, b + deg] * np.exp(1j * (a * ps + b * pi))
        return out

    g = grid_from_function(f, m)
    got = azimuthal_fourier_coefficients(g, deg)

    # brute-force Riemann double sum for each (l_s, l_i)
    ps, pi = np.meshgrid(phi, phi, indexing="ij")
    for ls in range(-deg, deg + 1):
        for li in range(-deg, deg + 1):
            kern = np.exp(1j * (ls * ps + li * pi))
            ref = (g.samples * kern).sum() / m**2
            assert got[ls + deg, li + deg] == pytest.approx(ref, abs=1e-12)


def test_conjugate_symmetry_for_real_integrand():
    rng = np.random.default_rng(5)
    phi = azimuthal_nodes(32)
    ps, pi = np.meshgrid(phi, phi, indexing="ij")
    samples = np.cos(ps) + 0.3 * np.cos(2 * ps - pi) + 0.1  # real
    f = azimuthal_fourier_coefficients(AzimuthalGrid(samples), 3)
    flipped = np.conj(f[::-1, ::-1])
    assert np.abs(f - flipped).max() < 1e-14


def test_doubling_m_is_stable_for_bandlimited_input():
    def fn(ps, pi):
        return np.exp(1j * (2 * ps - pi)) + 0.5 * np.exp(-3j * pi)

    f1 = azimuthal_fourier_coefficients(grid_from_function(fn, 32), 3)
    f2 = azimuthal_fourier_coefficients(grid_from_function(fn, 64), 3)
    assert np.abs(f1 - f2).max() < 1e-12


def test_aliasing_rejected():
    g = grid_from_function(lambda ps, pi: np.ones_like(ps), 16)
    with pytest.raises(ValueError, match="alias"):
        azimuthal_fourier_coefficients(g, 4)  # needs m >= 2*(2*4+1) = 18


def test_radial_rule_polynomial_exactness():
    rule = radial_rule(8, 2.0)
    # integral of rho_s * rho_i over [0, R]^2 = (R^2/2)^2
    total = 0.0
    for i in range(8):
        for j in range(8):
            total += rule.pair_weight(i, j)
    assert total == pytest.approx((2.0**2 / 2.0) ** 2, rel=1e-13)


def test_radial_rule_gaussian_integral():
    # closed form: (integral_0^inf e^{-r^2} r dr)^2 = 1/4
    rule = radial_rule(64, 6.0)
    w = rule.weights * rule.nodes
    vals = np.exp(-rule.nodes**2)
    total = float(np.outer(w * vals, w * vals).sum())
    assert total == pytest.approx(0.25, abs=1e-8)


def test_trapezoid_scheme():
    rule = radial_rule(2001, 1.0, scheme="trapezoid")
    w = rule.weights * rule.nodes
    assert float(np.outer(w, w).sum()) == pytest.approx(0.25, rel=1e-5)


def test_clipped_integral_smaller():
    big = radial_rule(32, 0.2)
    small = radial_rule(32, 0.1)

    def mass(rule):
        w = rule.weights * rule.nodes
        vals = np.exp(-10.0 * rule.nodes)
        return float(np.outer(w * vals, w * vals).sum())

    assert mass(small) < mass(big)


def test_rule_validation():
    with pytest.raises(ValueError):
        radial_rule(1, 1.0)
    with pytest.raises(ValueError):
        radial_rule(8, -1.0)
    with pytest.raises(ValueError):
        radial_rule(8, 1.0, scheme="simpson")


def test_parallel_reduce_determinism():
    rng = np.random.default_rng(3)
    data = rng.normal(size=1000)

    def ev(i):
        return data[i] * 1.0000001

    serial = parallel_reduce(range(1000), ev, lambda a, b: a + b, 0.0, threads=1)
    threaded = parallel_reduce(range(1000), ev, lambda a, b: a + b, 0.0, threads=4)
    assert serial == threaded  # bit-identical, fixed reduction order


def test_parallel_reduce_empty():
    assert parallel_reduce([], lambda x: x, lambda a, b: a + b, 42, threads=3) == 42


def test_parallel_reduce_matches_serial_sum_exactly():
    vals = [math.sin(i) for i in range(10000)]
    serial = 0.0
    for v in vals:
        serial += v
    reduced = parallel_reduce(range(10000), lambda i: vals[i],
                              lambda a, b: a + b, 0.0, threads=8)
    assert reduced == serial  # 0 ulp difference under fixed-order reduction
