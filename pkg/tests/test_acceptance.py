"""Acceptance suite: thirteen release criteria, one test (= one verdict) each.

Every test states its tolerance in the assert so `pytest -v` reads as a
checklist. The full-scale configurations are expensive; module-scoped
fixtures share them across criteria. Expected wall time is dominated by the
N = 40 spectra (single-core: tens of minutes).

Where a criterion leaves quadrature free, tests pin modest explicit
quadrature whose convergence was established separately (see the radial-node
and azimuthal-sample scans reflected in test values below); physics
parameters are never altered from the criterion statement.
"""

import math

import numpy as np
import pytest

from oamspdc import detector
from oamspdc.crystal import CrystalConfig, optical_constants
from oamspdc.spectrum import (QuadratureSpec, SpdcConfig, SpectrumMatrix,
                              joint_oam_spectrum, marginal_sigma,
                              mode_projected_spectrum, nonconservation,
                              schmidt_antidiagonal)
from oamspdc.spectrum import _fourier_block  # criterion 13 property check

REF_THETA = math.radians(28.66)
REF_W0 = 388.0


def crystal(length_um, theta=REF_THETA):
    return CrystalConfig(theta_p=theta, length_um=length_um, lambda_p_um=0.405)


def cfg_at(length_um, theta=REF_THETA, w0=REF_W0, **quad):
    q = QuadratureSpec(**quad) if quad else QuadratureSpec()
    return SpdcConfig(crystal=crystal(length_um, theta), pump_waist_um=w0,
                      quadrature=q)


@pytest.fixture(scope="module")
def clipped_spectrum():
    """L = 15 mm, clip 2.27 sigma_s, N = 40 at default (auto) quadrature."""
    cfg = SpdcConfig(crystal=crystal(15000.0), pump_waist_um=REF_W0,
                     clip_ratio=2.27)
    return joint_oam_spectrum(cfg, 40)


@pytest.fixture(scope="module")
def unclipped_15mm():
    """L = 15 mm unclipped (auto aperture), N = 40; shared by criteria 6/7."""
    return joint_oam_spectrum(cfg_at(15000.0), 40)


def test_criterion_01_walkoff_constant():
    k = optical_constants(crystal(15000.0))
    assert k.alpha_p == pytest.approx(0.0668, abs=0.0005)


def test_criterion_02_collinear_phase_matching():
    k = optical_constants(crystal(15000.0))
    assert abs(k.n_so - k.eta_p) < 1e-3


def test_criterion_03_thin_crystal_conservation():
    spec = joint_oam_spectrum(cfg_at(10.0, azimuthal_m=256, radial_nodes=96,
                                     rho_hi=0.1), 10)
    assert nonconservation(spec) < 0.1


def test_criterion_04_exact_symmetry_selection_rule():
    # theta_p -> 0 surrogate: alpha_p = 0 and beta_p = gamma_p by symmetry
    k = optical_constants(crystal(15000.0, theta=0.0))
    assert k.alpha_p == pytest.approx(0.0, abs=1e-12)
    assert k.beta_p == pytest.approx(k.gamma_p, rel=1e-12)
    spec = joint_oam_spectrum(cfg_at(15000.0, theta=0.0, radial_nodes=48,
                                     rho_hi=0.05), 6)
    off = spec.values.sum() - np.trace(np.fliplr(spec.values))
    assert off < 1e-6


def test_criterion_05_headline_nonconservation(clipped_spectrum):
    n_default = nonconservation(clipped_spectrum)
    rho = clipped_spectrum.report["rho_hi"]
    m_auto = clipped_spectrum.report["azimuthal_m"]

    # quadrature-doubling stability (< 0.5 pts), each axis at a fixed other:
    # azimuthal doubling at 64 radial nodes, radial doubling at m = 405
    # (azimuthal convergence from 405 up was established bit-stably).
    def n_at(m, nodes):
        cfg = SpdcConfig(crystal=crystal(15000.0), pump_waist_um=REF_W0,
                         quadrature=QuadratureSpec(azimuthal_m=m,
                                                   radial_nodes=nodes,
                                                   rho_hi=rho))
        return nonconservation(joint_oam_spectrum(cfg, 40))

    assert abs(n_at(2 * m_auto, 64) - n_at(m_auto, 64)) < 0.5
    assert abs(n_at(405, 256) - n_at(405, 128)) < 0.5

    # headline value: published prediction 34.40%; tolerance +-4 pts
    assert n_default == pytest.approx(34.4, abs=4.0), (
        f"measured {n_default:.2f}%: the faithful exp(-(w0^2/4)|q_s+q_i|^2) "
        "pump envelope at w0 = 388 um gives ~49%; the published 34.40% is "
        "reproduced (34.73% converged) only under the source's misprinted "
        "envelope missing the /4, equivalently w0 = 776 um")


def test_criterion_06_thickness_sweep_shape(unclipped_15mm):
    values = {15.0: nonconservation(unclipped_15mm)}
    values[0.01] = nonconservation(
        joint_oam_spectrum(cfg_at(10.0, azimuthal_m=256, radial_nodes=96,
                                  rho_hi=0.1), 40))
    for L in (5.0, 10.0, 20.0):
        values[L] = nonconservation(joint_oam_spectrum(cfg_at(L * 1000.0), 40))
    ordered = [values[L] for L in (0.01, 5.0, 10.0, 15.0, 20.0)]
    assert all(a <= b + 1e-9 for a, b in zip(ordered, ordered[1:])), ordered
    assert values[20.0] == pytest.approx(50.0, abs=8.0), ordered


def test_criterion_07_angle_insensitivity(unclipped_15mm):
    window = [nonconservation(unclipped_15mm)]
    for off in (-3.0, -1.5, 1.5, 3.0):
        theta = math.radians(28.66 + off)
        window.append(nonconservation(
            joint_oam_spectrum(cfg_at(15000.0, theta=theta), 40)))
    spread = max(window) - min(window)
    assert spread < 10.0, (
        f"window {[f'{v:.1f}' for v in window]} spread {spread:.1f} pts: "
        "moving theta_p by degrees detunes phase matching onto an emission "
        "ring outside the collinear window; annulus integration over the full "
        "ring reproduces the off-center values, ruling out truncation")


def test_criterion_08_p0_nonconservation():
    n15 = nonconservation(mode_projected_spectrum(cfg_at(15000.0), 40))
    n5 = nonconservation(mode_projected_spectrum(cfg_at(5000.0), 40))
    assert n15 > 5.0
    assert n15 > n5 > 0.0


def test_criterion_09_detector_round_trip(clipped_spectrum):
    run = detector.run_detector(clipped_spectrum,
                                detector.InterferometerParams(), 0.9)
    rec = detector.reconstruct_symmetric(run.vis_cos, 40)
    assert detector.r_squared(rec, clipped_spectrum) > 99.9
    assert np.abs(rec.values - clipped_spectrum.values).max() < 1e-6


def test_criterion_10_noise_robustness(clipped_spectrum):
    params = detector.InterferometerParams()
    clean = detector.run_detector(clipped_spectrum, params, 0.9)
    flux = detector.run_detector(clipped_spectrum, params, 0.9,
                                 noise=detector.NoiseModel(0.10, 0.0, seed=1))
    assert np.array_equal(clean.vis_cos.values, flux.vis_cos.values)

    acc = detector.run_detector(clipped_spectrum, params, 0.9,
                                noise=detector.NoiseModel(0.0, 0.01, seed=1))
    rec = detector.reconstruct_symmetric(acc.vis_cos, 40)
    assert detector.r_squared(rec, clipped_spectrum) > 95.0


def test_criterion_11_four_shot_oracle():
    v = np.zeros((9, 9))
    v[2 + 4, 1 + 4] = 0.55   # (2, 1)
    v[-3 + 4, 4 + 4] = 0.25  # (-3, 4)
    v[0 + 4, -2 + 4] = 0.20  # (0, -2)
    spec = SpectrumMatrix(4, v, normalized=True)
    run = detector.run_detector(spec, detector.InterferometerParams(), 10.0,
                                four_shot=True)
    rec = detector.reconstruct_asymmetric(run.vis_cos, run.vis_sin, 4)
    assert np.abs(rec.values - spec.values).max() < 1e-6


def test_criterion_12_clipping_narrows_schmidt_moment():
    # The criterion pins the apertures (2.27 vs 15 sigma_s), not the waist;
    # at w0 = 388 um the 15 sigma_s aperture needs hours of quadrature, so
    # the ordering is checked at w0 = 50 um where the pump ridge is coarse
    # enough to resolve in minutes (ridge widths scale as 1/w0).
    w0 = 50.0
    base = cfg_at(15000.0, w0=w0)
    sig = marginal_sigma(base)

    def second_moment(rho, m, nodes):
        spec = joint_oam_spectrum(cfg_at(15000.0, w0=w0, azimuthal_m=m,
                                         radial_nodes=nodes, rho_hi=rho), 20)
        sl = schmidt_antidiagonal(spec)
        sl = sl / sl.sum()
        ls = np.arange(-20, 21)
        return float((sl * ls**2).sum())

    m2_clip = second_moment(2.27 * sig, 256, 64)
    m2_open_a = second_moment(15.0 * sig, 384, 192)
    m2_open_b = second_moment(15.0 * sig, 384, 256)
    assert m2_open_b == pytest.approx(m2_open_a, rel=0.05)  # quadrature-stable
    assert m2_clip < min(m2_open_a, m2_open_b)


def test_criterion_13_invariant_suites(clipped_spectrum):
    v = clipped_spectrum.values
    assert abs(v.sum() - 1.0) < 1e-10                      # normalization
    assert np.abs(v - v.T).max() < 1e-8                    # exchange symmetry
    assert np.abs(v - v[::-1, ::-1]).max() < 1e-8          # reflection symmetry

    # Fourier coefficients of a real integrand: F(-ls,-li) = conj(F(ls,li))
    rng = np.random.default_rng(0)
    block = _fourier_block(rng.random((64, 64)), 5)
    assert np.abs(block - np.conj(block[::-1, ::-1])).max() < 1e-12

    # Nyquist rejection: a 20-degree grid cannot carry N = 5
    surface = detector.VisibilitySurface(detector.angular_grid(20.0),
                                         np.zeros((9, 9)), 20.0)
    with pytest.raises(ValueError):
        detector.reconstruct_symmetric(surface, 5)
