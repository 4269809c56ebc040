"""Kernel backend selection and compiled/fallback parity."""

import numpy as np
import pytest

from oamspdc import kernels

ARGS = dict(c0=1.2e-3, c_par=0.0388, alpha=0.0669, c_beta=0.021,
            c_gamma=0.0218, w0=388.0, length=15000.0)


def sample_grid(m=96, seed=0):
    rng = np.random.default_rng(seed)
    phi = np.linspace(-np.pi, np.pi, m, endpoint=False)
    rho_s, rho_i = rng.uniform(0.01, 0.15, 2)
    return rho_s, rho_i, np.cos(phi), np.sin(phi)


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "numpy")


def test_numpy_out_parameter():
    rho_s, rho_i, c, s = sample_grid()
    ref = kernels.integrand_grid_numpy(rho_s, rho_i, c, s, **ARGS)
    out = np.empty_like(ref)
    got = kernels.integrand_grid_numpy(rho_s, rho_i, c, s, **ARGS, out=out)
    assert got is out
    assert np.array_equal(out, ref)


@pytest.mark.skipif(kernels.BACKEND != "compiled",
                    reason="compiled extension not built")
def test_compiled_matches_numpy():
    for seed in range(5):
        rho_s, rho_i, c, s = sample_grid(seed=seed)
        ref = kernels.integrand_grid_numpy(rho_s, rho_i, c, s, **ARGS)
        out = np.empty_like(ref)
        kernels.integrand_grid(rho_s, rho_i, c, s, **ARGS, out=out)
        assert np.abs(out - ref).max() < 1e-13 * np.abs(ref).max()


def test_selected_backend_used_by_spectrum():
    import math

    from oamspdc.crystal import CrystalConfig
    from oamspdc.spectrum import QuadratureSpec, SpdcConfig, joint_oam_spectrum

    cfg = SpdcConfig(
        crystal=CrystalConfig(theta_p=math.radians(28.66), length_um=500.0,
                              lambda_p_um=0.405),
        pump_waist_um=388.0,
        quadrature=QuadratureSpec(azimuthal_m=64, radial_nodes=12, rho_hi=0.05))
    spec = joint_oam_spectrum(cfg, 3)
    assert spec.report["kernel_backend"] == kernels.BACKEND
