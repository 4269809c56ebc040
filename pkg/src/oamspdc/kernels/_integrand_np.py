"""Pure-numpy evaluation of the pump-times-phase-matching integrand grid."""

import numpy as np


def integrand_grid(rho_s, rho_i, cos_phi, sin_phi,
                   c0, c_par, alpha, c_beta, c_gamma, w0, length, out=None):
    """V * Phi sampled on the (phi_s, phi_i) product grid for one radial pair.

    cos_phi/sin_phi are the shared azimuthal sample vectors (length m).
    c0      : collinear mismatch k_po*(n_so - eta_p)
    c_par   : paraxial coefficient 1/(n_so*k_po)
    c_beta  : beta_p^2 / (2*eta_p*k_po)
    c_gamma : gamma_p^2 / (2*eta_p*k_po)
    """
    cs, ss = rho_s * cos_phi, rho_s * sin_phi
    ci, si = rho_i * cos_phi, rho_i * sin_phi
    a = cs[:, None] + ci[None, :]
    b = ss[:, None] + si[None, :]
    dkz = (c0 - c_par * (rho_s**2 + rho_i**2)
           + alpha * a + c_beta * a * a + c_gamma * b * b)
    dot = cs[:, None] * ci[None, :] + ss[:, None] * si[None, :]
    pump = np.exp(-(w0 * w0 / 4.0) * (rho_s**2 + rho_i**2 + 2.0 * dot))
    x = dkz * (length / 2.0)
    val = pump * length * np.sinc(x / np.pi) * np.exp(1j * x)
    if out is None:
        return val
    out[...] = val
    return out
