# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluation of the pump-times-phase-matching integrand grid.

Single fused pass over the (phi_s, phi_i) grid; avoids the ~10 temporary
arrays the numpy fallback allocates per radial pair.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin

cnp.import_array()


def integrand_grid(double rho_s, double rho_i,
                   cnp.ndarray[cnp.float64_t, ndim=1] cos_phi,
                   cnp.ndarray[cnp.float64_t, ndim=1] sin_phi,
                   double c0, double c_par, double alpha,
                   double c_beta, double c_gamma,
                   double w0, double length, out=None):
    """Same contract as the numpy fallback: returns V*Phi on the m x m grid."""
    cdef Py_ssize_t m = cos_phi.shape[0]
    if out is None:
        out = np.empty((m, m), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] res = out
    cdef Py_ssize_t i, j
    cdef double cs, ss, ci, sj, a, b, dkz, pump, x, sinc, amp
    cdef double rr = rho_s * rho_s + rho_i * rho_i
    cdef double base = c0 - c_par * rr
    cdef double wq = w0 * w0 / 4.0
    cdef double half_l = length / 2.0

    for i in range(m):
        cs = rho_s * cos_phi[i]
        ss = rho_s * sin_phi[i]
        for j in range(m):
            ci = rho_i * cos_phi[j]
            sj = rho_i * sin_phi[j]
            a = cs + ci
            b = ss + sj
            dkz = base + alpha * a + c_beta * a * a + c_gamma * b * b
            pump = exp(-wq * (rr + 2.0 * (cs * ci + ss * sj)))
            x = dkz * half_l
            if x > 1e-8 or x < -1e-8:
                sinc = sin(x) / x
            else:
                sinc = 1.0 - x * x / 6.0
            amp = pump * length * sinc
            res[i, j] = amp * cos(x) + 1j * (amp * sin(x))
    return res
