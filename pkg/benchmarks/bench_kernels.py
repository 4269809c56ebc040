"""Compare the compiled integrand kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--m 256] [--pairs 64] [--repeat 3]

Times the hot loop of spectrum assembly (one pump-times-phase-matching grid
per radial node pair) for both backends and reports the speedup, plus the
maximum numerical deviation between them.
"""

import argparse
import time

import numpy as np

from oamspdc import kernels
from oamspdc.crystal import CrystalConfig, optical_constants
from oamspdc.quadrature import azimuthal_nodes, radial_rule


def time_backend(fn, nodes, cos_phi, sin_phi, coeffs, w0, length, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for rs in nodes:
            for ri in nodes:
                fn(rs, ri, cos_phi, sin_phi, *coeffs, w0, length)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=256, help="azimuthal samples")
    ap.add_argument("--pairs", type=int, default=16,
                    help="radial nodes per axis (pairs = nodes^2)")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    import math
    cfg = CrystalConfig(theta_p=math.radians(28.66), length_um=15000.0,
                        lambda_p_um=0.405)
    k = optical_constants(cfg)
    coeffs = (
        k.k_po * (k.n_so - k.eta_p),
        1.0 / (k.n_so * k.k_po),
        k.alpha_p,
        k.beta_p**2 / (2.0 * k.eta_p * k.k_po),
        k.gamma_p**2 / (2.0 * k.eta_p * k.k_po),
    )
    phi = azimuthal_nodes(args.m)
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    nodes = radial_rule(args.pairs, 0.14).nodes

    a = kernels.integrand_grid_numpy(nodes[3], nodes[5], cos_phi, sin_phi,
                                     *coeffs, 388.0, 15000.0)
    if kernels.BACKEND != "compiled":
        print("compiled kernel unavailable; only the numpy fallback was timed")
        t_np = time_backend(kernels.integrand_grid_numpy, nodes, cos_phi,
                            sin_phi, coeffs, 388.0, 15000.0, args.repeat)
        print(f"numpy fallback: {t_np:.3f} s for {args.pairs**2} grids of {args.m}^2")
        return

    b = kernels.integrand_grid(nodes[3], nodes[5], cos_phi, sin_phi,
                               *coeffs, 388.0, 15000.0)
    print(f"max |compiled - numpy| on a sample grid: {np.abs(a - b).max():.3e}")

    t_np = time_backend(kernels.integrand_grid_numpy, nodes, cos_phi, sin_phi,
                        coeffs, 388.0, 15000.0, args.repeat)
    t_c = time_backend(kernels.integrand_grid, nodes, cos_phi, sin_phi,
                       coeffs, 388.0, 15000.0, args.repeat)
    n_grids = args.pairs**2
    print(f"{n_grids} integrand grids of {args.m}x{args.m}:")
    print(f"  numpy fallback : {t_np:.3f} s  ({1e3 * t_np / n_grids:.2f} ms/grid)")
    print(f"  compiled kernel: {t_c:.3f} s  ({1e3 * t_c / n_grids:.2f} ms/grid)")
    print(f"  speedup        : {t_np / t_c:.2f}x")


if __name__ == "__main__":
    main()
