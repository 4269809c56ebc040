"""Joint OAM spectra of degenerate Type-I SPDC photon pairs.

The central object is the (2N+1) x (2N+1) probability matrix P[l_s, l_i].
Each entry is a double radial integral of the squared azimuthal Fourier
coefficient of the pump-times-phase-matching integrand; the azimuthal
transform is done with an FFT over a uniform angular grid and the radial
integral with Gauss-Legendre nodes carrying the polar Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.fft import next_fast_len
from scipy.optimize import brentq, minimize_scalar

from . import kernels
from .crystal import CrystalConfig, CrystalOpticalConstants, optical_constants
from .modes import LgModeSpec, lg_radial_momentum
from .quadrature import azimuthal_nodes, parallel_reduce, radial_rule

__all__ = [
    "QuadratureSpec",
    "SpdcConfig",
    "SpectrumMatrix",
    "joint_oam_spectrum",
    "mode_projected_probability",
    "mode_projected_spectrum",
    "optimal_projection_waist",
    "nonconservation",
    "schmidt_antidiagonal",
    "schmidt_width",
    "marginal_sigma",
    "collected_power_fraction",
    "sweep",
]

BOUNDARY_MASS_TOL = 1e-6


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretization knobs; None means choose automatically from the config."""

    azimuthal_m: int | None = None
    radial_nodes: int | None = None
    rho_hi: float | None = None  # rad/um; None -> automatic unclipped cutoff

    def __post_init__(self):
        if self.radial_nodes is not None and self.radial_nodes < 2:
            raise ValueError("radial_nodes must be >= 2")
        if self.rho_hi is not None and self.rho_hi <= 0:
            raise ValueError("rho_hi must be > 0")


@dataclass(frozen=True)
class SpdcConfig:
    """Crystal + pump + quadrature description of one SPDC source."""

    crystal: CrystalConfig
    pump_waist_um: float
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    clip_ratio: float | None = None  # collection aperture rho_0 / sigma_s

    def __post_init__(self):
        if self.pump_waist_um <= 0:
            raise ValueError("pump waist must be > 0")
        if self.clip_ratio is not None and self.clip_ratio <= 0:
            raise ValueError("clip_ratio must be > 0")


@dataclass
class SpectrumMatrix:
    """Non-negative joint OAM probabilities over (l_s, l_i) in [-N, N]^2."""

    n_max: int
    values: np.ndarray
    normalized: bool = False
    report: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2 * self.n_max + 1, 2 * self.n_max + 1):
            raise ValueError("values must be (2N+1) x (2N+1)")
        if (v < 0).any():
            raise ValueError("spectrum entries must be >= 0")
        self.values = v

    def at(self, l_s: int, l_i: int) -> float:
        return self.values[l_s + self.n_max, l_i + self.n_max]

    def normalize(self) -> "SpectrumMatrix":
        total = self.values.sum()
        if total <= 0:
            raise ValueError("cannot normalize an all-zero spectrum")
        return SpectrumMatrix(self.n_max, self.values / total, True, dict(self.report))


def _auto_rho_hi(k: CrystalOpticalConstants, w0: float, length: float) -> float:
    """Unclipped radial cutoff: cover both the pump envelope and the region
    where the paraxial mismatch keeps the sinc envelope appreciable."""
    pump = 8.0 / w0
    if length <= 0:
        return pump
    # paraxial term reaches ~pi at this radius; beyond it the integrand rings
    # down and contributes little after the azimuthal transform
    sinc_scale = math.sqrt(2.0 * math.pi * k.n_so * k.k_po / length)
    return max(pump, min(sinc_scale, 0.25))


def _auto_azimuthal_m(k: CrystalOpticalConstants, length: float,
                      rho_hi: float, n_max: int, w0: float) -> int:
    """Angular sample count covering the integrand's azimuthal bandwidth.

    Two contributions: the walk-off / elliptical phase swing (harmonics up
    to ~ alpha*rho*L), and the pump envelope, which confines the integrand
    to a strip of angular width ~ 1/(w0*rho) and therefore convolves those
    harmonics with a kernel of width ~ w0*rho. Undersampling the strip
    aliases mass between modes, so both terms enter the sample count.
    """
    swing = 0.5 * length * (
        k.alpha_p * 2.0 * rho_hi
        + (k.beta_p**2 + k.gamma_p**2) / (2.0 * k.eta_p * k.k_po) * (2.0 * rho_hi) ** 2
    )
    strip = w0 * rho_hi
    m = max(2 * (2 * n_max + 1), int(math.ceil(2.0 * (swing + 2.5 * strip))), 64)
    return next_fast_len(m, real=False)


def _auto_radial_nodes(w0: float, rho_hi: float) -> int:
    """Node count resolving the pump ridge |rho_s - rho_i| ~ sqrt(2)/w0.

    The pump envelope confines the radial integrand to a ridge of width
    ~ sqrt(2)/w0 around rho_s = rho_i; Gauss-Legendre spacing must stay a
    fraction of that width or the ridge is undersampled (empirically a
    percent-level bias in the spectrum). 2 * w0 * rho_hi nodes puts ~3 nodes
    per ridge standard deviation at mid-interval.
    """
    return max(64, 32 * math.ceil(2.0 * w0 * rho_hi / 32.0))


def _resolve_quadrature(cfg: SpdcConfig, n_max: int):
    """Return (constants, rho_hi, m, radial rule, report)."""
    k = optical_constants(cfg.crystal)
    length = cfg.crystal.length_um
    report = {}
    if cfg.quadrature.rho_hi is not None:
        rho_hi = cfg.quadrature.rho_hi
        report["rho_hi_source"] = "explicit"
    elif cfg.clip_ratio is not None:
        sigma = marginal_sigma(cfg)
        rho_hi = cfg.clip_ratio * sigma
        report["sigma_s"] = sigma
        report["rho_hi_source"] = "clip_ratio"
    else:
        rho_hi = _auto_rho_hi(k, cfg.pump_waist_um, length)
        report["rho_hi_source"] = "auto"
    m = cfg.quadrature.azimuthal_m or _auto_azimuthal_m(k, length, rho_hi, n_max,
                                                        cfg.pump_waist_um)
    if m < 2 * (2 * n_max + 1):
        raise ValueError(
            f"azimuthal_m = {m} aliases mode cutoff {n_max}; "
            f"need at least {2 * (2 * n_max + 1)}"
        )
    nodes = cfg.quadrature.radial_nodes or _auto_radial_nodes(cfg.pump_waist_um,
                                                              rho_hi)
    rule = radial_rule(nodes, rho_hi)
    report.update(rho_hi=rho_hi, azimuthal_m=m, radial_nodes=nodes,
                  kernel_backend=kernels.BACKEND)
    return k, rho_hi, m, rule, report


def _kernel_coeffs(k: CrystalOpticalConstants):
    return (
        k.k_po * (k.n_so - k.eta_p),
        1.0 / (k.n_so * k.k_po),
        k.alpha_p,
        k.beta_p**2 / (2.0 * k.eta_p * k.k_po),
        k.gamma_p**2 / (2.0 * k.eta_p * k.k_po),
    )


def _fourier_block(f: np.ndarray, n_max: int) -> np.ndarray:
    """Azimuthal Fourier coefficients F(l_s, l_i), |l| <= n_max, of one grid.

    Includes the 1/(4*pi^2) prefactor of the angular double integral. The
    (-1)^(l_s+l_i) phase from the phi = -pi grid origin is dropped: every
    consumer uses |F|^2 or products where it cancels against the mode phase
    convention chosen for the LG profiles.
    """
    m = f.shape[0]
    fc = np.fft.fft2(f) / (m * m)
    idx = (-np.arange(-n_max, n_max + 1)) % m
    return fc[np.ix_(idx, idx)]


def joint_oam_spectrum(cfg: SpdcConfig, n_max: int, threads: int = 1) -> SpectrumMatrix:
    """All-p joint OAM spectrum, normalized to unit total."""
    k, rho_hi, m, rule, report = _resolve_quadrature(cfg, n_max)
    coeffs = _kernel_coeffs(k)
    w0 = cfg.pump_waist_um
    length = cfg.crystal.length_um
    cos_phi = np.cos(azimuthal_nodes(m))
    sin_phi = np.sin(azimuthal_nodes(m))
    nodes, weights = rule.nodes, rule.weights
    n = len(nodes)

    def eval_row(i):
        """Contribution of radial row i, exploiting s<->i exchange symmetry:
        the pair (j, i) integrand is the transpose of the (i, j) one."""
        acc = np.zeros((2 * n_max + 1, 2 * n_max + 1))
        peak = boundary = 0.0
        for j in range(i, n):
            f = kernels.integrand_grid(nodes[i], nodes[j], cos_phi, sin_phi,
                                       *coeffs, w0, length)
            mag = (f.real**2 + f.imag**2).max()
            peak = max(peak, mag)
            if i == n - 1 or j == n - 1:
                boundary = max(boundary, mag)
            w = (weights[i] * nodes[i]) * (weights[j] * nodes[j])
            block = _fourier_block(f, n_max)
            p = w * (block.real**2 + block.imag**2)
            acc += p if i == j else p + p.T
        return acc, peak, boundary

    def combine(a, b):
        return a[0] + b[0], max(a[1], b[1]), max(a[2], b[2])

    zero = (np.zeros((2 * n_max + 1, 2 * n_max + 1)), 0.0, 0.0)
    total, peak, boundary = parallel_reduce(range(n), eval_row, combine, zero, threads)
    ratio = float(boundary / peak) if peak > 0 else 0.0
    report["boundary_to_peak"] = ratio
    if ratio > BOUNDARY_MASS_TOL:
        report["boundary_mass_warning"] = ratio
    report["total_mass"] = float(total.sum())
    return SpectrumMatrix(n_max, total, report=report).normalize()


def _lg_node_profiles(rule, p_pairs, waist):
    """LG radial profiles evaluated on the radial nodes for each (p_s, p_i)."""
    out = {}
    for ps, pi in p_pairs:
        gs = lg_radial_momentum(LgModeSpec(0, ps, waist), rule.nodes)
        gi = lg_radial_momentum(LgModeSpec(0, pi, waist), rule.nodes)
        out[(ps, pi)] = (gs, gi)
    return out


def mode_projected_spectrum(cfg: SpdcConfig, n_max: int,
                            p_pairs=((0, 0),), waist: float | None = None,
                            threads: int = 1) -> SpectrumMatrix:
    """Spectrum seen by a mode-projective detector: sum over the given
    (p_s, p_i) radial-index pairs of |C|^2, normalized over the band.

    The LG azimuthal factor only shifts the Fourier index, so the same
    azimuthal transform serves every l; the radial overlap against the LG
    profiles replaces the plain Jacobian weights of the all-p spectrum.
    Note the radial profile depends on |l| only through rho^|l|; since the
    projection waist is shared, the |l| dependence is carried exactly by
    evaluating the profile per l below.
    """
    if waist is None:
        waist = optimal_projection_waist(cfg)
    k, rho_hi, m, rule, report = _resolve_quadrature(cfg, n_max)
    report.update(projection_waist_um=waist, p_pairs=list(map(tuple, p_pairs)))
    coeffs = _kernel_coeffs(k)
    w0, length = cfg.pump_waist_um, cfg.crystal.length_um
    phi = azimuthal_nodes(m)
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    nodes, weights = rule.nodes, rule.weights
    n = len(nodes)
    ls = np.arange(-n_max, n_max + 1)

    # radial profiles per (p, |l|): shape (2N+1, n_nodes)
    def profiles(p):
        return np.array([
            lg_radial_momentum(LgModeSpec(l, p, waist), nodes) for l in ls
        ])

    prof_cache = {p: profiles(p) for p in {p for pair in p_pairs for p in pair}}

    shape = (2 * n_max + 1, 2 * n_max + 1)

    def eval_row(i):
        acc = {pair: np.zeros(shape, dtype=complex) for pair in p_pairs}
        for j in range(i, n):
            f = kernels.integrand_grid(nodes[i], nodes[j], cos_phi, sin_phi,
                                       *coeffs, w0, length)
            block = 4.0 * math.pi**2 * _fourier_block(f, n_max)
            wij = (weights[i] * nodes[i]) * (weights[j] * nodes[j])
            for (ps, pi), c in acc.items():
                gs, gi = prof_cache[ps], prof_cache[pi]
                # signal radial profile at node i, idler at node j
                c += wij * np.outer(gs[:, i], gi[:, j]) * block
                if i != j:
                    c += wij * np.outer(gs[:, j], gi[:, i]) * block.T
        return acc

    def combine(a, b):
        for key in a:
            a[key] = a[key] + b[key]
        return a

    identity = {pair: np.zeros(shape, dtype=complex) for pair in p_pairs}
    cmats = parallel_reduce(range(n), eval_row, combine, identity, threads)
    total = np.zeros(shape)
    for c in cmats.values():
        total += c.real**2 + c.imag**2
    report["total_mass"] = float(total.sum())
    return SpectrumMatrix(n_max, total, report=report).normalize()


def mode_projected_probability(cfg: SpdcConfig, s_mode: LgModeSpec,
                               i_mode: LgModeSpec) -> float:
    """Unnormalized |C|^2 for one (l_s, p_s; l_i, p_i) mode pair."""
    k, rho_hi, m, rule, _ = _resolve_quadrature(cfg, max(abs(s_mode.l), abs(i_mode.l)))
    coeffs = _kernel_coeffs(k)
    w0, length = cfg.pump_waist_um, cfg.crystal.length_um
    phi = azimuthal_nodes(m)
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    # azimuthal kernels exp(i*l*phi) for the two photons
    es = np.exp(1j * s_mode.l * phi)
    ei = np.exp(1j * i_mode.l * phi)
    gs = lg_radial_momentum(s_mode, rule.nodes)
    gi = lg_radial_momentum(i_mode, rule.nodes)
    nodes, weights = rule.nodes, rule.weights
    c = 0.0 + 0.0j
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            f = kernels.integrand_grid(nodes[i], nodes[j], cos_phi, sin_phi,
                                       *coeffs, w0, length)
            inner = es @ f @ ei * (2.0 * math.pi / m) ** 2
            c += (weights[i] * nodes[i] * gs[i]) * (weights[j] * nodes[j] * gi[j]) * inner
    return float(abs(c) ** 2)


def optimal_projection_waist(cfg: SpdcConfig) -> float:
    """Projection-mode waist maximizing the fundamental (0,0;0,0) overlap.

    The l = p = 0 overlap only needs the angular mean of the integrand per
    radial pair, which is computed once and reused across waist trials.
    """
    k, rho_hi, m, rule, _ = _resolve_quadrature(cfg, 0)
    coeffs = _kernel_coeffs(k)
    w0, length = cfg.pump_waist_um, cfg.crystal.length_um
    phi = azimuthal_nodes(min(m, 128))
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    nodes, weights = rule.nodes, rule.weights
    n = len(nodes)
    mean_f = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            f = kernels.integrand_grid(nodes[i], nodes[j], cos_phi, sin_phi,
                                       *coeffs, w0, length)
            mean_f[i, j] = f.mean() * 4.0 * math.pi**2
            mean_f[j, i] = mean_f[i, j]
    wr = weights * nodes

    def neg_overlap(log_w):
        g = lg_radial_momentum(LgModeSpec(0, 0, math.exp(log_w)), nodes)
        c = (wr * g) @ mean_f @ (wr * g)
        return -abs(c)

    # search waists around the inverse of the radial support
    lo, hi = math.log(0.5 / rho_hi), math.log(200.0 / rho_hi)
    res = minimize_scalar(neg_overlap, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-3})
    return math.exp(res.x)


def nonconservation(spec: SpectrumMatrix) -> float:
    """Percentage of spectral mass off the antidiagonal l_s + l_i = 0."""
    total = spec.values.sum()
    if total <= 0:
        raise ValueError("nonconservation undefined for an all-zero spectrum")
    anti = np.trace(np.fliplr(spec.values))
    return float((1.0 - anti / total) * 100.0)


def schmidt_antidiagonal(spec: SpectrumMatrix) -> np.ndarray:
    """S_l = P[l, -l] for l = -N..N."""
    return np.fliplr(spec.values).diagonal().copy()


def schmidt_width(spec: SpectrumMatrix) -> float:
    """Standard deviation of l under the normalized antidiagonal distribution."""
    s = schmidt_antidiagonal(spec)
    total = s.sum()
    if total <= 0:
        raise ValueError("empty antidiagonal")
    ls = np.arange(-spec.n_max, spec.n_max + 1)
    mean = (ls * s).sum() / total
    return float(math.sqrt(((ls - mean) ** 2 * s).sum() / total))


def _marginal_intensity(cfg: SpdcConfig, rho_s_values, rho_hi: float,
                        m: int = 128, radial_nodes: int = 64) -> np.ndarray:
    """Signal radial intensity with the idler and both angles integrated out."""
    k = optical_constants(cfg.crystal)
    coeffs = _kernel_coeffs(k)
    w0, length = cfg.pump_waist_um, cfg.crystal.length_um
    phi = azimuthal_nodes(m)
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    rule = radial_rule(radial_nodes, rho_hi)
    dphi2 = (2.0 * math.pi / m) ** 2
    out = np.empty(len(rho_s_values))
    for a, rs in enumerate(rho_s_values):
        tot = 0.0
        for ri, wi in zip(rule.nodes, rule.weights):
            f = kernels.integrand_grid(rs, ri, cos_phi, sin_phi,
                                       *coeffs, w0, length)
            tot += wi * ri * float((f.real**2 + f.imag**2).sum()) * dphi2
        out[a] = tot
    return out


def marginal_sigma(cfg: SpdcConfig, m: int = 128, radial_nodes: int = 64) -> float:
    """Radius where the signal marginal intensity falls to exp(-2) of its peak."""
    k = optical_constants(cfg.crystal)
    rho_hi = _auto_rho_hi(k, cfg.pump_waist_um, cfg.crystal.length_um)
    grid = np.linspace(0.0, 1.5 * rho_hi, 49)
    intensity = _marginal_intensity(cfg, grid, rho_hi, m, radial_nodes)
    peak = intensity.max()
    target = peak * math.exp(-2.0)
    below = np.nonzero(intensity < target)[0]
    above = np.nonzero(intensity >= target)[0]
    if len(below) == 0 or below[0] <= above[0]:
        raise RuntimeError("marginal intensity has no exp(-2) crossing in range")
    # first downward crossing after the peak region
    idx = below[below > above[0]][0]
    lo, hi = grid[idx - 1], grid[idx]

    def excess(r):
        return _marginal_intensity(cfg, [r], rho_hi, m, radial_nodes)[0] - target

    return float(brentq(excess, lo, hi, xtol=rho_hi * 1e-4))


def collected_power_fraction(cfg: SpdcConfig, rho_0: float,
                             reference_rho: float | None = None) -> float:
    """Fraction of the signal marginal power inside the aperture rho_0."""
    k = optical_constants(cfg.crystal)
    if reference_rho is None:
        reference_rho = 2.0 * _auto_rho_hi(k, cfg.pump_waist_um, cfg.crystal.length_um)
    inner = radial_rule(48, rho_0)
    outer = radial_rule(96, reference_rho)

    def power(rule):
        vals = _marginal_intensity(cfg, rule.nodes, reference_rho)
        return float((rule.weights * rule.nodes * vals).sum())

    return power(inner) / power(outer)


def sweep(cfg: SpdcConfig, axis: str, values, n_max: int,
          p_modes: str = "all", threads: int = 1):
    """Evaluate the non-conservation parameter along a thickness/angle sweep.

    Returns a list of (value, nonconservation_percent); per-point failures
    are re-raised with the point index attached.
    """
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if axis not in ("thickness", "angle"):
        raise ValueError("axis must be 'thickness' or 'angle'")
    out = []
    for idx, v in enumerate(values):
        if axis == "thickness":
            crystal = replace(cfg.crystal, length_um=v)
        else:
            crystal = replace(cfg.crystal, theta_p=v)
        point = replace(cfg, crystal=crystal)
        try:
            if p_modes == "all":
                spec = joint_oam_spectrum(point, n_max, threads)
            elif p_modes == "p0":
                spec = mode_projected_spectrum(point, n_max, threads=threads)
            else:
                raise ValueError("p_modes must be 'all' or 'p0'")
            out.append((v, nonconservation(spec)))
        except Exception as exc:
            raise RuntimeError(f"sweep point {idx} (value {v}) failed: {exc}") from exc
    return out
