"""Two-photon interferometric OAM detector: forward model and reconstruction.

Forward direction: a normalized joint OAM spectrum plus interferometer
parameters produce coincidence surfaces R(theta_s, theta_i) at global phase
delta, optionally with multiplicative flux
noise and additive accidentals. Two phase shots give a visibility surface;
its 2-D cosine transform on a Nyquist-valid angular grid returns the
spectrum. A four-shot variant adds the sine kernel and recovers spectra
without inversion symmetry.

Angular grids are uniform in theta with n * step = 180 degrees and samples
theta_j = -90 + j*step. The +90 degree sample is omitted: every kernel has
period 180 degrees in each angle, so it would duplicate the -90 degree
measurement; omitting it is what makes the discrete cosine/sine family
exactly orthogonal on the grid.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .spectrum import SpectrumMatrix

__all__ = [
    "PolarizationResponse",
    "InterferometerParams",
    "NoiseModel",
    "VisibilitySurface",
    "DetectorRun",
    "required_angular_step",
    "angular_grid",
    "mode_transform_phase",
    "coincidence_probability",
    "measured_coincidence",
    "delta_scan_extrema",
    "visibility",
    "run_detector",
    "polarization_correct",
    "reconstruct_symmetric",
    "reconstruct_asymmetric",
    "r_squared",
]

MIN_COS_PSI = 1e-6  # below this the polarization correction is singular
FOUR_SHOT_DELTAS = (0.0, math.pi, 1.5 * math.pi, 0.5 * math.pi)


@dataclass(frozen=True)
class PolarizationResponse:
    """Measured interferometer polarization angle psi(theta), radians.

    Evaluated by linear interpolation; the table must cover the full
    [-90, 90] degree range of the rotator angle.
    """

    theta_deg: np.ndarray
    psi_rad: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta_deg, dtype=float)
        p = np.asarray(self.psi_rad, dtype=float)
        if t.ndim != 1 or t.shape != p.shape or len(t) < 2:
            raise ValueError("polarization table needs matching 1-D arrays, >= 2 rows")
        if not (np.diff(t) > 0).all():
            raise ValueError("polarization table angles must be strictly increasing")
        if t[0] > -90.0 or t[-1] < 90.0:
            raise ValueError("polarization table must cover [-90, 90] degrees")
        object.__setattr__(self, "theta_deg", t)
        object.__setattr__(self, "psi_rad", p)

    def __call__(self, theta_deg) -> np.ndarray:
        return np.interp(theta_deg, self.theta_deg, self.psi_rad)


@dataclass(frozen=True)
class InterferometerParams:
    """Amplitudes, global two-photon phase, and polarization response."""

    k1: float = 1.0
    k2: float = 1.0
    delta: float = 0.0  # radians
    pol_s: PolarizationResponse | None = None
    pol_i: PolarizationResponse | None = None

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("coupling amplitudes must be > 0")

    def cos_psi(self, theta_s_deg, theta_i_deg):
        cs = np.cos(self.pol_s(theta_s_deg)) if self.pol_s else np.ones_like(
            np.asarray(theta_s_deg, dtype=float))
        ci = np.cos(self.pol_i(theta_i_deg)) if self.pol_i else np.ones_like(
            np.asarray(theta_i_deg, dtype=float))
        return cs, ci


@dataclass(frozen=True)
class NoiseModel:
    """Multiplicative flux factor and additive accidentals, seeded.

    flux_fluctuation is the relative spread of the per-point factor f; one f
    draw is shared by every phase shot of a (theta_s, theta_i) point, which
    is what lets the visibility ratio cancel it. accidental_rate sets the
    mean additive accidental level as a fraction of k1^2 + k2^2; accidentals
    are drawn independently per shot (exponential, mean 1).
    """

    flux_fluctuation: float = 0.0
    accidental_rate: float = 0.0
    seed: int = 1

    def __post_init__(self):
        if self.flux_fluctuation < 0 or self.accidental_rate < 0:
            raise ValueError("noise amplitudes must be >= 0")


@dataclass
class VisibilitySurface:
    """V(theta_s, theta_i) on a uniform angular grid; invalid points masked."""

    theta_deg: np.ndarray  # (n,)
    values: np.ndarray     # (n, n)
    step_deg: float
    valid: np.ndarray = None  # (n, n) bool; None means all valid

    def __post_init__(self):
        t = np.asarray(self.theta_deg, dtype=float)
        v = np.asarray(self.values, dtype=float)
        n = len(t)
        if v.shape != (n, n):
            raise ValueError("values must be (n, n) for an n-point grid")
        steps = np.diff(t)
        if n < 2 or not np.allclose(steps, self.step_deg, atol=1e-9):
            raise ValueError("grid must be uniform with the declared step")
        if np.nanmax(np.abs(v)) > 1.0 + 1e-6:
            raise ValueError("|visibility| exceeds 1 beyond tolerance")
        if self.valid is None:
            self.valid = np.ones((n, n), dtype=bool)
        self.theta_deg = t
        self.values = v


@dataclass
class DetectorRun:
    """One simulated measurement campaign on a fixed angular grid."""

    theta_deg: np.ndarray
    step_deg: float
    rbar: dict                       # delta (rad) -> measured surface (n, n)
    vis_cos: VisibilitySurface
    vis_sin: VisibilitySurface | None = None
    report: dict = field(default_factory=dict)


def required_angular_step(n_max: int) -> float:
    """Largest alias-free grid step (degrees) for modes up to |l| = n_max."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return 180.0 / (2 * n_max + 1)


def angular_grid(step_deg: float) -> np.ndarray:
    """Uniform rotator-angle grid theta_j = -90 + j*step, j = 0..n-1."""
    if step_deg <= 0:
        raise ValueError("step must be > 0")
    n = 180.0 / step_deg
    if abs(n - round(n)) > 1e-9:
        raise ValueError("step must divide 180 degrees evenly")
    n = int(round(n))
    return -90.0 + step_deg * np.arange(n)


def mode_transform_phase(l: int, theta: float, element: str):
    """Index flip and unit phase of a mirror or image rotator on OAM mode l.

    Returns (new_l, phase): mirror -> exp(-i*l*pi), rotator at angle theta ->
    exp(-i*l*(pi + 2*theta)); both send l to -l.
    """
    if element == "mirror":
        phase = cmath.exp(-1j * l * math.pi)
    elif element == "rotator":
        phase = cmath.exp(-1j * l * (math.pi + 2.0 * theta))
    else:
        raise ValueError(f"unknown element {element!r}")
    return -l, phase


def _check_normalized(spec: SpectrumMatrix):
    if not spec.normalized or abs(spec.values.sum() - 1.0) > 1e-8:
        raise ValueError("detector model requires a normalized spectrum")


def _interference_sum(spec: SpectrumMatrix, theta_s_rad, theta_i_rad) -> complex:
    """Sum over the spectrum of P * exp(i*(2*l_s*theta_s + 2*l_i*theta_i))."""
    ls = np.arange(-spec.n_max, spec.n_max + 1)
    es = np.exp(2j * np.multiply.outer(ls, theta_s_rad))  # (modes, ...signal)
    ei = np.exp(2j * np.multiply.outer(ls, theta_i_rad))  # (modes, ...idler)
    partial = np.tensordot(es, spec.values, axes=(0, 0))  # (...signal, modes)
    return np.tensordot(partial, ei, axes=(partial.ndim - 1, 0))


def coincidence_probability(spec: SpectrumMatrix, theta_s: float, theta_i: float,
                            params: InterferometerParams,
                            delta: float | None = None) -> float:
    """Ideal coincidence rate at one rotator setting. Angles in radians."""
    _check_normalized(spec)
    if delta is None:
        delta = params.delta
    cs, ci = params.cos_psi(math.degrees(theta_s), math.degrees(theta_i))
    g = _interference_sum(spec, theta_s, theta_i)
    s = (cmath.exp(1j * delta) * g).real
    return float(params.k1**2 + params.k2**2
                 + 2.0 * params.k1 * params.k2 * float(cs) * float(ci) * s)


def _noise_draws(noise: NoiseModel, shape, n_shots: int):
    """One flux factor per point plus one accidental draw per point and shot.

    Draw order is fixed (flux first, then shots in delta order), so a given
    seed reproduces the same surfaces regardless of later queries.
    """
    rng = np.random.default_rng(noise.seed)
    f = 1.0 + noise.flux_fluctuation * rng.standard_normal(shape)
    f = np.clip(f, 0.05, None)  # flux factors are physically positive
    acc = [noise.accidental_rate * rng.exponential(1.0, shape)
           for _ in range(n_shots)]
    return f, acc


def measured_coincidence(spec: SpectrumMatrix, theta_s: float, theta_i: float,
                         params: InterferometerParams, noise: NoiseModel,
                         delta: float | None = None) -> float:
    """One noisy shot: f * (R_accidental + R_ideal), deterministic per seed."""
    r = coincidence_probability(spec, theta_s, theta_i, params, delta)
    f, acc = _noise_draws(noise, (), 1)
    base = (params.k1**2 + params.k2**2) * float(acc[0]) + r
    return float(f) * base


def delta_scan_extrema(spec: SpectrumMatrix, theta_s: float, theta_i: float,
                       params: InterferometerParams, noise: NoiseModel,
                       n_steps: int = 40):
    """(max, min) of the measured rate over a full 2*pi scan of delta.

    Emulates the phase-tracking-free protocol: the flux draw is shared by
    the whole scan of one point, accidentals vary shot to shot.
    """
    if n_steps < 2:
        raise ValueError("need at least 2 scan steps")
    f, acc = _noise_draws(noise, (), n_steps)
    k2sum = params.k1**2 + params.k2**2
    values = []
    for k in range(n_steps):
        delta = 2.0 * math.pi * k / n_steps
        r = coincidence_probability(spec, theta_s, theta_i, params, delta)
        values.append(float(f) * (k2sum * float(acc[k]) + r))
    return max(values), min(values)


def visibility(r_bright: float, r_dark: float) -> float:
    """Two-shot visibility (r_bright - r_dark) / (r_bright + r_dark)."""
    den = r_bright + r_dark
    if den <= 0:
        raise ValueError("total extinction: visibility undefined")
    return (r_bright - r_dark) / den


def run_detector(spec: SpectrumMatrix, params: InterferometerParams,
                 step_deg: float, noise: NoiseModel | None = None,
                 four_shot: bool = False) -> DetectorRun:
    """Simulate the full campaign: surfaces at each phase shot + visibility.

    The emitted rbar surfaces carry the flux factor; the visibility is formed
    from the flux-free shot values because the shared per-point factor cancels
    exactly in the ratio — dividing it out analytically keeps the noisy
    visibility bit-identical to the noiseless one when only flux noise is on.
    """
    _check_normalized(spec)
    theta = angular_grid(step_deg)
    theta_rad = np.radians(theta)
    cs, ci = params.cos_psi(theta, theta)
    envelope = 2.0 * params.k1 * params.k2 * np.outer(cs, ci)
    k2sum = params.k1**2 + params.k2**2
    g = _interference_sum(spec, theta_rad, theta_rad)

    deltas = FOUR_SHOT_DELTAS if four_shot else FOUR_SHOT_DELTAS[:2]
    ideal = {d: k2sum + envelope * (np.exp(1j * d) * g).real for d in deltas}

    if noise is None:
        noise = NoiseModel(0.0, 0.0, 0)
    f, acc = _noise_draws(noise, g.shape, len(deltas))
    base = {d: k2sum * acc[k] + ideal[d] for k, d in enumerate(deltas)}
    rbar = {d: f * base[d] for d in deltas}

    def vis_surface(bright, dark):
        den = base[bright] + base[dark]
        if (den <= 0).any():
            raise ValueError("total extinction at some grid point")
        return VisibilitySurface(theta, (base[bright] - base[dark]) / den,
                                 step_deg)

    vis_cos = vis_surface(0.0, math.pi)
    vis_sin = vis_surface(1.5 * math.pi, 0.5 * math.pi) if four_shot else None
    return DetectorRun(theta_deg=theta, step_deg=step_deg, rbar=rbar,
                       vis_cos=vis_cos, vis_sin=vis_sin,
                       report={"four_shot": four_shot,
                               "grid_points": int(len(theta))})


def polarization_correct(surface: VisibilitySurface,
                         params: InterferometerParams) -> VisibilitySurface:
    """Divide out cos(psi_s)cos(psi_i); near-singular points are invalidated."""
    cs, ci = params.cos_psi(surface.theta_deg, surface.theta_deg)
    factor = np.outer(cs, ci)
    good = np.abs(factor) > MIN_COS_PSI
    values = np.where(good, surface.values / np.where(good, factor, 1.0), 0.0)
    # correcting can only grow |V|; clip fp overshoot just past 1
    values = np.clip(values, -1.0, 1.0)
    return VisibilitySurface(surface.theta_deg, values, surface.step_deg,
                             valid=surface.valid & good)


def _check_nyquist(step_deg: float, n_max: int):
    limit = required_angular_step(n_max)
    if step_deg > limit + 1e-9:
        admissible = int((180.0 / step_deg - 1.0) // 2)
        raise ValueError(
            f"step {step_deg} deg aliases modes up to |l| = {n_max}; "
            f"need <= {limit:.6g} deg (this step only supports N <= {admissible})"
        )


def _transform_kernels(surface: VisibilitySurface, n_max: int):
    ls = np.arange(-n_max, n_max + 1)
    theta_rad = np.radians(surface.theta_deg)
    e = np.exp(-2j * np.multiply.outer(ls, theta_rad))  # (2N+1, n)
    return e


def reconstruct_symmetric(surface: VisibilitySurface, n_max: int,
                          report: dict | None = None) -> SpectrumMatrix:
    """Spectrum from the cosine transform of one visibility surface.

    Valid only for spectra symmetric under (l_s, l_i) -> (-l_s, -l_i); the
    cosine kernel cannot distinguish a mode pair from its inverse.
    """
    _check_nyquist(surface.step_deg, n_max)
    v = np.where(surface.valid, surface.values, 0.0)
    e = _transform_kernels(surface, n_max)
    raw = (e @ v @ e.T).real * math.radians(surface.step_deg) ** 2
    clipped = float(-raw[raw < 0].sum())
    raw = np.clip(raw, 0.0, None)
    rep = {"clamped_negative_mass": clipped,
           "excluded_points": int((~surface.valid).sum())}
    if report is not None:
        report.update(rep)
    return SpectrumMatrix(n_max, raw, report=rep).normalize()


def reconstruct_asymmetric(v_cos: VisibilitySurface, v_sin: VisibilitySurface,
                           n_max: int, report: dict | None = None) -> SpectrumMatrix:
    """Spectrum from combined cosine and sine transforms (four-shot protocol)."""
    if (len(v_cos.theta_deg) != len(v_sin.theta_deg)
            or abs(v_cos.step_deg - v_sin.step_deg) > 1e-9
            or not np.allclose(v_cos.theta_deg, v_sin.theta_deg)):
        raise ValueError("cosine and sine surfaces must share one grid")
    _check_nyquist(v_cos.step_deg, n_max)
    valid = v_cos.valid & v_sin.valid
    vc = np.where(valid, v_cos.values, 0.0)
    vs = np.where(valid, v_sin.values, 0.0)
    e = _transform_kernels(v_cos, n_max)
    gc = e @ vc @ e.T
    gs = e @ vs @ e.T
    raw = (gc.real - gs.imag) * math.radians(v_cos.step_deg) ** 2
    clipped = float(-raw[raw < 0].sum())
    raw = np.clip(raw, 0.0, None)
    rep = {"clamped_negative_mass": clipped,
           "excluded_points": int((~valid).sum())}
    if report is not None:
        report.update(rep)
    return SpectrumMatrix(n_max, raw, report=rep).normalize()


def r_squared(p_observed: SpectrumMatrix, p_input: SpectrumMatrix) -> float:
    """Coefficient of determination between two spectra, in percent."""
    if p_observed.n_max != p_input.n_max:
        raise ValueError("spectra must share the same mode cutoff")
    obs, ref = p_observed.values, p_input.values
    ss_tot = ((ref - ref.mean()) ** 2).sum()
    if ss_tot <= 0:
        raise ValueError("reference spectrum has zero variance")
    ss_res = ((obs - ref) ** 2).sum()
    return float((1.0 - ss_res / ss_tot) * 100.0)
