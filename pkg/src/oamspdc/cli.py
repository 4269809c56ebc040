"""Command-line entry points: spectrum, sweep, and detector runs.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import replace

from . import __version__, detector, io, spectrum
from .config import ConfigError, RunConfig, load_config

__all__ = ["main", "cmd_spectrum", "cmd_sweep", "cmd_detector"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamspdc",
        description="Joint OAM spectra of Type-I SPDC pairs and the "
                    "interferometric OAM detector model.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for the radial loop")
        p.add_argument("--seed", type=int, help="override noise.seed")
        p.add_argument("--n-max", type=int, dest="n_max",
                       help="override mode cutoff N")
        p.add_argument("--clip", type=float,
                       help="override clip_ratio (aperture / sigma_s)")

    p_spec = sub.add_parser("spectrum", help="compute one joint OAM spectrum")
    common(p_spec)
    p_spec.add_argument("--p-modes", choices=["all", "p0"], dest="p_modes",
                        help="override spectrum kind (all radial modes or p=0)")

    p_sweep = sub.add_parser("sweep", help="non-conservation vs thickness/angle")
    common(p_sweep)
    p_sweep.add_argument("--p-modes", choices=["all", "p0"], dest="p_modes")

    p_det = sub.add_parser("detector", help="forward-model and reconstruct")
    common(p_det)
    p_det.add_argument("--four-shot", action="store_true", default=None,
                       help="four phase shots (recovers asymmetric spectra)")
    p_det.add_argument("--step", type=float, help="override rotator step, degrees")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg.noise = replace(cfg.noise, seed=args.seed)
    if args.n_max is not None:
        if args.n_max < 0:
            raise ConfigError("--n-max: must be >= 0")
        cfg.n_max = args.n_max
    if args.clip is not None:
        if args.clip <= 0:
            raise ConfigError("--clip: must be > 0")
        cfg.spdc = replace(cfg.spdc, clip_ratio=args.clip)
    if getattr(args, "p_modes", None) is not None:
        cfg.p_modes = args.p_modes
    if getattr(args, "four_shot", None) is not None:
        cfg.four_shot = args.four_shot
    if getattr(args, "step", None) is not None:
        if args.step <= 0:
            raise ConfigError("--step: must be > 0")
        cfg.step_deg = args.step
    return cfg


def _compute_spectrum(cfg: RunConfig, threads: int) -> spectrum.SpectrumMatrix:
    if cfg.p_modes == "p0":
        return spectrum.mode_projected_spectrum(cfg.spdc, cfg.n_max,
                                                threads=threads)
    return spectrum.joint_oam_spectrum(cfg.spdc, cfg.n_max, threads=threads)


def cmd_spectrum(cfg: RunConfig, out_dir: str, threads: int) -> int:
    t0 = time.time()
    spec = _compute_spectrum(cfg, threads)
    n = spectrum.nonconservation(spec)
    io.write_spectrum_csv(f"{out_dir}/spectrum.csv", spec)
    io.write_spectrum_json(f"{out_dir}/spectrum.json", spec, cfg.raw, n)
    io.write_manifest(out_dir, cfg.raw, cfg.noise.seed, time.time() - t0,
                      extra={"quadrature_report": spec.report})
    print(f"nonconservation_percent = {n:.4f}")
    if "boundary_mass_warning" in spec.report:
        print("warning: integrand mass at the radial cutoff is "
              f"{spec.report['boundary_mass_warning']:.2e} of peak; "
              "the radial window may be truncating the state", file=sys.stderr)
    return 0


def cmd_sweep(cfg: RunConfig, out_dir: str, threads: int) -> int:
    if cfg.sweep_axis is None:
        raise ConfigError("sweep: config must contain a 'sweep' section")
    t0 = time.time()
    rows = []
    failures = 0
    for idx, value in enumerate(cfg.sweep_values):
        if cfg.sweep_axis == "thickness":
            axis_out = value / 1000.0  # report mm
        else:
            axis_out = math.degrees(value)
        try:
            if cfg.sweep_axis == "thickness":
                crystal = replace(cfg.spdc.crystal, length_um=value)
            else:
                crystal = replace(cfg.spdc.crystal, theta_p=value)
            point = replace(cfg.spdc, crystal=crystal)
            if cfg.p_modes == "p0":
                spec = spectrum.mode_projected_spectrum(point, cfg.n_max,
                                                        threads=threads)
            else:
                spec = spectrum.joint_oam_spectrum(point, cfg.n_max,
                                                   threads=threads)
            rows.append((axis_out, spectrum.nonconservation(spec), "ok"))
        except (ValueError, RuntimeError, FloatingPointError) as exc:
            failures += 1
            rows.append((axis_out, None, "error"))
            print(f"warning: sweep point {idx} (value {axis_out}) failed: {exc}",
                  file=sys.stderr)
    io.write_sweep_csv(f"{out_dir}/sweep.csv", rows)
    io.write_manifest(out_dir, cfg.raw, cfg.noise.seed, time.time() - t0,
                      extra={"failed_points": failures})
    for value, result, status in rows:
        tail = f"{result:.4f}" if result is not None else "error"
        print(f"{value:g}\t{tail}")
    return 0 if failures == 0 else 3


def cmd_detector(cfg: RunConfig, out_dir: str, threads: int) -> int:
    # fail on an aliasing grid before the expensive forward pass
    limit = detector.required_angular_step(cfg.n_max)
    if cfg.step_deg > limit + 1e-9:
        raise ConfigError(
            f"detector.step_deg = {cfg.step_deg} aliases N = {cfg.n_max}; "
            f"need a step <= {limit:.6g} degrees")
    t0 = time.time()
    if cfg.input_spectrum_csv:
        spec = io.read_spectrum_csv(cfg.input_spectrum_csv)
        if not spec.normalized:
            spec = spec.normalize()
        if spec.n_max != cfg.n_max:
            raise ConfigError(
                f"detector.input_spectrum_csv: spectrum has N = {spec.n_max}, "
                f"config expects n_max = {cfg.n_max}")
    else:
        spec = _compute_spectrum(cfg, threads)

    run = detector.run_detector(spec, cfg.detector, cfg.step_deg,
                                noise=cfg.noise, four_shot=cfg.four_shot)
    labels = {0.0: "delta_0", math.pi: "delta_pi",
              1.5 * math.pi: "delta_3pi_2", 0.5 * math.pi: "delta_pi_2"}
    for d, surface in run.rbar.items():
        io.write_surface_csv(f"{out_dir}/rbar_{labels[d]}.csv",
                             run.theta_deg, surface, "rbar")

    vis_cos = detector.polarization_correct(run.vis_cos, cfg.detector)
    io.write_visibility_csv(f"{out_dir}/visibility.csv", vis_cos)
    rec_report: dict = {}
    if cfg.four_shot:
        vis_sin = detector.polarization_correct(run.vis_sin, cfg.detector)
        io.write_visibility_csv(f"{out_dir}/visibility_sine.csv", vis_sin)
        recon = detector.reconstruct_asymmetric(vis_cos, vis_sin, cfg.n_max,
                                                rec_report)
    else:
        recon = detector.reconstruct_symmetric(vis_cos, cfg.n_max, rec_report)

    r2 = detector.r_squared(recon, spec)
    io.write_spectrum_csv(f"{out_dir}/reconstructed.csv", recon)
    io.write_json(f"{out_dir}/report.json", {
        "schema_version": io.SCHEMA_VERSION,
        "r_squared_percent": r2,
        "four_shot": cfg.four_shot,
        "step_deg": cfg.step_deg,
        "grid_points": run.report["grid_points"],
        "reconstruction": rec_report,
        "input_spectrum_report": spec.report,
    })
    io.write_manifest(out_dir, cfg.raw, cfg.noise.seed, time.time() - t0)
    print(f"r_squared_percent = {r2:.4f}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        import os
        os.makedirs(args.out, exist_ok=True)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.out, args.threads)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, args.threads)
        return cmd_detector(cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, FloatingPointError,
            ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
