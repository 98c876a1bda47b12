"""Command-line front end.

Subcommands:

    curve      exclusion curve on a force-range grid, CSV output
    verify     closed-form shape factor against the quadrature oracle
    simulate   synthetic photon-counting readout for a known phase
    fit        cosine fit of a readout CSV, phase and upper bound

Exit codes: 0 success, 1 an operation ran and failed (verification
mismatch, non-convergence, degenerate fit), 2 usage or configuration
error. All file I/O is UTF-8 with LF line endings.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace

import numpy as np

from .config import (ConfigError, RunConfig, dump_config, load_config,
                     projected_defaults)
from .fitting import (CosineFitError, PhaseMeasurement, fit_cosine,
                      phase_upper_bound)
from .geometry import (ConvergenceError, compare_closed_form_to_quadrature,
                       oracle_grid)
from .limits import ExclusionCurve, exclusion_curve
from .sensor import SimulatedReadout, phase_cpmg, phase_spin_echo, simulate_readout

__all__ = ["main", "entry", "write_curve_csv", "write_readout_csv", "read_readout_csv"]

CURVE_HEADER = ("lambda_m", "alp_mass_ev", "g_bound")
READOUT_HEADER = ("phi_mw_rad", "mean_counts", "std_error")


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _write_rows(handle, header, rows) -> int:
    """Rows with 9 decimal digits in scientific notation; non-finite rows
    are dropped with a warning rather than written."""
    written = 0
    handle.write(",".join(header) + "\n")
    for row in rows:
        if not all(math.isfinite(v) for v in row):
            _warn(f"dropping non-finite row {tuple(row)}")
            continue
        handle.write(",".join(f"{v:.9e}" for v in row) + "\n")
        written += 1
    return written


def write_curve_csv(path: str, curve: ExclusionCurve) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        return _write_rows(handle, CURVE_HEADER, curve.as_rows())


def write_readout_csv(path_or_handle, readout: SimulatedReadout) -> int:
    rows = zip(readout.phi_mw.tolist(), readout.mean_counts.tolist(),
               readout.std_error.tolist())
    if hasattr(path_or_handle, "write"):
        return _write_rows(path_or_handle, READOUT_HEADER, rows)
    with open(path_or_handle, "w", encoding="utf-8", newline="\n") as handle:
        return _write_rows(handle, READOUT_HEADER, rows)


def read_readout_csv(path: str) -> SimulatedReadout:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != READOUT_HEADER:
            raise ValueError(
                f"{path}: expected header {','.join(READOUT_HEADER)!r}, "
                f"got {','.join(header)!r}")
        columns: list[list[float]] = [[], [], []]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                values = [float(v) for v in row]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric row {row!r}") from None
            for col, v in zip(columns, values):
                col.append(v)
    try:
        return SimulatedReadout(phi_mw=np.array(columns[0]),
                                mean_counts=np.array(columns[1]),
                                std_error=np.array(columns[2]))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _add_common(sub: argparse.ArgumentParser, scenario: bool = True) -> None:
    sub.add_argument("--config", metavar="PATH",
                     help="key=value configuration file")
    sub.add_argument("--out", metavar="PATH", help="output CSV path")
    sub.add_argument("--seed", type=int, help="override the RNG seed")
    sub.add_argument("--rel-tol", type=float, help="override the quadrature tolerance")
    sub.add_argument("--threads", type=int, help="worker threads for grid sweeps")
    if scenario:
        sub.add_argument("--scenario", choices=("current", "projected"),
                         default="current",
                         help="baseline parameter set the config overrides")
    sub.add_argument("--dump-config", action="store_true",
                     help="print the effective configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinforce",
        description="Spin-based exclusion limits on a monopole-dipole coupling.")
    commands = parser.add_subparsers(dest="command", required=True)

    p_curve = commands.add_parser(
        "curve", help="sweep force ranges and write the exclusion curve")
    _add_common(p_curve)

    p_verify = commands.add_parser(
        "verify", help="check the closed-form shape factor against quadrature")
    _add_common(p_verify, scenario=False)

    p_sim = commands.add_parser(
        "simulate", help="generate a synthetic readout CSV")
    _add_common(p_sim)
    p_sim.add_argument("--phi-true", type=float, metavar="RAD",
                       help="inject this phase directly")
    p_sim.add_argument("--g", type=float, metavar="COUPLING",
                       help="derive the phase from this coupling (needs --lambda-m)")
    p_sim.add_argument("--lambda-m", type=float, metavar="METRES",
                       help="force range for --g")

    p_fit = commands.add_parser(
        "fit", help="fit a readout CSV and report the phase")
    p_fit.add_argument("csv", help="readout CSV (phi_mw_rad,mean_counts,std_error)")
    p_fit.add_argument("--k-sigma", type=float, default=2.0,
                       help="upper bound |phi| + k*sigma (default 2)")
    return parser


def _effective_config(args) -> RunConfig:
    base = projected_defaults() if getattr(args, "scenario", "current") == "projected" \
        else RunConfig()
    if args.config is not None:
        try:
            cfg = load_config(args.config, defaults=base)
        except OSError as exc:
            raise ConfigError([f"cannot read config: {exc}"]) from None
    else:
        cfg = base.require_valid()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.rel_tol is not None:
        overrides["rel_tol"] = args.rel_tol
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out is not None:
        overrides["output"] = args.out
    if overrides:
        cfg = replace(cfg, **overrides).require_valid()
    return cfg


def _cmd_curve(args) -> int:
    cfg = _effective_config(args)
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return 0
    experiment = cfg.experiment()
    curve = exclusion_curve(cfg.lambda_grid(), experiment, rel_tol=cfg.rel_tol,
                            workers=cfg.threads if cfg.threads > 1 else None)
    for lam, reason in curve.gaps:
        _warn(f"lambda = {lam:.4g} m: {reason}")
    if len(curve) == 0:
        print("no exclusion points on this grid", file=sys.stderr)
        return 1
    if cfg.output:
        n = write_curve_csv(cfg.output, curve)
        print(f"wrote {n} exclusion points to {cfg.output}"
              + (f" ({len(curve.gaps)} gaps)" if curve.gaps else ""))
    lam, bound = curve.bound_near(20e-6)
    print(f"g_s g_p <= {bound:.9e} at lambda = {lam:.9e} m (grid point nearest 20 um)")
    return 0


def _cmd_verify(args) -> int:
    rel_tol = args.rel_tol
    if rel_tol is None:
        rel_tol = _effective_config(args).rel_tol if args.config else 1e-9
    lambdas, distances, radii = oracle_grid()
    report = compare_closed_form_to_quadrature(lambdas, distances, radii,
                                               rel_tol=rel_tol)
    threshold = max(1e-6, rel_tol)
    status = "OK" if report.passed(threshold) else "MISMATCH"
    print(f"{status}: {report.n_points} points, max relative deviation "
          f"{report.max_rel_deviation:.3e} (threshold {threshold:.1e})")
    if status != "OK":
        print(f"worst point: lambda = {report.worst_lambda:.6e} m, "
              f"R = {report.worst_radius:.6e} m, d = {report.worst_distance:.6e} m",
              file=sys.stderr)
        return 1
    return 0


def _cmd_simulate(args) -> int:
    cfg = _effective_config(args)
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return 0
    if args.phi_true is not None:
        if args.g is not None or args.lambda_m is not None:
            raise ConfigError(["--phi-true and --g/--lambda-m are mutually exclusive"])
        phi_true = args.phi_true
    elif args.g is not None:
        if args.lambda_m is None:
            raise ConfigError(["--g needs --lambda-m"])
        seq = cfg.pulse_sequence()
        if seq.kind == "spin_echo":
            phi_true = phase_spin_echo(args.lambda_m, args.g, cfg.source(),
                                       cfg.vibration(), seq, rel_tol=cfg.rel_tol)
        elif seq.kind == "cpmg":
            phi_true = phase_cpmg(seq.n_pi_pulses, args.lambda_m, args.g,
                                  cfg.source(), cfg.vibration(), seq,
                                  rel_tol=cfg.rel_tol)
        else:
            raise ConfigError(["--g supports echo-type sequences only"])
    else:
        phi_true = 0.0  # null experiment
    readout = simulate_readout(phi_true, cfg.phi_mw_grid(), cfg.readout_model())
    if cfg.output:
        n = write_readout_csv(cfg.output, readout)
        print(f"wrote {n} readout points to {cfg.output} "
              f"(phi_true = {phi_true:+.9e} rad, seed = {cfg.seed})")
    else:
        write_readout_csv(sys.stdout, readout)
    return 0


def _cmd_fit(args) -> int:
    try:
        readout = read_readout_csv(args.csv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not (math.isfinite(args.k_sigma) and args.k_sigma >= 0.0):
        raise ConfigError([f"--k-sigma must be non-negative, got {args.k_sigma!r}"])
    result = fit_cosine(readout)
    if result.low_contrast:
        _warn("fitted amplitude is consistent with zero; the phase is unconstrained")
    bound = phase_upper_bound(PhaseMeasurement(phi=result.phi, phi_std=result.phi_std),
                              k_sigma=args.k_sigma)
    print(f"phi = {result.phi:+.9e} rad")
    print(f"phi_std = {result.phi_std:.9e} rad")
    print(f"amplitude = {result.a_pl:.9e} counts, baseline = {result.i0:.9e} counts")
    print(f"|phi| + {args.k_sigma:g} sigma = {bound:.9e} rad")
    return 0


_COMMANDS = {
    "curve": _cmd_curve,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, CosineFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
