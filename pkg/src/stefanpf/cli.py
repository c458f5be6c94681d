"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 runtime abort (unstable dt or
non-finite values), 3 relaxation did not converge.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from .analysis import fit_sqrt_growth, neumann_beta
from .config import load_config
from .driver import read_timeseries_csv, run_simulation, scan_velocity
from .errors import (
    ConfigurationError,
    InterfaceDetectionError,
    NonConvergence,
    SimulationAborted,
    StabilityError,
    UsageError,
)

EXIT_OK, EXIT_INVALID, EXIT_ABORT, EXIT_NOCONV = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stefanpf", description="Explicit phase-field solvers for moving-boundary problems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a simulation from a config file")
    p.add_argument("config")

    p = sub.add_parser("fit", help="fit s = beta*sqrt(t - t0) to the interface_pos column of a time series")
    p.add_argument("timeseries")
    p.add_argument("--window", type=float, default=0.5, help="trailing fraction of samples to fit (default 0.5)")

    p = sub.add_parser("oracle", help="analytic reference values")
    osub = p.add_subparsers(dest="oracle", required=True)
    o = osub.add_parser("neumann", help="one-phase growth coefficient for a Stefan number")
    o.add_argument("--stefan", type=float, required=True)

    p = sub.add_parser("scan-velocity", help="relax the co-moving system over a range of velocities")
    p.add_argument("config")
    p.add_argument("--vmin", type=float, required=True)
    p.add_argument("--vmax", type=float, required=True)
    p.add_argument("--nv", type=int, required=True)
    return ap


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    try:
        records = run_simulation(cfg)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    last = records[-1]
    print(f"{len(records)} records written to {cfg.outdir}; final step {last.step}, volume {last.volume:.12g}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    records = read_timeseries_csv(args.timeseries)
    rows = [(r.time, r.interface_pos) for r in records if r.interface_pos is not None and r.time > 0]
    if len(rows) < 3:
        raise UsageError(f"{args.timeseries}: fewer than 3 rows with interface_pos")
    t, s = map(list, zip(*rows))
    fit = fit_sqrt_growth(t, s, window=args.window)
    print(f"beta = {fit.beta:.12g}")
    print(f"t0 = {fit.t0:.12g}")
    print(f"r2 = {fit.r_squared:.12g}")
    if fit.degenerate:
        print("warning: no growth in the fitted window; beta is undefined", file=sys.stderr)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    print(f"{neumann_beta(args.stefan):.12g}")
    return EXIT_OK


def _cmd_scan(args) -> int:
    if args.nv < 1:
        raise UsageError("--nv must be >= 1")
    if args.vmax < args.vmin:
        raise UsageError("--vmax must be >= --vmin")
    cfg = load_config(args.config)
    print("velocity,residual,converged,iterations")
    any_ok = False
    for v, res in scan_velocity(cfg, np.linspace(args.vmin, args.vmax, args.nv)):
        any_ok |= res.converged
        print(f"{v:.12g},{res.residual:.6e},{int(res.converged)},{res.iterations}")
    return EXIT_OK if any_ok else EXIT_NOCONV


_COMMANDS = {"run": _cmd_run, "fit": _cmd_fit, "oracle": _cmd_oracle, "scan-velocity": _cmd_scan}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; that is an input error here
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_INVALID
    except ConfigurationError as exc:
        where = f" [key {exc.key}]" if exc.key else ""
        print(f"error: invalid configuration{where}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, InterfaceDetectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (StabilityError, SimulationAborted) as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(cli_main())

