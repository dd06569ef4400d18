"""Command-line front end.

Subcommands: steady, sweep, isolation, ef-scan, delay-scan, oracle-check.
Precedence for every physical parameter: command-line --set overrides the
--params file, which overrides the baked-in defaults.  Output files are
written atomically (temp file + rename); nothing partial is ever left
behind on failure.

Exit codes: 0 success, 1 validation/usage error, 2 solver failure,
3 verification-fail verdict from oracle-check.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np

from .errors import SolverError, ValidationError
from .oracle import verify_against_linear
from .params import (PhysicalParams, derive_rates, format_params,
                     parse_params_text)
from .sagnac import SagnacSplit
from .spectra import (DeltaPConvention, SweepGrid, delay_scan, delay_spectrum,
                      ef_scan, format_csv, isolation, sweep_spectrum)
from .steady_state import FixedPointOptions, solve_fixed_point, solve_no_qubit_cubic

logger = logging.getLogger(__name__)

# Figure-recipe presets: each sets only run-shape options (grid, spin,
# subcommand defaults); physical parameters stay at their defaults unless
# overridden.
PRESETS: dict[str, dict[str, float | int]] = {
    "fig2": {"spin": 0.0, "start": -10e6, "stop": 10e6, "points": 2001},
    "fig3a": {"spin": 40e3, "start": -10e6, "stop": 10e6, "points": 2001},
    "fig3b": {"spin": -40e3, "start": -10e6, "stop": 10e6, "points": 2001},
    "fig4": {"spin": 40e3, "start": -10e6, "stop": 10e6, "points": 2001},
    "fig5a": {"spin": 40e3, "start": -10e6, "stop": 0.0, "points": 1001},
    "fig5b": {"start": 0.0, "stop": 120e3, "points": 121},
    "fig6": {"start": 0.0, "stop": 120e3, "points": 121, "delta_p": 0.0},
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--params", metavar="FILE",
                     help="key = value parameter file")
    sub.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                     help="override a single parameter (repeatable)")
    sub.add_argument("--output", "-o", metavar="PATH",
                     help="output file (default: stdout)")
    sub.add_argument("--preset", choices=sorted(PRESETS),
                     help="figure-recipe preset for grid/spin defaults")
    sub.add_argument("--sagnac-split", choices=[s.value for s in SagnacSplit],
                     default=SagnacSplit.OPPOSITE.value)
    sub.add_argument("--delta-p-convention",
                     choices=[c.value for c in DeltaPConvention],
                     default=DeltaPConvention.SIDEBAND.value)
    sub.add_argument("--print-config", action="store_true",
                     help="print the effective parameter file and exit")


def _add_grid(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--from", dest="start", type=float, default=None)
    sub.add_argument("--to", dest="stop", type=float, default=None)
    sub.add_argument("--points", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omit-ring",
        description="Steady-state probe spectra of a spinning "
                    "optomechanical ring resonator with a two-level emitter.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_steady = subs.add_parser("steady", help="pump-driven fixed point as JSON")
    _add_common(p_steady)

    p_sweep = subs.add_parser("sweep", help="T/R spectrum over probe detuning")
    _add_common(p_sweep)
    _add_grid(p_sweep)
    p_sweep.add_argument("--omega", type=float, default=None,
                         help="signed spin rate (overrides spin_rate)")
    p_sweep.add_argument("--with-delay", action="store_true",
                         help="append a tau_g column")

    p_iso = subs.add_parser("isolation",
                            help="|T_cw - T_ccw| over probe detuning")
    _add_common(p_iso)
    _add_grid(p_iso)
    p_iso.add_argument("--omega", type=float, default=None,
                       help="spin magnitude (required unless preset)")
    p_iso.add_argument("--isolation-norm", choices=["normalized", "raw"],
                       default="normalized")

    p_ef = subs.add_parser("ef-scan",
                           help="enhancement factor vs signed spin rate")
    _add_common(p_ef)
    _add_grid(p_ef)

    p_delay = subs.add_parser("delay-scan",
                              help="group delay vs signed spin rate")
    _add_common(p_delay)
    _add_grid(p_delay)
    p_delay.add_argument("--delta-p", type=float, default=0.0)

    p_oracle = subs.add_parser(
        "oracle-check",
        help="compare the linearized solver against time-domain integration")
    _add_common(p_oracle)
    p_oracle.add_argument("--tol", type=float, default=1e-4)
    p_oracle.add_argument("--eta", action="append", type=float, default=None,
                          help="probe-pump detuning (repeatable; "
                               "default: omega_m)")
    p_oracle.add_argument("--probe-scale", type=float, default=1e-3)
    p_oracle.add_argument("--periods", type=int, default=200)
    return parser


def load_config(path: str | None, overrides: list[str]) -> PhysicalParams:
    """Params file (optional) plus --set overrides, applied in order."""
    text = ""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"--set expects KEY=VAL, got {item!r}")
        text += "\n" + item
    return parse_params_text(text)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".omit-ring-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _grid_from(args: argparse.Namespace, preset: dict) -> SweepGrid:
    start = args.start if args.start is not None else preset.get("start")
    stop = args.stop if args.stop is not None else preset.get("stop")
    points = args.points if args.points is not None else preset.get("points")
    if start is None or stop is None or points is None:
        raise ValidationError(
            "grid is underspecified: need --from/--to/--points or a preset")
    return SweepGrid(float(start), float(stop), int(points))


def _scan_csv(rows: list[tuple[float, float]], value_name: str) -> str:
    lines = [f"omega,{value_name}"]
    lines += [f"{o:.17g},{v:.17g}" for o, v in rows]
    return "\n".join(lines) + "\n"


def _run(args: argparse.Namespace) -> int:
    preset = PRESETS.get(args.preset, {}) if args.preset else {}
    p = load_config(args.params, args.set)
    split = SagnacSplit(args.sagnac_split)
    convention = DeltaPConvention(args.delta_p_convention)

    if args.command in ("sweep", "isolation"):
        omega = args.omega if args.omega is not None else preset.get("spin")
        if omega is not None and args.command == "sweep":
            p = p.with_(spin_rate=float(omega))

    if args.print_config:
        _emit(format_params(p), args.output)
        return 0

    if args.command == "steady":
        rates = derive_rates(p, split)
        ss = solve_fixed_point(rates, FixedPointOptions())
        branch_count = (
            len(solve_no_qubit_cubic(rates)) if rates.j_coupling == 0.0 else 1)
        payload = {
            "a_re": ss.a_mean.real, "a_im": ss.a_mean.imag,
            "b_re": ss.b_mean.real, "b_im": ss.b_mean.imag,
            "sigma_re": ss.sigma_mean.real, "sigma_im": ss.sigma_mean.imag,
            "x": ss.x_mean, "iterations": ss.iterations,
            "residual": ss.residual, "branch_count": branch_count,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
        return 0

    if args.command == "sweep":
        grid = _grid_from(args, preset)
        if args.with_delay:
            points = delay_spectrum(p, grid, split=split, convention=convention)
        else:
            points = sweep_spectrum(p, grid, split=split, convention=convention)
        _emit(format_csv(points, with_tau=args.with_delay), args.output)
        return 0

    if args.command == "isolation":
        grid = _grid_from(args, preset)
        omega = args.omega if args.omega is not None else preset.get("spin")
        if omega is None:
            raise ValidationError("isolation requires --omega or a preset")
        rows = isolation(
            p, grid, abs(float(omega)),
            normalized=(args.isolation_norm == "normalized"),
            split=split, convention=convention)
        lines = ["delta_p,isolation"]
        lines += [f"{d:.17g},{v:.17g}" for d, v in rows]
        _emit("\n".join(lines) + "\n", args.output)
        return 0

    if args.command == "ef-scan":
        grid = _grid_from(args, preset)
        rows = ef_scan(p, grid.nodes(), split=split, convention=convention)
        _emit(_scan_csv(rows, "ef"), args.output)
        return 0

    if args.command == "delay-scan":
        grid = _grid_from(args, preset)
        delta_p = args.delta_p if args.delta_p is not None else preset.get(
            "delta_p", 0.0)
        rows = delay_scan(
            p, grid.nodes(), float(delta_p), split=split, convention=convention)
        _emit(_scan_csv(rows, "tau_g"), args.output)
        return 0

    if args.command == "oracle-check":
        etas = args.eta if args.eta else [p.omega_m]
        report = verify_against_linear(
            p, [float(e) for e in etas], args.tol,
            probe_scale=args.probe_scale, n_periods=args.periods, split=split)
        payload = [
            {"eta": e.eta, "dev_da": e.dev_da, "dev_db": e.dev_db,
             "dev_dx": e.dev_dx, "pass": e.passed}
            for e in report.entries
        ]
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
        return 0 if report.passed else 3

    raise ValidationError(f"unknown command {args.command!r}")  # pragma: no cover


def run(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("OMIT_RING_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return _run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
