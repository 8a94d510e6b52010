"""Command-line front end: argument parsing, preset resolution and exit codes."""

from __future__ import annotations

import argparse
import logging
import sys

from rician_lowsnr import config
from rician_lowsnr.channel import ChannelSpec
from rician_lowsnr.commands import SweepRequest, run_energy, run_onoff, run_solve, run_sweep, run_validate
from rician_lowsnr.commands.energy import ENERGY_METHODS
from rician_lowsnr.commands.solve import SOLVE_METHODS
from rician_lowsnr.errors import DomainError, QuadratureError, RicianError, UsageError, ValidityError
from rician_lowsnr.onoff import ThresholdSource
from rician_lowsnr.specfun import linear_to_db
from rician_lowsnr.ui import print_error, setup_logging

log = logging.getLogger(__name__)


class UsageExit(Exception):
    def __init__(self, message):
        super().__init__(message)
        self.message = message


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with the usage exit code."""

    def error(self, message):
        raise UsageExit(f"{self.prog}: {message}")


def _channel_args(p):
    g = p.add_argument_group("channel")
    g.add_argument("--K", type=float, default=None, help="Rician factor K >= 0 (default: preset or 1).")
    g.add_argument("--L", type=int, default=None, help="Number of MRC branches L >= 1 (default: preset or 3).")
    g.add_argument("--omega", type=float, default=None, help="Mean gain per branch Ω > 0 (default: preset or 1).")
    g.add_argument("--preset", choices=sorted(config.PRESETS), default=None, help="Figure preset (K, L, Ω, grid, methods).")


def _grid_args(p):
    g = p.add_argument_group("SNR grid (dB)")
    g.add_argument("--snr-db-start", type=float, default=None, dest="snr_db_start")
    g.add_argument("--snr-db-stop", type=float, default=None, dest="snr_db_stop")
    g.add_argument("--snr-db-step", type=float, default=None, dest="snr_db_step")


def _output_args(p, formats=config.OUTPUT_FORMATS, default="csv", bits=True):
    g = p.add_argument_group("output")
    g.add_argument("--format", choices=formats, default=default, dest="fmt")
    g.add_argument("--out", default=None, help="Output file, or a directory for a generated name (default: stdout).")
    if bits:
        g.add_argument("--bits", action="store_true", help="Report rates in bits instead of nats.")


def _mc_args(p, default_samples):
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--mc-samples", type=int, default=default_samples, dest="mc_samples")


def build_parser():
    parser = _Parser(prog="rician-lowsnr", description="Low-SNR ergodic capacity of MRC Rician fading channels.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="Capacity of each method over an SNR grid.")
    _channel_args(p)
    _grid_args(p)
    p.add_argument("--methods", default=None, help=f"Comma-separated subset of: {', '.join(config.METHODS)}.")
    _mc_args(p, config.DEFAULT_MC_SAMPLES)
    _output_args(p)

    p = sub.add_parser("solve-lambda", help="Water level λ(SNR) at one SNR.")
    _channel_args(p)
    p.add_argument("--snr-db", type=float, required=True, dest="snr_db")
    p.add_argument("--method", choices=SOLVE_METHODS, default="exact")
    _output_args(p, formats=("json",), default=None, bits=False)

    p = sub.add_parser("onoff", help="On-off power control at one SNR.")
    _channel_args(p)
    p.add_argument("--snr-db", type=float, required=True, dest="snr_db")
    p.add_argument(
        "--threshold-source",
        choices=[s.value for s in ThresholdSource],
        default=ThresholdSource.EXACT_LAMBDA.value,
        dest="threshold_source",
    )
    _mc_args(p, 0)
    _output_args(p, formats=("json",), default=None, bits=False)

    p = sub.add_parser("energy", help="Energy per information nat over an SNR grid.")
    _channel_args(p)
    _grid_args(p)
    _output_args(p)

    p = sub.add_parser("validate", help="Run the invariant suites.")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--out", default=None, help="JSON report path (default: stdout).")
    p.add_argument("--perturb-omega", type=float, default=1.0, dest="perturb_omega", help=argparse.SUPPRESS)
    return parser


def _preset(args):
    return config.PRESETS[args.preset] if getattr(args, "preset", None) else {}


def _pick(value, preset, key, default):
    if value is not None:
        return value
    return preset.get(key, default)


def resolve_spec(args) -> ChannelSpec:
    preset = _preset(args)
    try:
        return ChannelSpec(
            K=_pick(args.K, preset, "K", 1.0),
            L=_pick(args.L, preset, "L", 3),
            omega=_pick(args.omega, preset, "omega", 1.0),
        )
    except DomainError as e:
        raise UsageError(str(e)) from e


def parse_methods(raw) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in raw.split(",") if m.strip())
    unknown = [m for m in methods if m not in config.METHODS]
    if unknown or not methods:
        raise UsageError(f"unknown methods {unknown or '(none given)'}; choose from {', '.join(config.METHODS)}")
    return methods


def resolve_request(args, energy=False) -> SweepRequest:
    preset = _preset(args)
    spec = resolve_spec(args)
    if energy:
        methods = ENERGY_METHODS
    elif getattr(args, "methods", None):
        methods = parse_methods(args.methods)
    else:
        methods = preset.get("methods", SweepRequest.methods)
    return SweepRequest(
        spec=spec,
        snr_db_start=_pick(args.snr_db_start, preset, "snr_db_start", config.SNR_DB_START),
        snr_db_stop=_pick(args.snr_db_stop, preset, "snr_db_stop", config.SNR_DB_STOP),
        snr_db_step=_pick(args.snr_db_step, preset, "snr_db_step", config.SNR_DB_STEP),
        methods=tuple(methods),
        seed=getattr(args, "seed", config.DEFAULT_SEED),
        mc_samples=getattr(args, "mc_samples", config.DEFAULT_MC_SAMPLES),
        output_format=args.fmt,
        energy=energy or preset.get("energy", False),
        label=args.preset or "",
    )


def dispatch(args) -> int:
    if args.command == "sweep":
        return run_sweep(resolve_request(args), out=args.out, bits=args.bits)
    if args.command == "energy":
        return run_energy(resolve_request(args, energy=True), out=args.out, bits=args.bits)
    if args.command == "solve-lambda":
        return run_solve(resolve_spec(args), args.snr_db, args.method, fmt=args.fmt, out=args.out)
    if args.command == "onoff":
        if args.mc_samples and args.mc_samples < config.MIN_MC_SAMPLES:
            raise UsageError(f"--mc-samples must be 0 or >= {config.MIN_MC_SAMPLES}, got {args.mc_samples}")
        return run_onoff(
            resolve_spec(args),
            args.snr_db,
            args.threshold_source,
            args.mc_samples,
            args.seed,
            fmt=args.fmt,
            out=args.out,
        )
    if args.command == "validate":
        if not args.perturb_omega > 0:
            raise UsageError(f"--perturb-omega must be > 0, got {args.perturb_omega}")
        return run_validate(level=args.level, seed=args.seed, perturb_omega=args.perturb_omega, out=args.out)
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageExit as e:
        parser.print_usage(sys.stderr)
        print_error(e.message, title="Usage")
        return config.EXIT_USAGE

    setup_logging(args.verbose)
    try:
        return dispatch(args)
    except UsageError as e:
        print_error(str(e), title="Usage")
        return config.EXIT_USAGE
    except ValidityError as e:
        bound = f" (bound: SNR <= {e.bound:.6g}, {linear_to_db(e.bound):.3f} dB)" if e.bound else ""
        print_error(f"{e}{bound}", title="Outside validity range")
        return config.EXIT_NUMERIC
    except QuadratureError as e:
        print_error(f"{e}", title="Quadrature failure")
        return config.EXIT_NUMERIC
    except RicianError as e:
        print_error(f"{type(e).__name__}: {e}", title="Numeric failure")
        return config.EXIT_NUMERIC
    except KeyboardInterrupt:
        print_error("Interrupted.", title="Stopped")
        return config.EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
