"""``gravtopo`` command line: run a pipeline, write JSON or CSV, exit 0/1/2."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

from . import pipelines
from .bundles import BundleKind
from .errors import GravtopoError

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2
THREADS_ENV = "GRAVTOPO_THREADS"


class ConfigError(GravtopoError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    mesh_ntheta: int | None
    mesh_nphi: int | None
    fd_step: float | None
    tolerance: float | None
    bundle: str | None
    output_path: str | None
    format: str
    points: int
    samples: int
    threads: int


# (help, defaults, minimum mesh) per command
COMMANDS = {
    "chern": ("First Chern numbers of the helicity line bundles and the rank-2 graviton bundle, "
              "computed three ways: closed-form Berry curvature, finite-difference Berry curvature, "
              "and the gauge-invariant plaquette lattice.",
              dict(ntheta=32, nphi=64, fd_step=1e-4, tol=1e-3), (16, 32)),
    "frame": ("Samples of the globally smooth graviton frame built by clutching, checked for "
              "orthonormality, transverse-traceless gauge and smoothness across the equator.",
              dict(ntheta=128, nphi=256, fd_step=None, tol=1e-10), (4, 8)),
    "euler": ("Euler class of the real graviton bundle: Pfaffian curvature integral and the "
              "resulting verdict on linearly polarized subbundles.",
              dict(ntheta=64, nphi=128, fd_step=1e-4, tol=1e-3), (4, 8)),
    "scan": ("Hairy-ball style singularity scan around both poles for the naive plus/cross "
             "frame and for the global frame.",
             dict(ntheta=None, nphi=None, fd_step=None, tol=None), None),
    "commutators": ("Spin/orbital angular momentum split: commutator residuals of J, J_s and J_o "
                    "with convergence orders, and the least-squares search for a stabilizing spin action.",
                    dict(ntheta=None, nphi=None, fd_step=1e-3, tol=1e-8), None),
    "verify": ("Poincare representation property suite: composition law, unitarity, gauge "
               "preservation, helicity-subbundle invariance and fiber algebra checks.",
               dict(ntheta=None, nphi=None, fd_step=None, tol=1e-10), None),
}


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravtopo",
        description="Topology of the graviton polarization bundle over the forward lightcone.",
        epilog=f"Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration. "
               f"{THREADS_ENV} sets the worker thread count.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (text, defaults, _) in COMMANDS.items():
        p = sub.add_parser(name, help=text.split(":")[0].split(",")[0], description=text)
        p.add_argument("--bundle", choices=[b.value for b in BundleKind],
                       help="restrict to one bundle (chern only; default: all)")
        p.add_argument("--ntheta", type=_positive_int, default=defaults["ntheta"],
                       help=f"polar mesh size (default {defaults['ntheta']})")
        p.add_argument("--nphi", type=_positive_int, default=defaults["nphi"],
                       help=f"azimuthal mesh size (default {defaults['nphi']})")
        p.add_argument("--fd-step", type=float, default=defaults["fd_step"],
                       help=f"finite-difference step (default {defaults['fd_step']})")
        p.add_argument("--tol", type=float, default=defaults["tol"],
                       help=f"main acceptance tolerance (default {defaults['tol']})")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name == "commutators":
            p.add_argument("--points", type=_positive_int, default=20,
                           help="random wavevectors per test section (default 20)")
        if name == "verify":
            p.add_argument("--samples", type=_positive_int, default=1000,
                           help="random Lorentz samples (default 1000)")
    return parser


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be at least 1")
    return value


def make_config(args: argparse.Namespace) -> RunConfig:
    _, defaults, minimum = COMMANDS[args.command]
    if args.bundle and args.command != "chern":
        raise ConfigError("--bundle applies only to the chern command")
    if minimum is not None and (args.ntheta < minimum[0] or args.nphi < minimum[1]):
        raise ConfigError(f"{args.command} needs a mesh of at least {minimum[0]}x{minimum[1]}")
    if minimum is None and (args.ntheta is not None or args.nphi is not None):
        raise ConfigError(f"{args.command} does not take a mesh")
    if args.fd_step is not None and not 0.0 < args.fd_step <= 1e-2:
        raise ConfigError("--fd-step must lie in (0, 1e-2]")
    if args.tol is not None and not args.tol > 0.0:
        raise ConfigError("--tol must be positive")
    return RunConfig(args.command, args.ntheta, args.nphi, args.fd_step, args.tol, args.bundle,
                     args.out, args.format, getattr(args, "points", 20),
                     getattr(args, "samples", 1000), _threads())


def run(config: RunConfig) -> pipelines.PipelineResult:
    c = config
    if c.command == "chern":
        return pipelines.run_chern([c.bundle] if c.bundle else None, c.mesh_ntheta, c.mesh_nphi,
                                   c.fd_step, c.tolerance, threads=c.threads)
    if c.command == "frame":
        return pipelines.run_frame(c.mesh_ntheta, c.mesh_nphi, c.tolerance)
    if c.command == "euler":
        return pipelines.run_euler(c.mesh_ntheta, c.mesh_nphi, c.fd_step, c.tolerance)
    if c.command == "scan":
        return pipelines.run_scan()
    if c.command == "commutators":
        return pipelines.run_commutators(c.points, c.fd_step, spin_tol=c.tolerance, threads=c.threads)
    return pipelines.run_verify(c.samples, c.tolerance)


def render(result: pipelines.PipelineResult, config: RunConfig) -> str:
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result.columns)
        writer.writerows(result.rows)
        return buf.getvalue()
    skip = {"command", "output_path", "format", "threads"}
    if config.command != "commutators":
        skip.add("points")
    if config.command != "verify":
        skip.add("samples")
    settings = {k: v for k, v in asdict(config).items() if k not in skip}
    return json.dumps(result.document(settings), indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        config = make_config(args)
        result = run(config)
    except (ConfigError, GravtopoError, ValueError) as exc:
        record = {"schema": pipelines.SCHEMA, "command": args.command, "passed": False,
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(record) + "\n")
        return EXIT_CONFIG
    _emit(render(result, config), config.output_path)
    if not result.passed:
        failures = [c.as_dict() for c in result.checks if not c.passed]
        sys.stderr.write(json.dumps({"schema": pipelines.SCHEMA, "command": config.command,
                                     "passed": False, "failures": failures}) + "\n")
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
