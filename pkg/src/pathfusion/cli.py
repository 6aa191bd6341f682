"""``pathfusion`` command line."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .experiments import (
    FORMATS,
    ConfigError,
    RunConfig,
    cmd_coherence,
    cmd_dja,
    cmd_fit,
    cmd_fuse_demo,
    cmd_state,
    cmd_witness,
    load_noise,
    parse_phases,
)
from .mbqc import FUNCTIONS
from .noise import FitError
from .qubits import ZeroProbabilityError
from .resource import BUILDS

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--build", choices=BUILDS, default="graph", help="state preparation route")
    p.add_argument("--noise", metavar="FILE", help="noise model JSON (or the JSON output of 'fit')")
    p.add_argument("--shots", type=int, help="sample with this many shots per setting or phase point")
    p.add_argument("--seed", type=int, help="random seed, required with --shots")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    p.add_argument("--format", choices=FORMATS, default="csv")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathfusion", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pathfusion {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("state", parents=[common], help="stabilizer table and fidelity")
    w = sub.add_parser("witness", parents=[common], help="entanglement witness, exact or sampled")
    w.add_argument("--match-sigma", type=float, metavar="S",
                   help="sample with the shot budget whose witness error equals S")
    c = sub.add_parser("coherence", parents=[common], help="phase scan of the fused path qubit")
    c.add_argument("--phases", default="0:2pi:23", help="start:stop:count, ends included (default 0:2pi:23)")
    d = sub.add_parser("dja", parents=[common], help="Deutsch-Jozsa output distributions")
    d.add_argument("--function", choices=[*FUNCTIONS, "all"], default="all")
    f = sub.add_parser("fit", parents=[common], help="fit the noise model to stabilizer targets")
    f.add_argument("--targets", metavar="FILE", help="JSON or CSV targets (default: bundled reference values)")
    sub.add_parser("fuse-demo", parents=[common], help="fusion of two chains along every build route")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    noise = load_noise(args.noise) if args.noise else None
    return RunConfig(args.build, noise, args.shots, args.seed, args.out, args.format, args.noise)


def run(args: argparse.Namespace):
    config = _config(args)
    if args.command == "state":
        return cmd_state(config)
    if args.command == "witness":
        return cmd_witness(config, args.match_sigma)
    if args.command == "coherence":
        return cmd_coherence(config, parse_phases(args.phases))
    if args.command == "dja":
        return cmd_dja(config, args.function)
    if args.command == "fit":
        return cmd_fit(config, args.targets)
    return cmd_fuse_demo(config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        table = run(args)
    except ConfigError as err:
        print(f"pathfusion: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ZeroProbabilityError, FitError) as err:
        print(f"pathfusion: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = table.render(args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK
