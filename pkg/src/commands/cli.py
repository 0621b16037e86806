"""Command-line entry point: `tim <command> ...`."""

import argparse
import json
import sys
from fractions import Fraction

import dotenv

from abstract.command_result import CommandResult
from abstract.config_container import WorkbenchConfig
from commands.workbench import Workbench


def dof_fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}")
    if value.numerator != 1 or value.denominator < 2:
        raise argparse.ArgumentTypeError(f"expected 1/n with n >= 2, got {text}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tim", description="Topological interference management workbench")
    parser.add_argument("--json", metavar="PATH", help="write the machine payload to PATH ('-' for stdout)")
    parser.add_argument("--seed", type=int, help="seed for channel sampling and sampled verification")
    parser.add_argument("--quiet", action="store_true", help="suppress human-readable output")
    parser.add_argument("--config", metavar="PATH", help="JSON file with workbench settings")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="maximality verdict and block decomposition")
    analyze.add_argument("path")
    analyze.add_argument("--dof", type=dof_fraction, default=Fraction(1, 2))
    analyze.add_argument("--dot", metavar="OUT")
    analyze.set_defaults(run=lambda wb, a: wb.cmd_analyze(a.path, dof=a.dof, dot=a.dot))

    construct = commands.add_parser("construct", help="derive a topology from an alliance spec")
    construct.add_argument("spec")
    construct.add_argument("--out")
    construct.set_defaults(run=lambda wb, a: wb.cmd_construct(a.spec, out=a.out))

    transform = commands.add_parser("transform", help="add links until the topology is maximal")
    transform.add_argument("path")
    transform.add_argument("--strategy", choices=["merge", "add-links", "auto"], default="auto")
    transform.add_argument("--out")
    transform.set_defaults(run=lambda wb, a: wb.cmd_transform(a.path, strategy=a.strategy, out=a.out))

    enumerate_ = commands.add_parser("enumerate", help="classify every topology of K users")
    enumerate_.add_argument("--k", type=int, required=True)
    enumerate_.add_argument("--canonical", action="store_true", help="one row per relabeling class")
    enumerate_.add_argument("--csv", metavar="OUT")
    enumerate_.set_defaults(run=lambda wb, a: wb.cmd_enumerate(a.k, canonical=a.canonical, csv=a.csv))

    theorems = commands.add_parser("verify-theorems", help="cross-check every maximality characterization")
    theorems.add_argument("--k", type=int, required=True)
    theorems.add_argument("--samples", type=int, help="check this many random matrices instead of all")
    theorems.add_argument("--converse", type=int, metavar="E", help="also probe uniform specs with |E| = E")
    theorems.set_defaults(
        run=lambda wb, a: wb.cmd_verify_theorems(a.k, samples=a.samples, converse=a.converse)
    )

    verify_dof = commands.add_parser("verify-dof", help="simulate beamforming and check every receiver decodes")
    verify_dof.add_argument("path")
    verify_dof.add_argument("--spec")
    verify_dof.add_argument("--trials", type=positive_int)
    verify_dof.add_argument("--tol", type=positive_float, help="smallest margin that counts as separable")
    verify_dof.add_argument("--extension", type=positive_int, help="time slots (default: E_M + 1)")
    verify_dof.set_defaults(
        run=lambda wb, a: wb.cmd_verify_dof(a.path, spec_path=a.spec, trials=a.trials, tol=a.tol, extension=a.extension)
    )

    bound = commands.add_parser("bound", help="achievable DoF against the acyclic-subset upper bound")
    bound.add_argument("path")
    bound.add_argument("--spec")
    bound.set_defaults(run=lambda wb, a: wb.cmd_bound(a.path, spec_path=a.spec))

    export_dot = commands.add_parser("export-dot", help="message graph in DOT format")
    export_dot.add_argument("path")
    export_dot.add_argument("--out")
    export_dot.set_defaults(run=lambda wb, a: wb.cmd_export_dot(a.path, out=a.out))

    specs = commands.add_parser("specs", help="enumerate alliance specs as JSON lines")
    specs.add_argument("--k", type=int, required=True)
    specs.add_argument("--n", type=int, required=True)
    specs.add_argument("--count-only", action="store_true")
    specs.set_defaults(run=lambda wb, a: wb.cmd_specs(a.k, a.n, count_only=a.count_only))

    return parser


def load_config(args: argparse.Namespace) -> WorkbenchConfig:
    dotenv.load_dotenv()
    config = WorkbenchConfig.from_file(args.config) if args.config else WorkbenchConfig()
    return config.with_env().with_overrides(seed=args.seed, log_level=args.log_level)


def emit(result: CommandResult, args: argparse.Namespace) -> None:
    """Human text to stdout; the payload to --json. With `--json -` stdout carries only the payload."""
    if not args.quiet and args.json != "-":
        print(result["human_text"])
    if args.json is None or result["machine_payload"] is None:
        return
    document = json.dumps(result["machine_payload"], indent=2)
    if args.json == "-":
        print(document)
    else:
        with open(args.json, "w", encoding="utf-8") as file:
            file.write(document + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    result = args.run(Workbench(config), args)
    try:
        emit(result, args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return result["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
