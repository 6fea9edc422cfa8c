"""Command-line runner for the built-in scenarios and scenario files.

Exit status: 0 when every check passes, 1 when a check fails or a query
errors unexpectedly, 2 on bad input (flags, unreadable or malformed files).
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from .errors import QHistError
from .hilbert import Direction
from .scenario_file import CompiledScenario, parse_scenario_file
from .scenarios import (
    ScenarioReport,
    brownian_scenario,
    dragon_scenario,
    ensemble_ambiguity_scenario,
    hardy_scenario,
    marginal_ambiguity_scenario,
    singlet_locality_scenario,
    singlet_locality_sweep,
)
from .tolerance import default_tol

SCENARIOS = ("hardy", "singlet", "ensemble", "dragon", "brownian", "marginals")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"error: UsageError: {message}\n")


def _positive(text: str) -> float:
    value = float(text)
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive, default=None,
                        help="tolerance for invariant checks (default 1e-10)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = _Parser(prog="qhist", description="Consistent-histories scenario runner")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sc = sub.add_parser("scenario", parents=[common], help="run a built-in scenario")
    sc.add_argument("name", choices=SCENARIOS)
    sc.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sc.add_argument("--w-theta", type=float, default=0.0)
    sc.add_argument("--w-phi", type=float, default=0.0)
    sc.add_argument("--v-theta", type=float, default=0.0)
    sc.add_argument("--v-phi", type=float, default=0.0)
    sc.add_argument("--trials", type=_nonnegative_int, default=0,
                    help="singlet: extra randomized (w, v, U_b) draws")
    sc.add_argument("--alpha-re", type=float, default=2 ** -0.5)
    sc.add_argument("--alpha-im", type=float, default=0.0)
    sc.add_argument("--beta-re", type=float, default=2 ** -0.5)
    sc.add_argument("--beta-im", type=float, default=0.0)
    sc.add_argument("--diffusion", type=_positive, default=None)
    sc.add_argument("--time", type=_positive, default=None)

    ck = sub.add_parser("check", parents=[common], help="evaluate the queries in a scenario file")
    ck.add_argument("file")
    return parser


def _run_scenario(args) -> ScenarioReport:
    name = args.name
    if name == "hardy":
        return hardy_scenario()
    if name == "singlet":
        w = Direction.wrapped(args.w_theta, args.w_phi)
        v = Direction.wrapped(args.v_theta, args.v_phi)
        rep = singlet_locality_scenario(w, v)
        if args.trials:
            sweep = singlet_locality_sweep(args.trials, args.seed)
            for c in sweep.checks:
                c.label = f"sweep: {c.label}"
            rep.checks.extend(sweep.checks)
            rep.data.update({f"sweep_{k}": v for k, v in sweep.data.items()})
        return rep
    if name == "ensemble":
        return ensemble_ambiguity_scenario(seed=args.seed)
    if name == "dragon":
        return dragon_scenario(complex(args.alpha_re, args.alpha_im),
                               complex(args.beta_re, args.beta_im), tol=args.tol)
    if name == "brownian":
        if (args.diffusion is None) != (args.time is None):
            raise _InputError("--diffusion and --time must be given together")
        if args.diffusion is None:
            return brownian_scenario()
        return brownian_scenario(((args.diffusion, args.time),))
    return marginal_ambiguity_scenario()


class _InputError(Exception):
    pass


def _run_check(args) -> ScenarioReport:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise _InputError(f"cannot read {args.file}: {exc}") from exc
    sf = parse_scenario_file(text)
    return CompiledScenario(sf).run(name=args.file)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with default_tol(args.tol):
            if args.command == "scenario":
                report = _run_scenario(args)
            else:
                report = _run_check(args)
    except _InputError as exc:
        print(f"error: InputError: {exc}", file=sys.stderr)
        return 2
    except QHistError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 2
    print(report.to_json() if args.format == "json" else report.to_text())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
