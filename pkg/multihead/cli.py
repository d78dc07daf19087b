"""Command-line interface for multihead."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, config, user_config
from .automata import (
    accepts,
    format_machine,
    max_run_steps,
    parse_machine,
    split_input,
)
from .errors import BudgetExceeded, MultiheadError, ParseError
from .halting import Method, analyze_heads
from .ips import (
    Mode,
    best_adversarial_certificate,
    build_verifier,
    choose_parameters,
    classify_heads,
    coin_average_distribution,
    honest_certificate,
    outcome_distribution,
    parse_certificate,
    parse_classification,
    parse_coins,
    parse_weight,
    round_outcome_table,
    run_verifier,
    strong_error,
)
from .ntmsim import render_trace, scaling_report, simulate, simulate_exhaustive
from .report import write_report
from .transforms import add_counter_heads, add_timer_head, project_head

log = logging.getLogger(__name__)


class UsageError(Exception):
    """Bad command-line usage; exits with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        """Raise UsageError instead of exiting."""
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _configure_logging(verbosity: int) -> None:
    level = {0: config.LOG_LEVEL, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(Path(config.LOG_FILE).expanduser()))
    logging.basicConfig(
        level=level,
        format=config.LOG_FORMAT,
        datefmt=config.LOG_DATEFMT,
        handlers=handlers,
        force=True,
    )


def _load_machine(path: str):
    try:
        return parse_machine(Path(path).read_text(encoding="utf-8"))
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def _load_certificate(path: str, heads: int):
    try:
        return parse_certificate(Path(path).read_text(encoding="utf-8"), heads)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def _verifier(args, machine):
    try:
        if args.heads:
            classification = parse_classification(args.heads)
        else:
            classification = classify_heads(machine)
        weight = parse_weight(args.w)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return build_verifier(machine, classification, Mode(args.mode), args.rounds, weight, args.approximate)


def _emit(args, result) -> None:
    sys.stdout.write(write_report(result, machine_readable=args.machine_readable, approx=args.approx))


# Commands

def cmd_run(args) -> None:
    """Report membership of one input, optionally with the longest run."""
    machine = _load_machine(args.machine)
    word = split_input(args.input, machine.alphabet)
    _emit(args, accepts(machine, word))
    if args.steps:
        steps = max_run_steps(machine, word)
        sys.stdout.write(f"max_run_steps={'inf' if steps == float('inf') else steps}\n")


def cmd_project(args) -> None:
    """Write the one-head projection onto ``--head``."""
    machine = project_head(_load_machine(args.machine), args.head)
    _write_machine(args, machine)


def cmd_transform(args) -> None:
    """Write the machine with a timer head or counter heads added."""
    machine = _load_machine(args.machine)
    if args.kind == "timer":
        machine = add_timer_head(machine, args.slope)
    else:
        machine = add_counter_heads(machine)
    _write_machine(args, machine)


def _write_machine(args, machine) -> None:
    text = format_machine(machine, canonical=args.canonical)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        log.info(f"wrote {args.output}")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> None:
    """Report each head as safe or risky."""
    machine = _load_machine(args.machine)
    _emit(args, analyze_heads(machine, Method(args.method), args.max_len))


def cmd_verifier(args) -> None:
    """Build a verifier, run it on given coins, or report its outcome distribution."""
    machine = _load_machine(args.machine)
    verifier = _verifier(args, machine)
    if args.action == "build":
        _emit(args, verifier)
        return
    if not args.cert:
        raise UsageError(f"verifier {args.action} needs --cert")
    word = split_input(args.input, machine.alphabet)
    cert = _load_certificate(args.cert, machine.heads)
    if args.action == "run":
        _emit(args, run_verifier(verifier, word, cert, parse_coins(args.coins)))
    elif args.enumerate:
        _emit(args, coin_average_distribution(verifier, word, cert))
    else:
        if args.table:
            _emit(args, round_outcome_table(verifier, word, cert))
        _emit(args, outcome_distribution(verifier, word, cert))


def cmd_prove(args) -> None:
    """Write the honest certificate for a member."""
    machine = _load_machine(args.machine)
    cert = honest_certificate(machine, split_input(args.input, machine.alphabet), args.rounds)
    if cert is None:
        raise MultiheadError(f"{args.input!r} is not accepted by {machine.name}")
    _emit(args, cert)


def cmd_attack(args) -> None:
    """Report the best adversarial certificate for one input."""
    machine = _load_machine(args.machine)
    verifier = _verifier(args, machine)
    _emit(args, best_adversarial_certificate(verifier, split_input(args.input, machine.alphabet)))


def cmd_error(args) -> None:
    """Report strong and weak error over all nonmembers up to ``--maxlen``."""
    machine = _load_machine(args.machine)
    _emit(args, strong_error(_verifier(args, machine), args.maxlen, args.workers))


def cmd_params(args) -> None:
    """Report rounds and risky weight for a target error."""
    if args.heads:
        classification = parse_classification(args.heads)
    elif args.machine:
        classification = classify_heads(_load_machine(args.machine))
    else:
        raise UsageError("params needs --heads or --machine")
    _emit(args, choose_parameters(classification, parse_weight(args.epsilon)))


def cmd_ntmsim(args) -> None:
    """Run the tracked-tape simulation, or report its scaling."""
    machine = _load_machine(args.machine)
    if args.action == "scaling":
        lengths = [int(n) for n in args.lengths.split(",") if n]
        _emit(args, scaling_report(machine, lengths))
        return
    word = split_input(args.input, machine.alphabet)
    if args.exhaustive:
        found = simulate_exhaustive(machine, word)
        if found.accepting is None:
            sys.stdout.write(f"nonmember after {found.tried} maximal paths\n")
            return
        result = found.accepting
    else:
        path = [int(c) for c in args.path.split(",") if c] if args.path else accepts(machine, word).choices
        result = simulate(machine, word, path, trace=args.trace)
    _emit(args, result)
    if args.trace:
        sys.stdout.write(render_trace(result))


def cmd_config(args) -> None:
    """Create the configuration file, or print the resolved settings."""
    if args.action == "init":
        sys.stdout.write(f"{user_config.ensure_config_exists()}\n")
        return
    names = (
        "NODE_BUDGET", "SUBSET_BUDGET", "AFA_STATE_CAP", "PRODUCT_BUDGET",
        "SIM_STEP_BUDGET", "EXHAUSTIVE_MAX_LEN", "MIN_WINDOW", "SWEEP_WORKERS",
        "LOG_LEVEL", "LOG_FILE",
    )
    sys.stdout.write("".join(f"{name.lower()}={getattr(config, name)}\n" for name in names))


# Parser

def _verifier_options(parser) -> None:
    parser.add_argument("--machine", required=True, help="machine file (.mhfa)")
    parser.add_argument("--mode", choices=[m.value for m in Mode], default="GB")
    parser.add_argument("--rounds", type=int, default=1)
    parser.add_argument("--w", default="0", help="risky weight, e.g. 1/4 (GB only)")
    parser.add_argument("--heads", help="head classification, e.g. 'safe:2;risky:1' (default: analyze)")
    parser.add_argument("--approximate", action="store_true", help="allow a dyadic SYS rejection approximation")


def _machine_output(parser) -> None:
    parser.add_argument("-o", "--output", help="write the machine here instead of stdout")
    parser.add_argument("--canonical", action="store_true", help="sort transitions")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser with every subcommand."""
    parser = _Parser(prog="multihead", description="Multi-head automata, halting analysis and verifiers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--node-budget", type=int, help=f"configuration cap (default {config.NODE_BUDGET})")
    parser.add_argument("--subset-budget", type=int, help=f"subset cap (default {config.SUBSET_BUDGET})")
    parser.add_argument("--machine-readable", action="store_true", help="key=value output")
    parser.add_argument("--approx", action="store_true", help="add decimals next to exact rationals")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("run", help="decide membership of one input")
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--steps", action="store_true", help="also report the longest run")
    p.set_defaults(func=cmd_run)

    p = commands.add_parser("project", help="project a machine onto one head")
    p.add_argument("machine")
    p.add_argument("--head", type=int, required=True)
    _machine_output(p)
    p.set_defaults(func=cmd_project)

    p = commands.add_parser("transform", help="add timer or counter heads")
    p.add_argument("kind", choices=["timer", "counters"])
    p.add_argument("machine")
    p.add_argument("--slope", type=int, default=1, help="timer slope c")
    _machine_output(p)
    p.set_defaults(func=cmd_transform)

    p = commands.add_parser("analyze", help="classify heads as safe or risky")
    p.add_argument("machine")
    p.add_argument("--method", choices=[m.value for m in Method], default="pipeline")
    p.add_argument("--max-len", type=int, default=6, help="input length bound for the bounded method")
    p.set_defaults(func=cmd_analyze)

    p = commands.add_parser("verifier", help="build or run a verifier")
    p.add_argument("action", choices=["build", "run", "distribution"])
    _verifier_options(p)
    p.add_argument("--input", default="")
    p.add_argument("--cert", help="certificate file (.cert)")
    p.add_argument("--coins", default="", help="coin flips, e.g. 0110")
    p.add_argument("--table", action="store_true", help="also print the round outcome table")
    p.add_argument("--enumerate", action="store_true", help="average over all hard-wired coin strings")
    p.set_defaults(func=cmd_verifier)

    p = commands.add_parser("prove", help="honest certificate for a member")
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--rounds", type=int, default=1)
    p.set_defaults(func=cmd_prove)

    p = commands.add_parser("attack", help="best adversarial certificate")
    _verifier_options(p)
    p.add_argument("--input", default="")
    p.set_defaults(func=cmd_attack)

    p = commands.add_parser("error", help="strong and weak error over nonmembers")
    _verifier_options(p)
    p.add_argument("--maxlen", type=int, default=6)
    p.add_argument("--workers", type=int, help=f"worker processes (default {config.SWEEP_WORKERS})")
    p.set_defaults(func=cmd_error)

    p = commands.add_parser("params", help="choose rounds and risky weight for a target error")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--heads")
    p.add_argument("--machine")
    p.set_defaults(func=cmd_params)

    p = commands.add_parser("ntmsim", help="tracked-tape simulation")
    p.add_argument("action", choices=["run", "scaling"])
    p.add_argument("machine")
    p.add_argument("--input", default="")
    p.add_argument("--path", help="comma-separated transition ids (default: shortest accepting path)")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--lengths", default="16,32,64,128")
    p.set_defaults(func=cmd_ntmsim)

    p = commands.add_parser("config", help="configuration file")
    p.add_argument("action", choices=["init", "show"])
    p.set_defaults(func=cmd_config)
    return parser


def run_command(argv: list[str]) -> int:
    """Run one command; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _configure_logging(args.verbose)
    saved = config.NODE_BUDGET, config.SUBSET_BUDGET
    if args.node_budget is not None:
        config.NODE_BUDGET = args.node_budget
    if args.subset_budget is not None:
        config.SUBSET_BUDGET = args.subset_budget
    try:
        args.func(args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (MultiheadError, OSError, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    finally:
        config.NODE_BUDGET, config.SUBSET_BUDGET = saved
    return 0


def main() -> None:
    """Console entry point."""
    sys.exit(run_command(sys.argv[1:]))
