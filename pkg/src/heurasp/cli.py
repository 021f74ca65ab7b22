"""Command-line entry point: solve, ground, oracle, and gen subcommands.

Exit codes: 10 satisfiable, 20 unsatisfiable, 0 success of a non-solve
subcommand, 1 usage or input error, 2 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .aggregates import compile_aggregates
from .errors import ArgsError, CapError, LPError
from .generator import packable_instance
from .grounding import full_grounding
from .normalize import normalize
from .oracle import enumerate_answer_sets, ground_for_oracle
from .parser import parse_program
from .solver import SolverConfig, solve

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAP = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="heurasp",
        description="Lazy-grounding answer set solver with heuristic "
                    "directives evaluated on partial assignments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="search for answer sets")
    p_solve.add_argument("files", nargs="+")
    p_solve.add_argument("--models", type=int, default=1, metavar="N",
                         help="number of answer sets, 0 for all (default 1)")
    p_solve.add_argument("--heuristics", choices=["on", "off"], default="on")
    p_solve.add_argument("--trace", action="store_true",
                         help="print DECIDE/ASSIGN events to stderr")
    p_solve.add_argument("--seed", type=int, default=None, metavar="K",
                         help="random tie-breaking among equal priorities")
    p_solve.add_argument("--cap", type=int, default=10 ** 6, metavar="M",
                         help="ground rule cap (default 1000000)")
    p_solve.add_argument("--format", choices=["text", "jsonl"],
                         default="text")

    p_ground = sub.add_parser("ground", help="print the full grounding")
    p_ground.add_argument("files", nargs="+")
    p_ground.add_argument("--cap", type=int, default=10 ** 6, metavar="M")

    p_oracle = sub.add_parser("oracle",
                              help="enumerate answer sets by brute force")
    p_oracle.add_argument("files", nargs="+")
    p_oracle.add_argument("--cap", type=int, default=10 ** 6, metavar="M")
    p_oracle.add_argument("--atom-cap", type=int, default=24, metavar="N",
                          help="Herbrand base size limit (default 24)")
    p_oracle.add_argument("--format", choices=["text", "jsonl"],
                          default="text")

    p_gen = sub.add_parser("gen",
                           help="generate a packable bin-packing instance")
    p_gen.add_argument("--items", type=int, required=True)
    p_gen.add_argument("--cap", type=int, required=True)
    p_gen.add_argument("--bins", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--output", default=None,
                       help="write to a file instead of stdout")
    return parser


def _read_program(paths):
    chunks = []
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            chunks.append(handle.read())
    return parse_program("\n".join(chunks))


def _format_model(atoms):
    return "{" + ", ".join(sorted(atoms)) + "}"


def _cmd_solve(args):
    program = _read_program(args.files)
    config = SolverConfig(heuristics=args.heuristics == "on",
                          trace=args.trace, seed=args.seed,
                          ground_cap=args.cap)
    result = solve(program, models=args.models, config=config)
    if args.trace:
        for line in result.trace:
            print(line, file=sys.stderr)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.format == "jsonl":
        for model in result.answer_sets:
            print(json.dumps({"answer_set": sorted(model)}))
        print(json.dumps({"stats": vars(result.stats)}))
    else:
        for model in result.answer_sets:
            print(_format_model(model))
        for line in result.stats.lines():
            print(f"% {line}")
    return EXIT_SAT if result.answer_sets else EXIT_UNSAT


def _cmd_ground(args):
    program = compile_aggregates(normalize(_read_program(args.files)))
    gp = full_grounding(program, cap=args.cap)
    for rule in gp.rules:
        print(rule.text(gp.store))
    for directive in gp.directives:
        print(directive.text(gp.store))
    return EXIT_OK


def _cmd_oracle(args):
    gp = ground_for_oracle(_read_program(args.files), cap=args.cap)
    models = enumerate_answer_sets(gp, atom_cap=args.atom_cap)
    for model in models:
        if args.format == "jsonl":
            print(json.dumps({"answer_set": sorted(model)}))
        else:
            print(_format_model(model))
    return EXIT_OK


def _cmd_gen(args):
    text = packable_instance(args.items, args.cap, args.bins, args.seed)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    handlers = {"solve": _cmd_solve, "ground": _cmd_ground,
                "oracle": _cmd_oracle, "gen": _cmd_gen}
    try:
        return handlers[args.command](args)
    except CapError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (LPError, ArgsError) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
