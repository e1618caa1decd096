"""Command-line interface: inhabit, translate, solve, check, enumerate,
and bench subcommands tying the pipeline together.

Exit codes: 0 success, 1 input/validation error, 2 environment error
(missing solver, malformed term in check), 3 solver timeout.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from pathlib import Path

from . import maze as maze_mod
from .errors import (
    ClssmtError,
    SolverNotFoundError,
    SolverProtocolError,
    TermSyntaxError,
)
from .grammar import (
    TreeGrammar,
    from_json,
    member,
    parse_term,
    print_term,
    print_term_functional,
    prune,
    term_to_dot,
    to_json,
)
from .inhabitation import InhabitationRequest, inhabit
from .repository import parse_repository, validate
from .smt import (
    Finitized,
    Quantified,
    SmtScript,
    assign_tables,
    parse_constraints,
    translate_grammar,
)
from .solver import (
    EnumerationResult,
    SolverConfig,
    Unknown,
    Unsat,
    default_solver_command,
    enumerate_solutions,
    solve,
)
from .types import canonical, parse_type, print_type


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors, so exit 1 instead of argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except SolverNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ClssmtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="clssmt",
        description="Synthesize applicative terms from intersection-typed "
        "combinator repositories via tree grammars and SMT.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    inh = sub.add_parser("inhabit", help="compute the tree grammar for a goal type")
    inh.add_argument("repo", type=Path)
    inh.add_argument("goal")
    inh.add_argument("--format", choices=["json", "text"], default="json")
    inh.set_defaults(func=cmd_inhabit)

    tr = sub.add_parser("translate", help="translate a grammar to an SMT-LIB script")
    tr.add_argument("grammar", type=Path)
    tr.add_argument("--goal", help="nonterminal to synthesize (default: start)")
    tr.add_argument("--constraints", type=Path)
    tr.add_argument("--mode", choices=["quantified", "finitized"], default="quantified")
    tr.add_argument("--depth", type=int)
    tr.add_argument("--indices", type=Path)
    tr.add_argument("--exactly-one", action="store_true")
    tr.add_argument("--format", choices=["smt2"], default="smt2")
    tr.set_defaults(func=cmd_translate)

    for name, help_text in (
        ("solve", "find the first verified solution"),
        ("enumerate", "enumerate distinct verified solutions"),
    ):
        sp = sub.add_parser(name, help=help_text)
        source = sp.add_mutually_exclusive_group(required=True)
        source.add_argument("--repo", type=Path, help="repository file (inhabits inline)")
        source.add_argument("--grammar", type=Path, help="precomputed grammar JSON")
        sp.add_argument("--goal", help="goal type (repo) or nonterminal (grammar)")
        sp.add_argument("--constraints", type=Path)
        sp.add_argument("--mode", choices=["quantified", "finitized"], default="finitized")
        sp.add_argument("--depth", type=int, default=6)
        sp.add_argument("--indices", type=Path)
        sp.add_argument("--solver", help="solver command line (overrides discovery)")
        sp.add_argument("--format", choices=["text", "json", "dot"], default="text")
        if name == "enumerate":
            sp.add_argument("--max-solutions", type=int, default=10)
        sp.set_defaults(func=cmd_enumerate, max_solutions=1 if name == "solve" else None)

    ch = sub.add_parser("check", help="decide grammar membership of a term")
    ch.add_argument("grammar", type=Path)
    ch.add_argument("goal")
    ch.add_argument("term")
    ch.set_defaults(func=cmd_check)

    be = sub.add_parser("bench", help="labyrinth benchmark: inhabit, translate, solve")
    be.add_argument("size", type=int, nargs="?", help="maze side length (n >= 2)")
    be.add_argument("--layout", type=Path, help="maze drawing file instead of random cells")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--density", type=float, default=0.2)
    be.add_argument("--depth", type=int, help="finitization depth (default: cells + 2)")
    be.add_argument("--solver")
    be.add_argument("--format", choices=["text", "json"], default="text")
    be.set_defaults(func=cmd_bench)
    return p


def cmd_inhabit(args: argparse.Namespace) -> int:
    repo = parse_repository(args.repo.read_text())
    problems = validate(repo)
    if problems:
        for d in problems:
            print(f"error: {d.code}: {d.message}", file=sys.stderr)
        return 1
    goal = parse_type(args.goal)
    g = prune(inhabit(InhabitationRequest(repo, goal)))
    if args.format == "json":
        print(to_json(g), end="")
    else:
        print(_grammar_text(g), end="")
    return 0


def _grammar_text(g: TreeGrammar) -> str:
    lines = [f"start: {g.start}"]
    for nt, alternatives in g.rules.items():
        rhs = " | ".join(
            f"{r.combinator}({', '.join(r.args)})" for r in alternatives
        ) or "<none>"
        lines.append(f"{nt} -> {rhs}")
    return "\n".join(lines) + "\n"


def cmd_translate(args: argparse.Namespace) -> int:
    g = from_json(args.grammar.read_text())
    goal = _resolve_goal(g, args.goal)
    constraints = _load_constraints(args.constraints)
    tables = assign_tables(g, *_load_indices(args.indices))
    if args.mode == "finitized":
        if args.depth is None:
            print("error: finitized mode requires --depth", file=sys.stderr)
            return 1
        mode = Finitized(args.depth)
    else:
        mode = Quantified()
    script = translate_grammar(
        g, goal, tables, mode, constraints=constraints, exactly_one=args.exactly_one
    )
    print(script.text(), end="")
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    g, goal = _load_problem(args)
    constraints = _load_constraints(args.constraints)
    tables = assign_tables(g, *_load_indices(args.indices))
    config = _solver_config(args)

    if args.mode == "quantified":
        script = translate_grammar(g, goal, tables, Quantified(), constraints=constraints)
        outcome = solve(script, config)
        if isinstance(outcome, Unknown):
            print(f"unknown: {outcome.reason}")
            return 3 if outcome.reason == "timeout" else 0
        print("unsat" if isinstance(outcome, Unsat) else "sat")
        return 0

    script = translate_grammar(
        g, goal, tables, Finitized(args.depth), constraints=constraints
    )
    k = args.max_solutions if args.max_solutions is not None else 10
    result = enumerate_solutions(
        g=g, goal=goal, script=script, tables=tables, config=config,
        k=k, constraints=tuple(constraints),
    )
    return _report(result, tables, args)


def _report(result: EnumerationResult, tables, args: argparse.Namespace) -> int:
    if args.format == "json":
        print(json.dumps({
            "terms": [print_term_functional(t) for t in result.terms],
            "curried": [print_term(t) for t in result.terms],
            "rejected_artifacts": result.rejected_artifacts,
            "stopped_because": result.stopped_because,
            "solver_seconds": round(result.solver_seconds, 3),
        }, indent=2))
    elif args.format == "dot":
        combinator_table, _ = tables
        for t in result.terms:
            print(term_to_dot(t, combinator_table))
    else:
        for t in result.terms:
            print(print_term(t))
        print(
            f"; {len(result.terms)} solution(s), "
            f"{result.rejected_artifacts} artifact(s) rejected, "
            f"stopped: {result.stopped_because}, "
            f"solver {result.solver_seconds:.2f}s",
            file=sys.stderr,
        )
    if result.stopped_because == "unknown" and result.detail == "timeout":
        return 3
    if result.stopped_because == "error":
        print(f"error: {result.detail}", file=sys.stderr)
        return 2
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    g = from_json(args.grammar.read_text())
    goal = _resolve_goal(g, args.goal)
    if goal not in g.rules:
        print(f"error: unknown nonterminal {goal!r}", file=sys.stderr)
        return 1
    try:
        term = parse_term(args.term)
    except TermSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    verdict = member(g, goal, term)
    print("true" if verdict else "false")
    return 0 if verdict else 1


def cmd_bench(args: argparse.Namespace) -> int:
    if args.layout is not None:
        maze = maze_mod.parse_layout(args.layout.read_text())
    else:
        if args.size is None:
            print("error: bench needs a size or --layout", file=sys.stderr)
            return 1
        if args.size < 2:
            print("error: maze size must be at least 2", file=sys.stderr)
            return 1
        maze = maze_mod.generate_maze(args.size, args.seed, args.density)

    repo = parse_repository(maze_mod.maze_to_repository(maze))
    goal = parse_type(maze_mod.goal_type_text(maze))
    depth = args.depth if args.depth is not None else len(maze.free) + 2

    phases: dict[str, float] = {}
    t0 = time.perf_counter()
    g = prune(inhabit(InhabitationRequest(repo, goal)))
    phases["inhabit"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    tables = assign_tables(g)
    script = translate_grammar(g, g.start, tables, Finitized(depth))
    phases["translate"] = time.perf_counter() - t0

    config = _solver_config(args)
    t0 = time.perf_counter()
    result = enumerate_solutions(script, g, g.start, tables, config, k=1)
    phases["solve"] = time.perf_counter() - t0

    status = "sat" if result.terms else result.stopped_because
    term_text = print_term_functional(result.terms[0]) if result.terms else None
    if args.format == "json":
        print(json.dumps({
            "width": maze.width, "height": maze.height,
            "free_cells": len(maze.free), "depth": depth,
            "nonterminals": len(g.rules),
            "rules": sum(len(a) for a in g.rules.values()),
            "assertions": len(script.assertions),
            "phases": {k: round(v, 3) for k, v in phases.items()},
            "status": status, "term": term_text,
        }, indent=2))
    else:
        print(
            f"maze {maze.width}x{maze.height}, {len(maze.free)} free cells, "
            f"depth {depth}"
        )
        print(
            f"inhabit: {phases['inhabit']:.3f}s "
            f"({len(g.rules)} nonterminals, "
            f"{sum(len(a) for a in g.rules.values())} rules)"
        )
        print(f"translate: {phases['translate']:.3f}s ({len(script.assertions)} assertions)")
        print(f"solve: {phases['solve']:.3f}s {status}")
        if term_text:
            print(f"first solution: {term_text}")
    if result.stopped_because == "unknown" and result.detail == "timeout":
        return 3
    if result.stopped_because == "error":
        print(f"error: {result.detail}", file=sys.stderr)
        return 2
    return 0


def _load_problem(args: argparse.Namespace) -> tuple[TreeGrammar, str]:
    if args.repo is not None:
        if not args.goal:
            print("error: --repo needs --goal <type>", file=sys.stderr)
            raise SystemExit(1)
        repo = parse_repository(args.repo.read_text())
        problems = validate(repo)
        if problems:
            for d in problems:
                print(f"error: {d.code}: {d.message}", file=sys.stderr)
            raise SystemExit(1)
        g = prune(inhabit(InhabitationRequest(repo, parse_type(args.goal))))
        return g, g.start
    g = from_json(args.grammar.read_text())
    return g, _resolve_goal(g, args.goal)


def _resolve_goal(g: TreeGrammar, goal: str | None) -> str:
    if goal is None:
        return g.start
    if goal in g.rules or goal == g.start:
        return goal
    try:
        canonical_text = print_type(canonical(parse_type(goal)))
    except ClssmtError:
        return goal
    return canonical_text if canonical_text in g.rules else goal


def _load_constraints(path: Path | None):
    if path is None:
        return []
    return parse_constraints(path.read_text())


def _load_indices(path: Path | None) -> tuple[dict[str, int] | None, dict[str, int] | None]:
    if path is None:
        return None, None
    data = json.loads(path.read_text())
    if not isinstance(data, dict):
        raise ClssmtError("indices file must hold a JSON object")
    if "combinators" in data or "nonterminals" in data:
        return data.get("combinators"), data.get("nonterminals")
    return data, None


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    if getattr(args, "solver", None):
        command = tuple(shlex.split(args.solver))
    else:
        command = default_solver_command()
    return SolverConfig(command)


if __name__ == "__main__":
    sys.exit(main())
