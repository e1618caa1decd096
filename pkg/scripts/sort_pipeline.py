#!/usr/bin/env python3
"""Walk the sorting example end to end: repository, tree grammar, SMT
script, and constrained enumeration of the two valid compositions.
"""

from __future__ import annotations

from clssmt.grammar import print_term, print_term_functional, prune, term_to_dot
from clssmt.inhabitation import InhabitationRequest, inhabit
from clssmt.repository import parse_repository
from clssmt.smt import Finitized, assign_tables, parse_constraints, translate_grammar
from clssmt.solver import enumerate_solutions
from clssmt.types import parse_type

REPOSITORY = """\
var alpha in { double, List(double), minimal & double }

default : double
id : alpha -> alpha
min : double -> SortedList(double) -> minimal & double
values : List(double)
inv : double -> double
sortmap : (double -> double) -> List(double) -> SortedList(double)
"""

CONSTRAINTS = """\
never-applied id
never-applied inv
leaf-arg min 1
"""


def main() -> None:
    repo = parse_repository(REPOSITORY)
    goal = parse_type("minimal & double")
    g = prune(inhabit(InhabitationRequest(repo, goal)))

    print("== tree grammar ==")
    print(f"start: {g.start}")
    for nt, alternatives in g.rules.items():
        for rhs in alternatives:
            print(f"  {nt} -> {rhs.combinator}({', '.join(rhs.args)})")

    constraints = tuple(parse_constraints(CONSTRAINTS))
    tables = assign_tables(g)
    script = translate_grammar(
        g, g.start, tables, Finitized(4), constraints=constraints
    )
    print(f"\n== SMT script: {len(script.assertions)} assertions over "
          f"{len(script.vertices)} vertices ==")
    for line in script.text().splitlines()[:8]:
        print(f"  {line}")
    print("  ...")

    result = enumerate_solutions(
        script, g, g.start, tables, k=10, constraints=constraints
    )
    print(f"\n== solutions (stopped: {result.stopped_because}, "
          f"solver {result.solver_seconds:.2f}s) ==")
    for term in result.terms:
        print(f"  {print_term_functional(term)}   curried: {print_term(term)}")

    if result.terms:
        combinator_table, _ = tables
        print("\n== first solution as DOT ==")
        print(term_to_dot(result.terms[0], combinator_table))


if __name__ == "__main__":
    main()
