"""Acceptance suite: one test per advertised guarantee.

Each test drives a complete pipeline slice against a frozen expected
outcome and a stated wall-clock budget, and prints one pass line with
the measured time.  Budgets are generous bounds for a development
machine, not benchmark targets.
"""

from __future__ import annotations

import itertools
import json
import random
import time

from conftest import fixture_text
from hypothesis import given, settings
from oracle_bcd import TAXONOMY, saturated_universe
from test_inhabitation import LABYRINTH_GRAMMAR, SORT_GRAMMAR, _random_small_repo, _rules_as_sets
from test_types import _closed_types

from clssmt.cli import main
from clssmt.filters import satisfies_all
from clssmt.grammar import (
    RuleRhs,
    Term,
    TreeGrammar,
    delayout,
    enumerate_words,
    from_json,
    layout,
    member,
    print_term,
    print_term_functional,
    prune,
    to_json,
)
from clssmt.inhabitation import InhabitationRequest, inhabit
from clssmt.repository import parse_repository
from clssmt.smt import (
    Finitized,
    Forbid,
    ForbidCompose,
    NeverApplied,
    assign_tables,
    parse_constraints,
    translate_combinator,
    translate_grammar,
)
from clssmt.solver import (
    SolverConfig,
    SolverSession,
    default_solver_command,
    enumerate_solutions,
)
from clssmt.tables import CombinatorTable
from clssmt.types import Arrow, Intersection, parse_type, subtype


def _within(label: str, started: float, budget: float) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < budget, f"{label}: {elapsed:.2f}s over the {budget:.0f}s budget"
    print(f"{label}: PASS ({elapsed:.2f}s, budget {budget:.0f}s)")


def test_01_corridor_pipeline_end_to_end():
    """The two-combinator corridor yields exactly its two rules and the
    solver returns exactly up(start).  Budget: 1 s."""
    started = time.perf_counter()
    repo = parse_repository(fixture_text("micro.repo"))
    g = prune(inhabit(InhabitationRequest(repo, parse_type("Pos(3, 3)"))))
    assert g.start == "Pos(3,3)"
    assert _rules_as_sets(g) == {
        "Pos(3,3)": {("up", ("Pos(3,4)",))},
        "Pos(3,4)": {("start", ())},
    }
    tables = assign_tables(g)
    script = translate_grammar(g, g.start, tables, Finitized(2))
    result = enumerate_solutions(script, g, g.start, tables, k=1)
    assert [print_term_functional(t) for t in result.terms] == ["up(start)"]
    _within("acceptance 01 corridor pipeline", started, 1.0)


def test_02_labyrinth_grammar_reproduced_rule_for_rule(labyrinth_repo):
    """Inhabiting the bundled labyrinth at Pos(1, 0) reproduces the
    frozen nine-nonterminal grammar exactly.  Budget: 5 s."""
    started = time.perf_counter()
    g = prune(inhabit(InhabitationRequest(labyrinth_repo, parse_type("Pos(1, 0)"))))
    assert g.start == "Pos(1,0)"
    assert _rules_as_sets(g) == LABYRINTH_GRAMMAR
    _within("acceptance 02 labyrinth grammar", started, 5.0)


def test_03_sort_grammar_reproduced_rule_for_rule(sort_repo):
    """Inhabiting the sorting repository at minimal & double reproduces
    the frozen five-nonterminal grammar exactly.  Budget: 5 s."""
    started = time.perf_counter()
    g = prune(inhabit(InhabitationRequest(sort_repo, parse_type("minimal & double"))))
    assert g.start == "double & minimal"
    assert _rules_as_sets(g) == SORT_GRAMMAR
    _within("acceptance 03 sort grammar", started, 5.0)


def test_04_sort_enumeration_finds_exactly_two_terms(sort_grammar):
    """With id and inv banned from head position and min's first
    argument forced to a leaf, depth-4 enumeration returns exactly the
    two known solutions and then unsat.  Budget: 30 s."""
    started = time.perf_counter()
    constraints = tuple(parse_constraints(fixture_text("sort_constraints.txt")))
    tables = assign_tables(sort_grammar)
    script = translate_grammar(
        sort_grammar, sort_grammar.start, tables, Finitized(4), constraints=constraints
    )
    result = enumerate_solutions(
        script, sort_grammar, sort_grammar.start, tables, k=10, constraints=constraints
    )
    assert {print_term(t) for t in result.terms} == {
        "((min default) ((sortmap inv) values))",
        "((min default) ((sortmap id) values))",
    }
    assert result.stopped_because == "unsat"
    _within("acceptance 04 sort solutions", started, 30.0)


def test_05_labyrinth_filtering_bans_down_and_backtracking(labyrinth_grammar):
    """Under forbid-down plus the four no-undo compositions, every
    depth-6 solution is down-free, adjacency-clean, and a word of the
    grammar; the solution set matches the filtered word oracle.
    Budget: 60 s."""
    started = time.perf_counter()
    constraints = tuple(parse_constraints(fixture_text("labyrinth_constraints.txt")))
    tables = assign_tables(labyrinth_grammar)
    script = translate_grammar(
        labyrinth_grammar, "Pos(1,0)", tables, Finitized(6), constraints=constraints
    )
    result = enumerate_solutions(
        script, labyrinth_grammar, "Pos(1,0)", tables, k=50, constraints=constraints
    )
    assert result.terms
    assert result.stopped_because == "unsat"

    forbidden = {("up", "down"), ("down", "up"), ("left", "right"), ("right", "left")}

    def names(t: Term) -> set[str]:
        return {t.combinator}.union(*(names(a) for a in t.args)) if t.args else {t.combinator}

    def undoes(t: Term) -> bool:
        if t.args:
            first = t.args[0]
            if len(first.args) == 1 and (t.combinator, first.combinator) in forbidden:
                return True
            return any(undoes(a) for a in t.args)
        return False

    for term in result.terms:
        assert "down" not in names(term)
        assert not undoes(term)
        assert member(labyrinth_grammar, "Pos(1,0)", term)

    oracle = {
        w
        for w in enumerate_words(labyrinth_grammar, "Pos(1,0)", 6, 100000)
        if satisfies_all(w, constraints)
    }
    assert set(result.terms) == oracle
    _within(
        f"acceptance 05 labyrinth filtering ({len(result.terms)} solutions)",
        started,
        60.0,
    )


def test_06_solver_set_equals_filtered_word_oracle(sort_grammar, labyrinth_grammar):
    """For both bundled problems and twenty generated repositories, the
    SMT-enumerated solution set at depths 3 and 4 equals the bounded
    word enumeration filtered by the direct constraint evaluator.
    Budget: 10 min."""
    started = time.perf_counter()
    config = SolverConfig(default_solver_command(), incremental=True)
    cases = [
        (sort_grammar, tuple(parse_constraints(fixture_text("sort_constraints.txt")))),
        (
            labyrinth_grammar,
            tuple(parse_constraints(fixture_text("labyrinth_constraints.txt"))),
        ),
    ]
    rng = random.Random(260815)
    while len(cases) < 22:
        repo = parse_repository(_random_small_repo(rng))
        goal = rng.choice(["a", "b", "c", "a & b"])
        g = prune(inhabit(InhabitationRequest(repo, parse_type(goal))))
        pool = sorted({rhs.combinator for alts in g.rules.values() for rhs in alts})
        shape = rng.choice(["none", "forbid", "never-applied", "forbid-compose"])
        if not pool:
            constraints = ()
        elif shape == "forbid":
            constraints = (Forbid(rng.choice(pool)),)
        elif shape == "never-applied":
            constraints = (NeverApplied(rng.choice(pool)),)
        elif shape == "forbid-compose":
            constraints = (ForbidCompose(rng.choice(pool), rng.choice(pool)),)
        else:
            constraints = ()
        cases.append((g, constraints))

    checked = 0
    for g, constraints in cases:
        tables = assign_tables(g)
        for depth in (3, 4):
            if g.start in g.rules:
                oracle = {
                    w
                    for w in enumerate_words(g, g.start, depth, 100000)
                    if satisfies_all(w, constraints)
                }
            else:
                oracle = set()
            script = translate_grammar(
                g, g.start, tables, Finitized(depth), constraints=constraints
            )
            result = enumerate_solutions(
                script, g, g.start, tables, config,
                k=len(oracle) + 5, constraints=constraints,
            )
            assert set(result.terms) == oracle, (g.start, depth, constraints)
            assert result.stopped_because == "unsat", (g.start, depth, result)
            checked += 1
    assert checked == 44
    _within("acceptance 06 solver/oracle equivalence (44 instances)", started, 600.0)


def test_07_rule_alternatives_are_pairwise_exclusive(sort_grammar, labyrinth_grammar):
    """Any two translated alternatives of the same rule contradict each
    other at a fixed vertex: all 21 pairs across both grammars are
    unsat.  Budget: 60 s."""
    started = time.perf_counter()
    preamble = (
        "(set-logic QF_UFLIA)\n"
        "(declare-fun inhabitant (Int) Int)\n"
        "(declare-fun ty (Int) Int)\n"
        "(define-fun leftChild ((i Int)) Int (* 2 i))\n"
        "(define-fun rightChild ((i Int)) Int (+ (* 2 i) 1))\n"
        "(define-fun i () Int 1)\n"
    )
    config = SolverConfig(default_solver_command())
    pairs = 0
    for g in (sort_grammar, labyrinth_grammar):
        tables = assign_tables(g)
        for nt, alternatives in g.rules.items():
            for a, b in itertools.combinations(alternatives, 2):
                body_a = translate_combinator(a.combinator, a.args, tables)
                body_b = translate_combinator(b.combinator, b.args, tables)
                with SolverSession(config) as session:
                    session.send(
                        preamble
                        + f"(assert {body_a})\n(assert {body_b})\n(check-sat)\n"
                    )
                    assert session.check_sat_response() == "unsat", (nt, a, b)
                pairs += 1
    assert pairs == 21
    _within("acceptance 07 pairwise exclusivity (21 pairs)", started, 60.0)


def test_08_subtyping_laws_and_full_oracle_agreement():
    """Reflexivity, meet bounds, transitivity chains, arrow variance,
    and the distributivity instance hold on 1100 generated triples, and
    subtype agrees with the saturation oracle on every pair of its
    universe.  Budget: 2 min."""
    started = time.perf_counter()
    cases = [0]

    @settings(max_examples=1100, deadline=None)
    @given(t1=_closed_types(), t2=_closed_types(), t3=_closed_types())
    def laws(t1, t2, t3):
        cases[0] += 1
        meet = Intersection(t1, t2)
        assert subtype(t1, t1)
        assert subtype(meet, t1) and subtype(meet, t2)
        assert subtype(Intersection(meet, t3), meet)
        assert subtype(Intersection(meet, t3), t1)
        assert subtype(Arrow(t1, Intersection(t2, t3)), Arrow(t1, t2))
        assert subtype(Arrow(t1, t2), Arrow(Intersection(t1, t3), t2))
        assert subtype(
            Intersection(Arrow(t1, t2), Arrow(t1, t3)),
            Arrow(t1, Intersection(t2, t3)),
        )

    laws()
    assert cases[0] >= 1000

    universe, expected = saturated_universe()
    n = len(universe)
    mismatches = sum(
        1
        for i in range(n)
        for j in range(n)
        if subtype(universe[i], universe[j], TAXONOMY) != bool(expected[i, j])
    )
    assert mismatches == 0
    _within(
        f"acceptance 08 subtyping laws ({cases[0]} triples + {n * n} oracle pairs)",
        started,
        120.0,
    )


def test_09_benchmark_completes_at_ten_by_ten(capsys):
    """The seeded 10x10 benchmark finishes inhabitation, translation,
    and a first verified solution, reporting per-phase timings.
    Budget: 10 min."""
    started = time.perf_counter()
    assert main(["bench", "10", "--seed", "1", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert (report["width"], report["height"]) == (10, 10)
    assert set(report["phases"]) == {"inhabit", "translate", "solve"}
    assert report["status"] == "sat"
    assert report["term"]
    phase_text = ", ".join(f"{k} {v:.2f}s" for k, v in report["phases"].items())
    _within(f"acceptance 09 ten-by-ten benchmark ({phase_text})", started, 600.0)


def test_10_round_trips_are_identities():
    """Grammar JSON and term-layout round-trips are identities on 1000
    generated instances.  Budget: 1 min."""
    started = time.perf_counter()
    rng = random.Random(101)
    nt_pool = ["a", "b", "a & b", "Pos(1,2)", "K(a,b)", "a -> b", "SortedList(double)"]
    name_pool = ["f", "g", "h", "k0", "select"]

    for _ in range(500):
        nts = rng.sample(nt_pool, rng.randint(1, len(nt_pool)))
        rules = {
            nt: tuple(
                RuleRhs(
                    rng.choice(name_pool),
                    tuple(rng.choices(nts, k=rng.randint(0, 3))),
                )
                for _ in range(rng.randint(0, 3))
            )
            for nt in nts
        }
        g = TreeGrammar(rng.choice(nts), rules)
        assert from_json(to_json(g)) == g

    table = CombinatorTable(by_name={name: i + 1 for i, name in enumerate(name_pool)})

    def random_term(depth: int) -> Term:
        if depth == 0 or rng.random() < 0.3:
            return Term(rng.choice(name_pool))
        return Term(
            rng.choice(name_pool),
            tuple(random_term(depth - 1) for _ in range(rng.randint(1, 3))),
        )

    for _ in range(500):
        t = random_term(4)
        assert delayout(layout(t, table), table) == t
    _within("acceptance 10 round-trip identities (1000 instances)", started, 60.0)
