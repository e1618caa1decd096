"""Solver driver: process protocol, model decoding, solution enumeration."""

from __future__ import annotations

import pytest

from clssmt.errors import SolverNotFoundError
from clssmt.grammar import Term, parse_term
from clssmt.smt import Finitized, Quantified, Raw, assign_tables, translate_grammar
from clssmt.solver import (
    Decoded,
    Rejected,
    Sat,
    SolverConfig,
    SolverSession,
    Unknown,
    Unsat,
    _decode_int,
    _parse_sexpr,
    _take_unit,
    decode_and_verify,
    default_solver_command,
    enumerate_solutions,
    solve,
)


def _micro_script(micro_grammar, depth=2, constraints=()):
    tables = assign_tables(micro_grammar)
    script = translate_grammar(
        micro_grammar, micro_grammar.start, tables, Finitized(depth), constraints
    )
    return script, tables


# --- protocol helpers (no solver process) ------------------------------------


def test_take_unit_splits_on_newline_outside_parens():
    assert _take_unit(b"sat\n(foo") == (b"sat", b"\n(foo")
    assert _take_unit(b"((a 1)\n (b 2))\nrest") == (b"((a 1)\n (b 2))", b"\nrest")
    assert _take_unit(b"(unbalanced") == (None, b"(unbalanced")
    assert _take_unit(b"") == (None, b"")


def test_parse_sexpr_nested():
    assert _parse_sexpr("((x 1) (y (- 2)))") == [["x", "1"], ["y", ["-", "2"]]]
    assert _parse_sexpr("sat") == "sat"


def test_decode_int_handles_negatives():
    assert _decode_int("7") == 7
    assert _decode_int(["-", "5"]) == -5


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(command=("z3",), timeout_seconds=0)
    with pytest.raises(ValueError):
        SolverConfig(command=("z3",), value_query_batch=0)


def test_missing_solver_executable():
    cfg = SolverConfig(command=("/nonexistent/solver-binary",))
    with pytest.raises(SolverNotFoundError):
        SolverSession(cfg)


# --- decoding ------------------------------------------------------------------


def test_decode_leaf_layout(micro_grammar):
    tables = assign_tables(micro_grammar)
    start_index = tables[0].index_of("start")
    goal_id = tables[1].index_of("Pos(3,4)")
    outcome = Sat(layout={1: start_index}, ty={1: goal_id})
    got = decode_and_verify(outcome, micro_grammar, "Pos(3,4)", tables)
    assert isinstance(got, Decoded)
    assert got.term == Term("start", ())
    assert got.occupied == {1: start_index}


def test_decode_application_layout(micro_grammar):
    tables = assign_tables(micro_grammar)
    up = tables[0].index_of("up")
    start = tables[0].index_of("start")
    outcome = Sat(layout={1: 0, 2: up, 3: start}, ty={})
    got = decode_and_verify(outcome, micro_grammar, "Pos(3,3)", tables)
    assert isinstance(got, Decoded)
    assert got.term == parse_term("up(start)")
    assert got.occupied == {1: 0, 2: up, 3: start}


def test_decode_ignores_junk_at_unvisited_vertices(micro_grammar):
    tables = assign_tables(micro_grammar)
    up = tables[0].index_of("up")
    start = tables[0].index_of("start")
    layout = {1: 0, 2: up, 3: start, 6: 99, 7: 99, 14: 3}
    got = decode_and_verify(Sat(layout=layout, ty={}), micro_grammar, "Pos(3,3)", tables)
    assert isinstance(got, Decoded)
    assert got.term == parse_term("up(start)")
    assert set(got.occupied) == {1, 2, 3}


def test_decode_rejects_nonmember(micro_grammar):
    tables = assign_tables(micro_grammar)
    start = tables[0].index_of("start")
    got = decode_and_verify(Sat(layout={1: start}, ty={}), micro_grammar, "Pos(3,3)", tables)
    assert isinstance(got, Rejected)
    assert "not a word" in got.reason


def test_decode_rejects_malformed_spine(micro_grammar):
    tables = assign_tables(micro_grammar)
    # application node whose left child is another application with no
    # combinator leaf below it
    got = decode_and_verify(
        Sat(layout={1: 0, 2: 0, 3: 1}, ty={}), micro_grammar, "Pos(3,3)", tables
    )
    assert isinstance(got, Rejected)


def test_decode_rejects_unknown_combinator_index(micro_grammar):
    tables = assign_tables(micro_grammar)
    got = decode_and_verify(
        Sat(layout={1: 42}, ty={}), micro_grammar, "Pos(3,3)", tables
    )
    assert isinstance(got, Rejected)


# --- end-to-end with the bundled solver ----------------------------------------


def test_trivially_unsatisfiable_script(micro_grammar):
    script, _ = _micro_script(micro_grammar, constraints=(Raw("(assert false)"),))
    assert solve(script) == Unsat()


def test_micro_solution_decodes_to_up_start(micro_grammar):
    script, tables = _micro_script(micro_grammar)
    outcome = solve(script)
    assert isinstance(outcome, Sat)
    got = decode_and_verify(outcome, micro_grammar, micro_grammar.start, tables)
    assert isinstance(got, Decoded)
    assert got.term == parse_term("up(start)")


def test_micro_enumeration_finds_single_solution_then_unsat(micro_grammar):
    script, tables = _micro_script(micro_grammar, depth=3)
    result = enumerate_solutions(
        script, micro_grammar, micro_grammar.start, tables, k=5
    )
    assert result.terms == [parse_term("up(start)")]
    assert result.stopped_because == "unsat"
    assert result.solver_seconds > 0


def test_enumeration_is_duplicate_free_and_bounded(labyrinth_grammar):
    tables = assign_tables(labyrinth_grammar)
    script = translate_grammar(
        labyrinth_grammar, "Pos(1,0)", tables, Finitized(5)
    )
    result = enumerate_solutions(
        script, labyrinth_grammar, "Pos(1,0)", tables, k=4
    )
    assert len(result.terms) == 4
    assert len(set(result.terms)) == 4
    assert result.stopped_because == "limit"


def test_enumeration_of_unsatisfiable_script(micro_grammar):
    script, tables = _micro_script(micro_grammar, constraints=(Raw("(assert false)"),))
    result = enumerate_solutions(
        script, micro_grammar, micro_grammar.start, tables, k=3
    )
    assert result.terms == []
    assert result.stopped_because == "unsat"
    assert result.rejected_artifacts == 0


def test_incremental_and_oneshot_agree(micro_grammar):
    script, tables = _micro_script(micro_grammar, depth=3)
    results = []
    for incremental in (False, True):
        cfg = SolverConfig(command=default_solver_command(), incremental=incremental)
        results.append(
            enumerate_solutions(
                script, micro_grammar, micro_grammar.start, tables,
                config=cfg, k=5,
            ).terms
        )
    assert results[0] == results[1]


def test_quantified_timeout_reports_unknown(labyrinth_grammar):
    tables = assign_tables(labyrinth_grammar)
    script = translate_grammar(labyrinth_grammar, "Pos(1,0)", tables, Quantified())
    cfg = SolverConfig(command=default_solver_command(), timeout_seconds=0.01)
    outcome = solve(script, cfg)
    assert isinstance(outcome, Unknown)
    assert "timeout" in outcome.reason
