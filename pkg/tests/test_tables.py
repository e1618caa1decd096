"""Index tables: bijections between names and SMT integer labels."""

from __future__ import annotations

import pytest

from clssmt.grammar import RuleRhs, TreeGrammar
from clssmt.smt import assign_tables
from clssmt.tables import TableError

PAPER_SORT_INDICES = {
    "default": 1,
    "id": 2,
    "min": 3,
    "values": 4,
    "inv": 5,
    "sortmap": 6,
}


def test_default_assignment_is_first_appearance_order(micro_grammar):
    combinators, nonterminals = assign_tables(micro_grammar)
    assert combinators.by_name == {"up": 1, "start": 2}
    assert nonterminals.by_name["Pos(3,3)"] == 1


def test_paper_overrides_are_honored(sort_grammar):
    combinators, _ = assign_tables(sort_grammar, overrides=PAPER_SORT_INDICES)
    assert combinators.by_name == PAPER_SORT_INDICES


def test_partial_overrides_fill_contiguously(sort_grammar):
    combinators, _ = assign_tables(sort_grammar, overrides={"default": 1})
    assert combinators.by_name["default"] == 1
    assert sorted(combinators.by_name.values()) == [1, 2, 3, 4, 5, 6]


def test_single_combinator_grammar():
    g = TreeGrammar(start="a", rules={"a": (RuleRhs("c", ()),)}, display={"a": "a"})
    combinators, nonterminals = assign_tables(g)
    assert combinators.by_name == {"c": 1}
    assert nonterminals.by_name == {"a": 1}


def test_tables_are_bijections(sort_grammar, labyrinth_grammar):
    for g in (sort_grammar, labyrinth_grammar):
        combinators, nonterminals = assign_tables(g)
        for table in (combinators, nonterminals):
            values = sorted(table.by_name.values())
            assert values == list(range(1, len(values) + 1))
            for name, index in table.by_name.items():
                assert table.index_of(name) == index
                assert table.name_of(index) == name


def test_zero_is_reserved_for_application_nodes(labyrinth_grammar):
    combinators, _ = assign_tables(labyrinth_grammar)
    assert 0 not in combinators.by_name.values()
    with pytest.raises(TableError):
        combinators.name_of(0)


def test_combinator_and_nonterminal_namespaces_are_separate(labyrinth_grammar):
    combinators, nonterminals = assign_tables(labyrinth_grammar)
    assert min(combinators.by_name.values()) == 1
    assert min(nonterminals.by_name.values()) == 1


def test_override_collision_is_an_error(sort_grammar):
    with pytest.raises(TableError, match="collide"):
        assign_tables(sort_grammar, overrides={"id": 2, "min": 2})


def test_override_gap_is_an_error(sort_grammar):
    with pytest.raises(TableError, match="contiguous"):
        assign_tables(sort_grammar, overrides={"id": 99})


def test_unknown_name_lookups_fail(micro_grammar):
    combinators, _ = assign_tables(micro_grammar)
    with pytest.raises(TableError):
        combinators.index_of("nope")
    with pytest.raises(TableError):
        combinators.name_of(42)


def test_nonterminal_overrides(labyrinth_grammar):
    _, nonterminals = assign_tables(
        labyrinth_grammar, nonterminal_overrides={"Pos(1,0)": 1}
    )
    assert nonterminals.by_name["Pos(1,0)"] == 1
