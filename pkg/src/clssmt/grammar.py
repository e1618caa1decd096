"""Regular tree grammars over applicative terms, and the binary
inhabitant-tree view used by the SMT encoding.

Nonterminals are identified by the canonical text of the type they
stand for.  A rule `nt -> c(beta_1, ..., beta_n)` says: a term rooted
at combinator c with n arguments, the i-th drawn from beta_i, is a word
of nt.  Inhabitant trees address vertices heap-style: the root is 1,
the left child of i is 2i, the right child 2i + 1.  Application
vertices carry label 0, leaves carry the combinator's index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import GrammarFormatError, MalformedTreeError, TermSyntaxError
from .tables import CombinatorTable


@dataclass(frozen=True)
class RuleRhs:
    combinator: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Term:
    combinator: str
    args: tuple[Term, ...] = ()


VertexLayout = dict[int, int]


@dataclass
class TreeGrammar:
    start: str
    rules: dict[str, tuple[RuleRhs, ...]]
    display: dict[str, str] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeGrammar):
            return NotImplemented
        return (
            self.start == other.start
            and {nt: frozenset(alts) for nt, alts in self.rules.items()}
            == {nt: frozenset(alts) for nt, alts in other.rules.items()}
        )

    def alternatives(self, nonterminal: str) -> tuple[RuleRhs, ...]:
        if nonterminal not in self.rules:
            raise KeyError(f"unknown nonterminal {nonterminal!r}")
        return self.rules[nonterminal]

    def is_empty(self) -> bool:
        return not self.rules


# ---------------------------------------------------------------------------
# Membership and enumeration

def member(g: TreeGrammar, nonterminal: str, term: Term) -> bool:
    """Does the term derive from the nonterminal?  Memoized recursion
    over (nonterminal, subterm) pairs.
    """
    if nonterminal not in g.rules:
        raise KeyError(f"unknown nonterminal {nonterminal!r}")
    memo: dict[tuple[str, Term], bool] = {}

    def check(nt: str, t: Term) -> bool:
        key = (nt, t)
        if key in memo:
            return memo[key]
        result = any(
            rhs.combinator == t.combinator
            and len(rhs.args) == len(t.args)
            and all(check(b, a) for b, a in zip(rhs.args, t.args))
            for rhs in g.rules.get(nt, ())
        )
        memo[key] = result
        return result

    return check(nonterminal, term)


def term_depth(t: Term) -> int:
    """Depth of the term's inhabitant tree (a lone combinator is 0)."""
    n = len(t.args)
    if n == 0:
        return 0
    return max(n, max((n - k) + term_depth(a) for k, a in enumerate(t.args)))


def enumerate_words(
    g: TreeGrammar, nonterminal: str, max_depth: int, limit: int | None = None
) -> list[Term]:
    """All words of the nonterminal whose inhabitant tree has depth at
    most max_depth, ordered by depth and then lexicographically on
    combinator first-appearance indices.  Deterministic; results at a
    smaller depth are a prefix of results at a larger one.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if nonterminal not in g.rules:
        raise KeyError(f"unknown nonterminal {nonterminal!r}")

    memo: dict[tuple[str, int], frozenset[Term]] = {}

    def words(nt: str, budget: int) -> frozenset[Term]:
        # every recursion shrinks the budget, so (nt, budget) cannot recur
        # into itself and plain memoization terminates
        if budget < 0:
            return frozenset()
        key = (nt, budget)
        if key in memo:
            return memo[key]
        found: set[Term] = set()
        for rhs in g.rules.get(nt, ()):
            n = len(rhs.args)
            if n > budget:
                continue
            pools = [
                list(words(beta, budget - (n - k))) for k, beta in enumerate(rhs.args)
            ]
            for combo in _product(pools):
                found.add(Term(rhs.combinator, tuple(combo)))
        result = frozenset(found)
        memo[key] = result
        return result

    index = {name: i for i, name in enumerate(first_appearance_order(g), start=1)}

    def key(t: Term) -> tuple[int, tuple[int, ...], str]:
        return (term_depth(t), _preorder_indices(t, index), print_term(t))

    ordered = sorted(words(nonterminal, max_depth), key=key)
    return ordered[:limit] if limit is not None else ordered


def _product(pools: list[list[Term]]) -> list[tuple[Term, ...]]:
    result: list[tuple[Term, ...]] = [()]
    for pool in pools:
        result = [combo + (item,) for combo in result for item in pool]
        if not result:
            return []
    return result


def _preorder_indices(t: Term, index: dict[str, int]) -> tuple[int, ...]:
    out = [index.get(t.combinator, 0)]
    for a in t.args:
        out.extend(_preorder_indices(a, index))
    return tuple(out)


def first_appearance_order(g: TreeGrammar) -> list[str]:
    """Combinator names in order of first appearance across the rules."""
    seen: list[str] = []
    for alternatives in g.rules.values():
        for rhs in alternatives:
            if rhs.combinator not in seen:
                seen.append(rhs.combinator)
    return seen


def nonterminal_order(g: TreeGrammar) -> list[str]:
    """Nonterminal ids, start symbol first, then first appearance."""
    seen: list[str] = []
    if g.start in g.rules:
        seen.append(g.start)
    for nt, alternatives in g.rules.items():
        if nt not in seen:
            seen.append(nt)
        for rhs in alternatives:
            for arg in rhs.args:
                if arg not in seen:
                    seen.append(arg)
    return seen


# ---------------------------------------------------------------------------
# Pruning

def prune(g: TreeGrammar) -> TreeGrammar:
    """Drop unproductive rules, then restrict to nonterminals reachable
    from the start symbol.  An empty result is a valid grammar.
    """
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for nt, alternatives in g.rules.items():
            if nt in productive:
                continue
            if any(all(a in productive for a in rhs.args) for rhs in alternatives):
                productive.add(nt)
                changed = True

    if g.start not in productive:
        return TreeGrammar(start=g.start, rules={}, display={})

    kept: dict[str, tuple[RuleRhs, ...]] = {}
    for nt, alternatives in g.rules.items():
        if nt in productive:
            kept[nt] = tuple(
                rhs for rhs in alternatives if all(a in productive for a in rhs.args)
            )

    reachable: set[str] = set()
    queue = [g.start]
    while queue:
        nt = queue.pop()
        if nt in reachable:
            continue
        reachable.add(nt)
        for rhs in kept.get(nt, ()):
            queue.extend(rhs.args)

    rules = {nt: alts for nt, alts in kept.items() if nt in reachable}
    display = {nt: g.display.get(nt, nt) for nt in rules}
    return TreeGrammar(start=g.start, rules=rules, display=display)


# ---------------------------------------------------------------------------
# JSON serialization

def to_json(g: TreeGrammar) -> str:
    """Serialize with sorted keys; alternatives keep stored order.
    Identical grammars serialize byte-identically.
    """
    referenced = {arg for alts in g.rules.values() for rhs in alts for arg in rhs.args}
    rules: dict[str, list[dict[str, object]]] = {}
    for nt in sorted(set(g.rules) | referenced):
        rules[nt] = [
            {"combinator": rhs.combinator, "args": list(rhs.args)}
            for rhs in g.rules.get(nt, ())
        ]
    display = {nt: g.display.get(nt, nt) for nt in rules}
    doc = {"start": g.start, "display": display, "rules": rules}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> TreeGrammar:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GrammarFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "start" not in doc or "rules" not in doc:
        raise GrammarFormatError("expected an object with 'start' and 'rules'")
    start = doc["start"]
    raw_rules = doc["rules"]
    if not isinstance(start, str) or not isinstance(raw_rules, dict):
        raise GrammarFormatError("'start' must be a string and 'rules' an object")
    rules: dict[str, tuple[RuleRhs, ...]] = {}
    for nt, alternatives in raw_rules.items():
        if not isinstance(alternatives, list):
            raise GrammarFormatError(f"rules for {nt!r} must be a list")
        parsed = []
        for alt in alternatives:
            if (
                not isinstance(alt, dict)
                or not isinstance(alt.get("combinator"), str)
                or not isinstance(alt.get("args"), list)
                or not all(isinstance(a, str) for a in alt["args"])
            ):
                raise GrammarFormatError(f"malformed alternative under {nt!r}: {alt!r}")
            parsed.append(RuleRhs(alt["combinator"], tuple(alt["args"])))
        rules[nt] = tuple(parsed)
    for nt, alternatives in rules.items():
        for rhs in alternatives:
            for arg in rhs.args:
                if arg not in rules:
                    raise GrammarFormatError(
                        f"rule {nt} -> {rhs.combinator} references unknown nonterminal {arg!r}"
                    )
    if rules and start not in rules:
        raise GrammarFormatError(f"start symbol {start!r} has no rules entry")
    display_raw = doc.get("display", {})
    if not isinstance(display_raw, dict):
        raise GrammarFormatError("'display' must be an object")
    display = {nt: str(display_raw.get(nt, nt)) for nt in rules}
    return TreeGrammar(start=start, rules=rules, display=display)


# ---------------------------------------------------------------------------
# Terms: parsing and printing

def print_term(t: Term) -> str:
    """Curried rendering: `((min default) ((sortmap inv) values))`."""
    if not t.args:
        return t.combinator
    head = print_term(Term(t.combinator, t.args[:-1]))
    return f"({head} {print_term(t.args[-1])})"


def print_term_functional(t: Term) -> str:
    """Uncurried rendering: `min(default, sortmap(inv, values))`."""
    if not t.args:
        return t.combinator
    return f"{t.combinator}({', '.join(print_term_functional(a) for a in t.args)})"


def parse_term(text: str) -> Term:
    """Parse either rendering (they may be mixed)."""
    pos = 0

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse() -> Term:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            raise TermSyntaxError("unexpected end of input")
        if text[pos] == "(":
            pos += 1
            items = []
            while True:
                skip_ws()
                if pos >= len(text):
                    raise TermSyntaxError("unbalanced parenthesis")
                if text[pos] == ")":
                    pos += 1
                    break
                items.append(parse())
            if not items:
                raise TermSyntaxError("empty application")
            acc = items[0]
            for item in items[1:]:
                acc = Term(acc.combinator, acc.args + (item,))
            return acc
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
            pos += 1
        if pos == start:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}")
        name = text[start:pos]
        skip_ws()
        args: list[Term] = []
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                args.append(parse())
                skip_ws()
                if pos < len(text) and text[pos] == ",":
                    pos += 1
                    continue
                if pos < len(text) and text[pos] == ")":
                    pos += 1
                    break
                raise TermSyntaxError("expected ',' or ')' in argument list")
        return Term(name, tuple(args))

    result = parse()
    skip_ws()
    if pos != len(text):
        raise TermSyntaxError("unexpected trailing input")
    return result


# ---------------------------------------------------------------------------
# Inhabitant-tree layouts

def layout(t: Term, table: CombinatorTable) -> VertexLayout:
    """Vertex labelling of the term's binary inhabitant tree."""
    labels: VertexLayout = {}

    def place(term: Term, root: int) -> None:
        n = len(term.args)
        for j in range(n):
            labels[root * (1 << j)] = 0
        labels[root * (1 << n)] = table.index_of(term.combinator)
        for k, arg in enumerate(term.args, start=1):
            spine = root * (1 << (n - k))
            place(arg, 2 * spine + 1)

    place(t, 1)
    return labels


def delayout(v: VertexLayout, table: CombinatorTable) -> Term:
    """Inverse of layout.  The layout must be exactly the vertex set of
    a well-formed tree: applications have both children, combinator
    leaves have none, and no junk vertices remain.
    """
    visited: set[int] = set()

    def walk(vertex: int) -> Term:
        if vertex not in v:
            raise MalformedTreeError(f"vertex {vertex} is missing")
        visited.add(vertex)
        label = v[vertex]
        if label == 0:
            fun = walk(2 * vertex)
            arg = walk(2 * vertex + 1)
            return Term(fun.combinator, fun.args + (arg,))
        try:
            name = table.name_of(label)
        except Exception as exc:
            raise MalformedTreeError(f"vertex {vertex} has unknown label {label}") from exc
        return Term(name)

    term = walk(1)
    if visited != set(v):
        extra = sorted(set(v) - visited)
        raise MalformedTreeError(f"junk vertices outside the tree: {extra}")
    return term


def term_to_dot(t: Term, table: CombinatorTable) -> str:
    """GraphViz rendering of the inhabitant tree; node labels show
    `name:(vertexId,combinatorId)`.
    """
    labels = layout(t, table)
    lines = ["digraph inhabitant {", "  node [shape=box];"]
    for vertex in sorted(labels):
        idx = labels[vertex]
        name = "@" if idx == 0 else table.name_of(idx)
        lines.append(f'  v{vertex} [label="{name}:({vertex},{idx})"];')
    for vertex in sorted(labels):
        for child in (2 * vertex, 2 * vertex + 1):
            if child in labels:
                lines.append(f"  v{vertex} -> v{child};")
    lines.append("}")
    return "\n".join(lines) + "\n"
