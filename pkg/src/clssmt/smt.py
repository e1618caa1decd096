"""Translation of tree grammars and structural constraints into SMT-LIB
scripts over two uninterpreted functions:

    inhabitant : Int -> Int   vertex label (0 = application, else combinator)
    ty         : Int -> Int   nonterminal demanded at a subtree root

Vertices are heap addresses (root 1, leftChild i = 2i, rightChild i =
2i+1).  A production rule becomes an ite that, wherever ty demands the
rule's nonterminal, forces one of the translated alternatives.  Distinct
alternatives always disagree on a shared address, so the emitted n-ary
xor behaves as exactly-one.

Two emission modes: Quantified wraps every rule in (forall ((i Int)) ...);
Finitized(depth) expands rules at concrete subtree root addresses, yielding
a quantifier-free script suitable for model enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConstraintError, GrammarFormatError, TableError
from .grammar import RuleRhs, TreeGrammar, first_appearance_order, nonterminal_order
from .tables import CombinatorTable, NonterminalTable


@dataclass(frozen=True)
class Quantified:
    pass


@dataclass(frozen=True)
class Finitized:
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("finitization depth must be >= 1")


Mode = Quantified | Finitized


@dataclass(frozen=True)
class Forbid:
    combinator: str


@dataclass(frozen=True)
class NeverApplied:
    combinator: str


@dataclass(frozen=True)
class LeafArgument:
    combinator: str
    position: int

    def __post_init__(self) -> None:
        if self.position < 1:
            raise ValueError("argument position is 1-based")


@dataclass(frozen=True)
class ForbidCompose:
    outer: str
    inner: str


@dataclass(frozen=True)
class UseCount:
    combinator: str
    at_least: int
    at_most: int | None  # None = unbounded

    def __post_init__(self) -> None:
        if self.at_least < 0:
            raise ValueError("use-count lower bound must be a natural number")
        if self.at_most is not None and self.at_most < self.at_least:
            raise ValueError("use-count bounds must satisfy min <= max")


@dataclass(frozen=True)
class Raw:
    smt_text: str


StructuralConstraint = Forbid | NeverApplied | LeafArgument | ForbidCompose | UseCount | Raw


@dataclass(frozen=True)
class SmtScript:
    declarations: tuple[str, ...]
    definitions: tuple[str, ...]
    assertions: tuple[str, ...]
    mode: Mode
    combinators: CombinatorTable
    nonterminals: NonterminalTable
    goal_id: int
    vertices: tuple[int, ...] = ()  # model extraction set in Finitized mode

    def text(self) -> str:
        lines = list(self.declarations) + list(self.definitions)
        lines += list(self.assertions)
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"

    @property
    def depth(self) -> int | None:
        return self.mode.depth if isinstance(self.mode, Finitized) else None


def assign_tables(
    g: TreeGrammar,
    overrides: dict[str, int] | None = None,
    nonterminal_overrides: dict[str, int] | None = None,
) -> tuple[CombinatorTable, NonterminalTable]:
    """Index combinators and nonterminals for SMT emission.  Defaults
    follow first appearance in the grammar; overrides pin individual
    names and the remaining names fill the smallest free indices.
    """
    combinators = _fill(first_appearance_order(g), overrides or {}, "combinator")
    nonterminals = _fill(
        nonterminal_order(g), nonterminal_overrides or {}, "nonterminal"
    )
    return CombinatorTable(combinators), NonterminalTable(nonterminals)


def _fill(order: list[str], overrides: dict[str, int], kind: str) -> dict[str, int]:
    for name in overrides:
        if name not in order:
            raise TableError(f"override names unknown {kind} {name!r}")
    if len(set(overrides.values())) != len(overrides):
        raise TableError(f"{kind} override indices collide")
    assigned = dict(overrides)
    free = (i for i in range(1, len(order) + 1) if i not in set(overrides.values()))
    for name in order:
        if name not in assigned:
            assigned[name] = next(free)
    if sorted(assigned.values()) != list(range(1, len(order) + 1)):
        raise TableError(f"{kind} indices not contiguous from 1 after fill")
    return assigned


def translate_combinator(
    combinator: str,
    args: tuple[str, ...] | list[str],
    tables: tuple[CombinatorTable, NonterminalTable],
    vertex: str = "i",
) -> str:
    """Emit the conjunction describing one alternative rooted at vertex.
    Arguments are consumed in reverse so the address term can descend
    the application spine by repeated leftChild steps.
    """
    combinator_table, nonterminal_table = tables
    constraints: list[str] = []
    address = vertex
    for nt in reversed(list(args)):
        constraints.append(f"(= (ty (rightChild {address})) {nonterminal_table.index_of(nt)})")
        constraints.append(f"(= (inhabitant {address}) 0)")
        address = f"(leftChild {address})"
    head = f"(= (inhabitant {address}) {combinator_table.index_of(combinator)})"
    if not constraints:
        return head
    return "(and " + " ".join([head] + list(reversed(constraints))) + ")"


def translate_production_rule(
    nt: str,
    alternatives: tuple[RuleRhs, ...] | list[RuleRhs],
    tables: tuple[CombinatorTable, NonterminalTable],
    vertex: str = "i",
    exactly_one: bool = False,
) -> str:
    if not alternatives:
        raise GrammarFormatError(f"nonterminal {nt!r} has no alternatives")
    _, nonterminal_table = tables
    exprs = [
        translate_combinator(rhs.combinator, rhs.args, tables, vertex)
        for rhs in alternatives
    ]
    body = _one_of(exprs, exactly_one)
    return f"(ite (= (ty {vertex}) {nonterminal_table.index_of(nt)}) {body} true)"


def _one_of(exprs: list[str], exactly_one: bool) -> str:
    if len(exprs) == 1:
        return exprs[0]
    if not exactly_one:
        return "(xor " + " ".join(exprs) + ")"
    pairs = [
        f"(not (and {exprs[i]} {exprs[j]}))"
        for i in range(len(exprs))
        for j in range(i + 1, len(exprs))
    ]
    return "(and (or " + " ".join(exprs) + ") " + " ".join(pairs) + ")"


def translate_grammar(
    g: TreeGrammar,
    goal: str,
    tables: tuple[CombinatorTable, NonterminalTable],
    mode: Mode,
    constraints: tuple[StructuralConstraint, ...] | list[StructuralConstraint] = (),
    exactly_one: bool = False,
) -> SmtScript:
    """Emit the full script: child-function definitions, rule assertions,
    the root constraint (ty 1) = goal, and compiled structural
    constraints.  An empty language yields an explicitly unsatisfiable
    script.
    """
    combinator_table, nonterminal_table = tables
    quantified = isinstance(mode, Quantified)
    declarations = (
        "(set-option :produce-models true)",
        f"(set-logic {'UFLIA' if quantified else 'QF_UFLIA'})",
        "(declare-fun inhabitant (Int) Int)",
        "(declare-fun ty (Int) Int)",
    )
    definitions = (
        "(define-fun leftChild ((i Int)) Int (* 2 i))",
        "(define-fun rightChild ((i Int)) Int (+ (* 2 i) 1))",
    )

    if g.rules and goal not in g.rules:
        raise GrammarFormatError(f"goal nonterminal {goal!r} not in grammar")
    if not g.rules or not g.rules[goal]:
        assertions = (
            "; no rule derives the goal nonterminal",
            "(assert false)",
        )
        return SmtScript(
            declarations, definitions, assertions, mode,
            combinator_table, nonterminal_table,
            goal_id=nonterminal_table.index_of(goal) if goal in nonterminal_table else 0,
        )

    goal_id = nonterminal_table.index_of(goal)
    assertions: list[str] = []
    if quantified:
        for nt, alternatives in g.rules.items():
            rule = _rule_body(nt, alternatives, tables, "i", exactly_one)
            assertions.append(f"(assert (forall ((i Int)) {rule}))")
        assertions.append(f"(assert (= (ty 1) {goal_id}))")
        for c in constraints:
            assertions.append(compile_constraint(c, tables))
        return SmtScript(
            declarations, definitions, tuple(assertions), mode,
            combinator_table, nonterminal_table, goal_id,
        )

    points, vertices = _finitized_vertices(g, mode.depth)
    reference_bound = 2 ** (mode.depth + 2) - 1
    for nt, alternatives in g.rules.items():
        for p in points:
            if _max_reference(p, alternatives) > reference_bound:
                continue
            rule = _rule_body(nt, alternatives, tables, str(p), exactly_one)
            assertions.append(f"(assert {rule})")
    assertions.append(f"(assert (= (ty 1) {goal_id}))")
    n = len(combinator_table)
    for v in vertices:
        assertions.append(
            f"(assert (and (<= 0 (inhabitant {v})) (<= (inhabitant {v}) {n})))"
        )
    for c in constraints:
        assertions.extend(_compile_finitized(c, tables, vertices))
    return SmtScript(
        declarations, definitions, tuple(assertions), mode,
        combinator_table, nonterminal_table, goal_id, vertices,
    )


def _rule_body(
    nt: str,
    alternatives: tuple[RuleRhs, ...],
    tables: tuple[CombinatorTable, NonterminalTable],
    vertex: str,
    exactly_one: bool,
) -> str:
    _, nonterminal_table = tables
    if not alternatives:
        # dead nonterminal in an unpruned grammar: forbid demanding it
        return f"(ite (= (ty {vertex}) {nonterminal_table.index_of(nt)}) false true)"
    return translate_production_rule(nt, alternatives, tables, vertex, exactly_one)


def _finitized_vertices(
    g: TreeGrammar, depth: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Subtree root addresses (rule instantiation points) and the full
    set of addresses any instantiated rule can reference.  Roots are the
    root vertex plus argument positions reachable within the address
    space of a depth-bounded tree; unconstrained deeper vertices are
    handled by the enumeration loop's decode checks.
    """
    max_arity = max(
        (len(rhs.args) for alts in g.rules.values() for rhs in alts), default=0
    )
    point_bound = 2 ** (depth + 1) - 1
    reference_bound = 2 ** (depth + 2) - 1
    points: list[int] = []
    seen = {1}
    queue = [1]
    while queue:
        p = queue.pop(0)
        points.append(p)
        for j in range(1, max_arity + 1):
            q = p * 2**j + 1
            if q <= point_bound and q not in seen:
                seen.add(q)
                queue.append(q)
    points.sort()

    referenced: set[int] = set(points)
    arities = {len(rhs.args) for alts in g.rules.values() for rhs in alts}
    for p in points:
        for n in arities:
            if p * 2**n + (1 if n else 0) > reference_bound:
                continue
            for k in range(n + 1):
                referenced.add(p * 2**k)  # spine, ending at the leaf
            for j in range(1, n + 1):
                referenced.add(p * 2**j + 1)  # argument positions
    return tuple(points), tuple(sorted(referenced))


def _max_reference(p: int, alternatives: tuple[RuleRhs, ...]) -> int:
    worst = p
    for rhs in alternatives:
        n = len(rhs.args)
        worst = max(worst, p * 2**n + (1 if n else 0))
    return worst


def compile_constraint(
    c: StructuralConstraint,
    tables: tuple[CombinatorTable, NonterminalTable],
) -> str:
    """Quantified form of a structural constraint as a complete assert
    command.  UseCount needs a finite vertex set and is rejected here.
    """
    if isinstance(c, UseCount):
        raise ConstraintError("use-count requires finitized mode")
    if isinstance(c, Raw):
        text = c.smt_text.strip()
        return text if text.startswith("(assert") else f"(assert {text})"
    body = _constraint_body(c, tables, "i")
    return f"(assert (forall ((i Int)) {body}))"


def _compile_finitized(
    c: StructuralConstraint,
    tables: tuple[CombinatorTable, NonterminalTable],
    vertices: tuple[int, ...],
) -> list[str]:
    if isinstance(c, Raw):
        text = c.smt_text.strip()
        return [text if text.startswith("(assert") else f"(assert {text})"]
    combinator_table, _ = tables
    if isinstance(c, UseCount):
        idx = combinator_table.index_of(c.combinator)
        terms = " ".join(
            f"(ite (= (inhabitant {v}) {idx}) 1 0)" for v in vertices
        )
        count = f"(+ {terms})" if len(vertices) > 1 else terms
        out = []
        if c.at_least > 0:
            out.append(f"(assert (>= {count} {c.at_least}))")
        if c.at_most is not None:
            out.append(f"(assert (<= {count} {c.at_most}))")
        return out
    return [f"(assert {_constraint_body(c, tables, str(v))})" for v in vertices]


def _constraint_body(
    c: StructuralConstraint,
    tables: tuple[CombinatorTable, NonterminalTable],
    vertex: str,
) -> str:
    combinator_table, _ = tables
    match c:
        case Forbid(combinator):
            idx = combinator_table.index_of(combinator)
            return f"(not (= (inhabitant {vertex}) {idx}))"
        case NeverApplied(combinator):
            idx = combinator_table.index_of(combinator)
            return f"(not (= (inhabitant (leftChild {vertex})) {idx}))"
        case LeafArgument(combinator, position):
            idx = combinator_table.index_of(combinator)
            leaf = vertex
            for _ in range(position):
                leaf = f"(leftChild {leaf})"
            return (
                f"(ite (= (inhabitant {leaf}) {idx}) "
                f"(not (= (inhabitant (rightChild {vertex})) 0)) true)"
            )
        case ForbidCompose(outer, inner):
            o = combinator_table.index_of(outer)
            n = combinator_table.index_of(inner)
            return (
                f"(not (and (= (inhabitant (leftChild {vertex})) {o}) "
                f"(= (inhabitant (leftChild (rightChild {vertex}))) {n})))"
            )
    raise ConstraintError(f"unsupported constraint {c!r}")


def parse_constraints(text: str) -> list[StructuralConstraint]:
    """Parse the line-based constraint format: directives forbid,
    never-applied, leaf-arg, forbid-compose, use-count, raw; comments
    start with '#'.
    """
    out: list[StructuralConstraint] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            out.append(_parse_directive(directive, rest))
        except ConstraintError as exc:
            raise ConstraintError(f"line {lineno}: {exc}") from None
    return out


def _parse_directive(directive: str, rest: str) -> StructuralConstraint:
    words = rest.split()
    match directive:
        case "forbid" if len(words) == 1:
            return Forbid(words[0])
        case "never-applied" if len(words) == 1:
            return NeverApplied(words[0])
        case "leaf-arg" if len(words) == 2 and words[1].isdigit() and int(words[1]) >= 1:
            return LeafArgument(words[0], int(words[1]))
        case "forbid-compose" if len(words) == 2:
            return ForbidCompose(words[0], words[1])
        case "use-count" if len(words) == 3:
            c, lo, hi = words
            if not lo.isdigit() or not (hi.isdigit() or hi == "inf"):
                raise ConstraintError(f"bad use-count bounds {rest!r}")
            bound = None if hi == "inf" else int(hi)
            if bound is not None and bound < int(lo):
                raise ConstraintError("use-count bounds must satisfy min <= max")
            return UseCount(c, int(lo), bound)
        case "raw" if rest:
            return Raw(rest)
    raise ConstraintError(f"unrecognized directive {directive!r} {rest!r}".strip())
