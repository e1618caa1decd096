"""Combinator repositories: named combinators with intersection types,
finite kinds for type variables, and an atom taxonomy.

File format, one declaration per line (`#` starts a comment):

    var alpha in { double, List(double) }
    subtype int <: double
    sortmap : (alpha -> alpha) -> List(alpha) -> SortedList(alpha)
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import RepositoryError
from .types import (
    Arrow,
    Constant,
    Constructor,
    Intersection,
    Taxonomy,
    Type,
    Variable,
    apply_substitution,
    components,
    is_closed,
    max_arity,
    parse_type,
    print_type,
    variables_of,
)


@dataclass(frozen=True)
class Combinator:
    name: str
    type: Type


@dataclass(frozen=True)
class Diagnostic:
    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class CombinatorArity:
    name: str
    max_arity: int


@dataclass(frozen=True)
class Repository:
    combinators: tuple[Combinator, ...]
    variable_kinds: tuple[tuple[str, tuple[Type, ...]], ...] = ()
    taxonomy: Taxonomy = field(default_factory=Taxonomy)

    def kind_of(self, variable: str) -> tuple[Type, ...]:
        for name, kinds in self.variable_kinds:
            if name == variable:
                return kinds
        raise RepositoryError(f"variable {variable} has no declared kind")

    def combinator(self, name: str) -> Combinator:
        for comb in self.combinators:
            if comb.name == name:
                return comb
        raise RepositoryError(f"unknown combinator {name}")

    def variable_names(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.variable_kinds)


# ---------------------------------------------------------------------------
# Parsing and printing

_VAR_LINE = re.compile(r"^var\s+(\w+)\s+in\s*\{(.*)\}\s*$")
_SUBTYPE_LINE = re.compile(r"^subtype\s+(\w+)\s*<:\s*(\w+)\s*$")
_COMBINATOR_LINE = re.compile(r"^([^:]+?)\s*:\s*(.+)$")


def parse_repository(text: str) -> Repository:
    """Parse the line-based repository format.

    Variable kind declarations may appear anywhere; combinator types may
    reference any declared variable.  Duplicate combinator or variable
    names and unparsable lines are errors.
    """
    stripped: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            stripped.append((lineno, line))

    kinds: dict[str, tuple[Type, ...]] = {}
    taxonomy_pairs: set[tuple[str, str]] = set()
    for lineno, line in stripped:
        if m := _VAR_LINE.match(line):
            name, members = m.group(1), m.group(2)
            if name in kinds:
                raise RepositoryError(f"line {lineno}: duplicate variable {name}")
            try:
                parsed = tuple(
                    parse_type(part) for part in _split_kind_members(members)
                )
            except Exception as exc:
                raise RepositoryError(f"line {lineno}: {exc}") from exc
            if not parsed:
                raise RepositoryError(f"line {lineno}: empty kind for {name}")
            kinds[name] = parsed
        elif m := _SUBTYPE_LINE.match(line):
            taxonomy_pairs.add((m.group(1), m.group(2)))

    variables = frozenset(kinds)
    combinators: list[Combinator] = []
    seen: set[str] = set()
    for lineno, line in stripped:
        if _VAR_LINE.match(line) or _SUBTYPE_LINE.match(line):
            continue
        m = _COMBINATOR_LINE.match(line)
        if not m:
            raise RepositoryError(f"line {lineno}: cannot parse declaration: {line}")
        name = m.group(1).strip()
        if not re.fullmatch(r"\w+", name):
            raise RepositoryError(f"line {lineno}: bad combinator name {name!r}")
        if name in seen:
            raise RepositoryError(f"line {lineno}: duplicate combinator {name}")
        seen.add(name)
        try:
            ty = parse_type(m.group(2), variables)
        except Exception as exc:
            raise RepositoryError(f"line {lineno}: {exc}") from exc
        undeclared = variables_of(ty) - variables
        if undeclared:
            raise RepositoryError(
                f"line {lineno}: undeclared variable {sorted(undeclared)[0]}"
            )
        combinators.append(Combinator(name, ty))

    return Repository(
        combinators=tuple(combinators),
        variable_kinds=tuple(kinds.items()),
        taxonomy=Taxonomy(frozenset(taxonomy_pairs)),
    )


def _split_kind_members(text: str) -> list[str]:
    """Split a kind member list on commas that sit at paren depth zero."""
    members: list[str] = []
    depth = 0
    current = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            members.append(current)
            current = ""
        else:
            current += ch
    if current.strip():
        members.append(current)
    return [m for m in (m.strip() for m in members) if m]


def print_repository(repo: Repository) -> str:
    lines: list[str] = []
    for name, members in repo.variable_kinds:
        lines.append(f"var {name} in {{ {', '.join(print_type(t) for t in members)} }}")
    for sub, sup in sorted(repo.taxonomy.pairs):
        lines.append(f"subtype {sub} <: {sup}")
    for comb in repo.combinators:
        lines.append(f"{comb.name} : {print_type(comb.type)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation

def validate(repo: Repository) -> list[Diagnostic]:
    """Collect structural problems without raising: duplicate names,
    unbound or open kinds, and constructor arity conflicts across the
    whole repository.
    """
    diagnostics: list[Diagnostic] = []

    seen: set[str] = set()
    for comb in repo.combinators:
        if comb.name in seen:
            diagnostics.append(
                Diagnostic("duplicate-name", comb.name, f"combinator {comb.name} declared twice")
            )
        seen.add(comb.name)

    declared = repo.variable_names()
    for comb in repo.combinators:
        for var in sorted(variables_of(comb.type) - declared):
            diagnostics.append(
                Diagnostic(
                    "unbound-variable-kind",
                    var,
                    f"variable {var} in {comb.name} has no kind declaration",
                )
            )

    for name, members in repo.variable_kinds:
        for member in members:
            if not is_closed(member):
                diagnostics.append(
                    Diagnostic(
                        "open-kind",
                        name,
                        f"kind member {print_type(member)} of {name} is not closed",
                    )
                )

    arities: dict[str, int] = {}
    def scan(t: Type, owner: str) -> None:
        match t:
            case Constant(name):
                _record(name, 0, owner)
            case Variable(_):
                pass
            case Constructor(name, args):
                _record(name, len(args), owner)
                for a in args:
                    scan(a, owner)
            case Arrow(source, target):
                scan(source, owner)
                scan(target, owner)
            case Intersection(left, right):
                scan(left, owner)
                scan(right, owner)

    def _record(name: str, arity: int, owner: str) -> None:
        if name in arities and arities[name] != arity:
            diagnostics.append(
                Diagnostic(
                    "constructor-arity",
                    name,
                    f"{name} used with arities {arities[name]} and {arity} (seen in {owner})",
                )
            )
        arities.setdefault(name, arity)

    for comb in repo.combinators:
        scan(comb.type, comb.name)
    for name, members in repo.variable_kinds:
        for member in members:
            scan(member, f"kind of {name}")

    return diagnostics


# ---------------------------------------------------------------------------
# Substitution space

def substitutions(repo: Repository, combinator: str) -> list[dict[str, Type]]:
    """Cartesian product of kind sets over the variables that occur in
    the combinator's type, in declaration order of the kinds.
    """
    comb = repo.combinator(combinator)
    occurring = variables_of(comb.type)
    names = [name for name, _ in repo.variable_kinds if name in occurring]
    missing = occurring - set(names)
    if missing:
        raise RepositoryError(
            f"variable {sorted(missing)[0]} in {combinator} has no kind declaration"
        )
    if not names:
        return [{}]
    pools = [repo.kind_of(name) for name in names]
    return [dict(zip(names, combo)) for combo in itertools.product(*pools)]


def combinator_arities(repo: Repository) -> list[CombinatorArity]:
    """Maximum applied arity of each combinator over its substitutions."""
    result = []
    for comb in repo.combinators:
        arity = max(
            max_arity(apply_substitution(comb.type, s))
            for s in substitutions(repo, comb.name)
        )
        result.append(CombinatorArity(comb.name, arity))
    return result
