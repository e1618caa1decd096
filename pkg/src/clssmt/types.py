"""Intersection types: syntax, parsing, printing, subtyping, decomposition.

The type language has constant atoms (including numerals, which stay
opaque), type variables, covariant constructors, function arrows, and
binary intersections.  Subtyping follows the usual axioms for
intersection type systems: intersections are greatest lower bounds,
arrows are contravariant in the source and covariant in the target, and
arrow intersections distribute over a shared source.  Constant atoms may
additionally be ordered by a user-supplied taxonomy preorder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import SubstitutionError, TypeArityError, TypeSyntaxError


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constructor:
    name: str
    args: tuple[Type, ...]


@dataclass(frozen=True)
class Arrow:
    source: Type
    target: Type


@dataclass(frozen=True)
class Intersection:
    left: Type
    right: Type


Type = Constant | Variable | Constructor | Arrow | Intersection


# ---------------------------------------------------------------------------
# Parsing

_IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _position(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None) -> TypeSyntaxError:
        line, col = self._position(self.pos if pos is None else pos)
        return TypeSyntaxError(message, line, col)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            return ""
        ch = self.text[self.pos]
        if ch == "-" and self.text.startswith("->", self.pos):
            return "->"
        return ch

    def take(self, token: str) -> None:
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CHARS:
            self.pos += 1
        if self.pos == start:
            raise self.error("expected an identifier")
        return self.text[start:self.pos]


def parse_type(text: str, variables: frozenset[str] = frozenset()) -> Type:
    """Parse the concrete syntax: `&` binds tighter than `->`, which is
    right-associative; constructor argument lists bind tightest.

    Identifiers in `variables` become Variable nodes, everything else a
    Constant (or Constructor when followed by an argument list).
    """
    tok = _Tokenizer(text)
    ty = _parse_arrow(tok, variables)
    tok.skip_ws()
    if tok.pos != len(tok.text):
        raise tok.error("unexpected trailing input")
    return ty


def _parse_arrow(tok: _Tokenizer, variables: frozenset[str]) -> Type:
    left = _parse_intersection(tok, variables)
    if tok.peek() == "->":
        tok.take("->")
        return Arrow(left, _parse_arrow(tok, variables))
    return left


def _parse_intersection(tok: _Tokenizer, variables: frozenset[str]) -> Type:
    ty = _parse_atom(tok, variables)
    while tok.peek() == "&":
        tok.take("&")
        ty = Intersection(ty, _parse_atom(tok, variables))
    return ty


def _parse_atom(tok: _Tokenizer, variables: frozenset[str]) -> Type:
    ch = tok.peek()
    if ch == "(":
        tok.take("(")
        inner = _parse_arrow(tok, variables)
        tok.take(")")
        return inner
    name = tok.ident()
    if tok.peek() == "(":
        tok.take("(")
        args = [_parse_arrow(tok, variables)]
        while tok.peek() == ",":
            tok.take(",")
            args.append(_parse_arrow(tok, variables))
        tok.take(")")
        return Constructor(name, tuple(args))
    if name in variables:
        return Variable(name)
    return Constant(name)


# ---------------------------------------------------------------------------
# Printing

def print_type(t: Type) -> str:
    """Render with minimal parentheses, inverse to parse_type."""
    return _print(t, 0)


def _print(t: Type, level: int) -> str:
    # level: 0 = arrow position, 1 = intersection operand, 2 = atom position
    match t:
        case Constant(name) | Variable(name):
            return name
        case Constructor(name, args):
            return f"{name}({','.join(_print(a, 0) for a in args)})"
        case Intersection(left, right):
            text = f"{_print(left, 1)} & {_print(right, 1)}"
            return f"({text})" if level >= 2 else text
        case Arrow(source, target):
            text = f"{_print(source, 1)} -> {_print(target, 0)}"
            return f"({text})" if level >= 1 else text
    raise AssertionError(f"unreachable: {t!r}")


# ---------------------------------------------------------------------------
# Canonical form

def components(t: Type) -> list[Type]:
    """Top-level intersection components, in syntactic order."""
    match t:
        case Intersection(left, right):
            return components(left) + components(right)
        case _:
            return [t]


def canonical(t: Type) -> Type:
    """Flatten intersections, deduplicate, and sort components so that
    syntactic equality of canonical forms coincides with the intended
    multiset view.  The sort key is the printed canonical component.
    """
    match t:
        case Constant(_) | Variable(_):
            return t
        case Constructor(name, args):
            return Constructor(name, tuple(canonical(a) for a in args))
        case Arrow(source, target):
            return Arrow(canonical(source), canonical(target))
        case Intersection(_, _):
            parts: dict[str, Type] = {}
            for comp in components(t):
                c = canonical(comp)
                parts.setdefault(print_type(c), c)
            ordered = [parts[k] for k in sorted(parts)]
            return intersect(ordered)
    raise AssertionError(f"unreachable: {t!r}")


def canonical_text(t: Type) -> str:
    return print_type(canonical(t))


def intersect(parts: list[Type]) -> Type:
    """Left-nested intersection of a non-empty component list."""
    if not parts:
        raise ValueError("cannot intersect an empty list of types")
    acc = parts[0]
    for part in parts[1:]:
        acc = Intersection(acc, part)
    return acc


def variables_of(t: Type) -> frozenset[str]:
    match t:
        case Variable(name):
            return frozenset({name})
        case Constant(_):
            return frozenset()
        case Constructor(_, args):
            return frozenset().union(*(variables_of(a) for a in args)) if args else frozenset()
        case Arrow(source, target):
            return variables_of(source) | variables_of(target)
        case Intersection(left, right):
            return variables_of(left) | variables_of(right)
    raise AssertionError(f"unreachable: {t!r}")


def is_closed(t: Type) -> bool:
    return not variables_of(t)


# ---------------------------------------------------------------------------
# Substitution

def apply_substitution(t: Type, subst: Mapping[str, Type]) -> Type:
    """Replace every variable by its image; unbound variables are an error."""
    match t:
        case Constant(_):
            return t
        case Variable(name):
            if name not in subst:
                raise SubstitutionError(f"variable {name} has no binding")
            return subst[name]
        case Constructor(name, args):
            return Constructor(name, tuple(apply_substitution(a, subst) for a in args))
        case Arrow(source, target):
            return Arrow(apply_substitution(source, subst), apply_substitution(target, subst))
        case Intersection(left, right):
            return Intersection(
                apply_substitution(left, subst), apply_substitution(right, subst)
            )
    raise AssertionError(f"unreachable: {t!r}")


# ---------------------------------------------------------------------------
# Taxonomy and subtyping

@dataclass(frozen=True)
class Taxonomy:
    """Reflexive-transitive closure of user-declared atom orderings."""

    pairs: frozenset[tuple[str, str]] = frozenset()
    _closure: frozenset[tuple[str, str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        closure = set(self.pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(closure):
                for c, d in list(closure):
                    if b == c and (a, d) not in closure:
                        closure.add((a, d))
                        changed = True
        object.__setattr__(self, "_closure", frozenset(closure))

    def leq(self, sub: str, sup: str) -> bool:
        return sub == sup or (sub, sup) in self._closure


EMPTY_TAXONOMY = Taxonomy()


def subtype(a: Type, b: Type, taxonomy: Taxonomy = EMPTY_TAXONOMY) -> bool:
    """Decide a <= b for closed types.

    Syntax-directed: every canonical component of b must be supported by
    a.  Atoms defer to the taxonomy, constructors match covariantly by
    name and arity, and an arrow component src -> tgt holds when the
    arrows of a whose sources dominate src have targets intersecting
    below tgt.  Using all such arrows at once builds the distributivity
    axiom into the check.
    """
    if not is_closed(a) or not is_closed(b):
        raise ValueError("subtype is defined on closed types only")
    return _subtype(a, b, taxonomy)


def _subtype(a: Type, b: Type, taxonomy: Taxonomy) -> bool:
    lhs = components(a)
    return all(_component_supported(lhs, comp, taxonomy) for comp in components(b))


def _component_supported(lhs: list[Type], comp: Type, taxonomy: Taxonomy) -> bool:
    match comp:
        case Constant(name):
            _reject_arity_conflicts(lhs, name, 0)
            return any(
                isinstance(x, Constant) and taxonomy.leq(x.name, name) for x in lhs
            )
        case Constructor(name, args):
            _reject_arity_conflicts(lhs, name, len(args))
            for x in lhs:
                if (
                    isinstance(x, Constructor)
                    and x.name == name
                    and all(_subtype(xa, ca, taxonomy) for xa, ca in zip(x.args, args))
                ):
                    return True
            return False
        case Arrow(source, target):
            chosen = [
                x.target
                for x in lhs
                if isinstance(x, Arrow) and _subtype(source, x.source, taxonomy)
            ]
            if not chosen:
                return False
            return _subtype(intersect(chosen), target, taxonomy)
        case Intersection(_, _):
            return all(
                _component_supported(lhs, part, taxonomy) for part in components(comp)
            )
    raise AssertionError(f"unreachable: {comp!r}")


def _reject_arity_conflicts(lhs: list[Type], name: str, arity: int) -> None:
    for x in lhs:
        other: int | None = None
        if isinstance(x, Constructor) and x.name == name:
            other = len(x.args)
        elif isinstance(x, Constant) and x.name == name:
            other = 0
        if other is not None and other != arity:
            raise TypeArityError(
                f"constructor {name} used with arities {other} and {arity}"
            )


def equivalent(a: Type, b: Type, taxonomy: Taxonomy = EMPTY_TAXONOMY) -> bool:
    return subtype(a, b, taxonomy) and subtype(b, a, taxonomy)


# ---------------------------------------------------------------------------
# Multi-arrow decomposition

@dataclass(frozen=True)
class MultiArrow:
    """A reading of a type as sources -> target with a fixed arity."""

    sources: tuple[Type, ...]
    target: Type


def paths(t: Type, arity: int) -> list[MultiArrow]:
    """All ways to read t, distributing over intersections at every
    level, as a function taking exactly `arity` arguments.
    """
    if arity < 0:
        raise ValueError("arity must be non-negative")
    if arity == 0:
        return [MultiArrow((), comp) for comp in components(t)]
    result: list[MultiArrow] = []
    for comp in components(t):
        if isinstance(comp, Arrow):
            for rest in paths(comp.target, arity - 1):
                result.append(MultiArrow((comp.source,) + rest.sources, rest.target))
    return result


def max_arity(t: Type) -> int:
    """Longest chain of top-level arrows along any intersection path."""
    return max(
        (1 + max_arity(comp.target) for comp in components(t) if isinstance(comp, Arrow)),
        default=0,
    )
