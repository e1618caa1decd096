"""Direct evaluation of structural constraints on terms.

This mirrors the semantics of the SMT compilation in smt.py but works
on the applicative term structure itself, with no solver involved.  It
exists as an independent cross-check: enumerating grammar words and
filtering them here must give the same solution set as the SMT path.
"""

from __future__ import annotations

from .errors import ConstraintError
from .grammar import Term
from .smt import (
    Forbid,
    ForbidCompose,
    LeafArgument,
    NeverApplied,
    Raw,
    StructuralConstraint,
    UseCount,
)


def evaluate(term: Term, constraint: StructuralConstraint) -> bool:
    """True iff the term satisfies the constraint."""
    match constraint:
        case Forbid(combinator):
            return not _occurs(term, combinator)
        case NeverApplied(combinator):
            return all(
                not (sub.combinator == combinator and sub.args)
                for sub in _subterms(term)
            )
        case LeafArgument(combinator, position):
            for sub in _subterms(term):
                if sub.combinator == combinator and len(sub.args) >= position:
                    if sub.args[position - 1].args:
                        return False
            return True
        case ForbidCompose(outer, inner):
            for sub in _subterms(term):
                if sub.combinator == outer and sub.args:
                    first = sub.args[0]
                    if first.combinator == inner and len(first.args) == 1:
                        return False
            return True
        case UseCount(combinator, at_least, at_most):
            uses = sum(sub.combinator == combinator for sub in _subterms(term))
            return uses >= at_least and (at_most is None or uses <= at_most)
        case Raw(_):
            raise ConstraintError("raw constraints cannot be evaluated on terms")
    raise ConstraintError(f"unsupported constraint {constraint!r}")


def satisfies_all(term: Term, constraints) -> bool:
    return all(evaluate(term, c) for c in constraints)


def _subterms(term: Term):
    yield term
    for arg in term.args:
        yield from _subterms(arg)


def _occurs(term: Term, combinator: str) -> bool:
    return any(sub.combinator == combinator for sub in _subterms(term))
