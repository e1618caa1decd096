"""Grammar construction: enumerate all typed applicative terms over a
repository as a regular tree grammar.

For a requested type alpha, a combinator c contributes a rule
alpha -> c(beta_1, ..., beta_n) whenever some substitution instance of
its type can be read as a set P of n-ary function paths whose targets
intersect below alpha; beta_i is then the intersection of the i-th
sources over P.  Only minimal such P are kept: a larger P produces
componentwise more demanding arguments and therefore no new words.
For the same reason, a rule whose argument tuple is componentwise more
demanding than a sibling rule with the same combinator and arity is
dropped.  Both reductions preserve the generated language.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import CoverLimitError, NonterminalLimitError
from .grammar import RuleRhs, TreeGrammar
from .repository import Repository, substitutions
from .types import (
    Arrow,
    MultiArrow,
    Taxonomy,
    Type,
    apply_substitution,
    canonical,
    components,
    intersect,
    max_arity,
    paths,
    print_type,
    subtype,
)

_COVER_COMBINATION_GUARD = 200_000


@dataclass(frozen=True)
class InhabitationRequest:
    repository: Repository
    goal: Type


def inhabit(
    request: InhabitationRequest,
    *,
    max_nonterminals: int = 10_000,
    max_cover_paths: int = 16,
) -> TreeGrammar:
    """Construct the (unpruned) tree grammar of all inhabitants of the
    goal type.  Nonterminals are canonical type texts; the result is
    deterministic in the repository declaration order.

    max_nonterminals caps the worklist to guard against runaway
    intersection generation; max_cover_paths bounds the exponential
    search over arrow-typed path combinations.
    """
    repo = request.repository
    tax = repo.taxonomy
    goal = canonical(request.goal)

    rules: dict[str, tuple[RuleRhs, ...]] = {}
    types_by_id: dict[str, Type] = {}
    queue: deque[Type] = deque([goal])

    # substitution instances never change per combinator; compute once
    instances: list[tuple[str, list[Type]]] = []
    for comb in repo.combinators:
        subs = substitutions(repo, comb.name)
        instances.append(
            (comb.name, [canonical(apply_substitution(comb.type, s)) for s in subs])
        )

    while queue:
        target = queue.popleft()
        target_id = print_type(target)
        if target_id in rules:
            continue
        if len(rules) >= max_nonterminals:
            raise NonterminalLimitError(
                f"more than {max_nonterminals} nonterminals requested"
            )

        candidates: list[tuple[str, tuple[Type, ...]]] = []
        for name, sigmas in instances:
            for sigma in sigmas:
                for arity in range(max_arity(sigma) + 1):
                    multi = paths(sigma, arity)
                    if not multi:
                        continue
                    for cover in _minimal_covers(multi, target, tax, max_cover_paths):
                        args = tuple(
                            canonical(intersect([multi[i].sources[k] for i in cover]))
                            for k in range(arity)
                        )
                        candidates.append((name, args))

        kept = _drop_subsumed(candidates, tax)
        alternatives: list[RuleRhs] = []
        for name, args in kept:
            arg_ids = tuple(print_type(a) for a in args)
            rhs = RuleRhs(name, arg_ids)
            if rhs not in alternatives:
                alternatives.append(rhs)
                for arg in args:
                    arg_id = print_type(arg)
                    if arg_id not in rules and arg_id not in types_by_id:
                        queue.append(arg)
                    types_by_id.setdefault(arg_id, arg)

        rules[target_id] = tuple(alternatives)
        types_by_id.setdefault(target_id, target)

    display = {nt: nt for nt in rules}
    return TreeGrammar(start=print_type(goal), rules=rules, display=display)


def _minimal_covers(
    multi: list[MultiArrow], target: Type, tax: Taxonomy, max_cover_paths: int
) -> list[tuple[int, ...]]:
    """Minimal sets of path indices whose targets intersect below every
    component of the target type, ordered by size then index.
    """
    witness_lists: list[list[frozenset[int]]] = []
    for comp in components(target):
        if isinstance(comp, Arrow):
            witnesses = _arrow_witnesses(multi, comp, tax, max_cover_paths)
        else:
            witnesses = [
                frozenset({i})
                for i, p in enumerate(multi)
                if subtype(p.target, comp, tax)
            ]
        if not witnesses:
            return []
        witness_lists.append(witnesses)

    combinations = 1
    for witnesses in witness_lists:
        combinations *= len(witnesses)
        if combinations > _COVER_COMBINATION_GUARD:
            raise CoverLimitError(
                f"cover search exceeds {_COVER_COMBINATION_GUARD} combinations"
            )

    unions = {frozenset().union(*combo) for combo in itertools.product(*witness_lists)}
    minimal = [
        u for u in unions if not any(other < u for other in unions)
    ]
    return sorted((tuple(sorted(u)) for u in minimal), key=lambda t: (len(t), t))


def _arrow_witnesses(
    multi: list[MultiArrow], comp: Arrow, tax: Taxonomy, max_cover_paths: int
) -> list[frozenset[int]]:
    """Minimal index sets supporting an arrow component; distributivity
    means several paths may have to pool their targets.
    """
    candidates = [
        i
        for i, p in enumerate(multi)
        if any(isinstance(c, Arrow) for c in components(p.target))
    ]
    if len(candidates) > max_cover_paths:
        raise CoverLimitError(
            f"{len(candidates)} arrow-typed paths exceed the cap of {max_cover_paths}"
        )
    qualifying: list[frozenset[int]] = []
    for size in range(1, len(candidates) + 1):
        for subset in itertools.combinations(candidates, size):
            chosen = frozenset(subset)
            if any(q <= chosen for q in qualifying):
                continue
            joined = intersect([multi[i].target for i in subset])
            if subtype(joined, comp, tax):
                qualifying.append(chosen)
    return qualifying


def _drop_subsumed(
    candidates: list[tuple[str, tuple[Type, ...]]], tax: Taxonomy
) -> list[tuple[str, tuple[Type, ...]]]:
    """Remove rules strictly dominated by a more general sibling with
    the same combinator and arity.  beta <= beta' componentwise means
    every word of the dominated rule is a word of the dominating one.
    """
    texts = [
        (name, args, tuple(print_type(a) for a in args)) for name, args in candidates
    ]
    kept: list[tuple[str, tuple[Type, ...]]] = []
    for i, (name, args, arg_texts) in enumerate(texts):
        dominated = False
        for j, (other_name, other_args, other_texts) in enumerate(texts):
            if i == j or name != other_name or len(args) != len(other_args):
                continue
            if arg_texts == other_texts:
                # syntactic duplicate: keep only the first occurrence
                dominated = j < i
                if dominated:
                    break
                continue
            forward = all(subtype(a, b, tax) for a, b in zip(args, other_args))
            backward = all(subtype(b, a, tax) for a, b in zip(args, other_args))
            if forward and not backward:
                dominated = True
                break
        if not dominated:
            kept.append((name, args))
    return kept


def verify_grammar(repo: Repository, g: TreeGrammar, goal: Type | None = None) -> None:
    """Independent soundness check: every rule must be justified by some
    substitution instance and path subset.  Raises AssertionError on the
    first unjustified rule.  Intended for tests and small grammars (the
    subset search is exhaustive).
    """
    tax = repo.taxonomy
    parsed: dict[str, Type] = {}
    from .types import parse_type

    def type_of(nt: str) -> Type:
        if nt not in parsed:
            parsed[nt] = canonical(parse_type(nt))
        return parsed[nt]

    for nt, alternatives in g.rules.items():
        target = type_of(nt)
        for rhs in alternatives:
            comb = repo.combinator(rhs.combinator)
            arity = len(rhs.args)
            justified = False
            for s in substitutions(repo, rhs.combinator):
                sigma = canonical(apply_substitution(comb.type, s))
                multi = paths(sigma, arity)
                for size in range(1, len(multi) + 1):
                    for subset in itertools.combinations(range(len(multi)), size):
                        joined = intersect([multi[i].target for i in subset])
                        if not subtype(joined, target, tax):
                            continue
                        args = tuple(
                            print_type(
                                canonical(
                                    intersect([multi[i].sources[k] for i in subset])
                                )
                            )
                            for k in range(arity)
                        )
                        if args == rhs.args:
                            justified = True
                            break
                    if justified:
                        break
                if justified:
                    break
            assert justified, f"rule {nt} -> {rhs} has no typing justification"
