"""Bijective index tables for combinators and nonterminals.

Combinator indices start at 1; index 0 is reserved for application
vertices in inhabitant trees.  Nonterminal indices form an independent
namespace, also starting at 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TableError


@dataclass(frozen=True)
class _IndexTable:
    by_name: dict[str, int]
    _by_index: dict[int, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_index: dict[int, str] = {}
        for name, idx in self.by_name.items():
            if idx in by_index:
                raise TableError(f"index {idx} assigned to both {by_index[idx]} and {name}")
            by_index[idx] = name
        n = len(self.by_name)
        if set(by_index) != set(range(1, n + 1)):
            raise TableError(f"indices must be exactly 1..{n}, got {sorted(by_index)}")
        object.__setattr__(self, "_by_index", by_index)

    def index_of(self, name: str) -> int:
        try:
            return self.by_name[name]
        except KeyError:
            raise TableError(f"unknown name {name!r}") from None

    def name_of(self, index: int) -> str:
        try:
            return self._by_index[index]
        except KeyError:
            raise TableError(f"unknown index {index}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.by_name

    def __len__(self) -> int:
        return len(self.by_name)

    def names(self) -> list[str]:
        return [self._by_index[i] for i in range(1, len(self.by_name) + 1)]


class CombinatorTable(_IndexTable):
    pass


class NonterminalTable(_IndexTable):
    pass
