"""Recursive trees stored as parent vectors.

A recursive tree on nodes ``1..m`` is encoded by the tuple
``(p_2, ..., p_m)`` where ``p_i`` is the parent of node ``i`` and
``1 <= p_i < i``.  The stratum number of a tree is ``m - 1``; stratum ``k``
holds exactly ``k!`` trees.

Trees in a stratum are ranked lexicographically by parent vector.  Because
the digit ``p_i - 1`` ranges over ``i - 1`` values, the 0-based rank is a
mixed-radix number, which gives two handy facts used throughout:

* attaching node ``m + 1`` under parent ``c`` maps rank ``r`` to
  ``r * m + (c - 1)``;
* removing the highest label maps rank ``r`` to ``r // (m - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

DEFAULT_STRATUM_CAP = 8


class StratumCapError(MemoryError):
    """Raised when a request would enumerate a stratum above the cap."""


@dataclass(frozen=True)
class RecursiveTree:
    parents: tuple[int, ...] = ()

    def __post_init__(self):
        parents = tuple(int(x) for x in self.parents)
        for i, par in enumerate(parents, start=2):
            if not 1 <= par < i:
                raise ValueError(f"node {i} has parent {par}; need 1 <= parent < {i}")
        object.__setattr__(self, "parents", parents)

    @classmethod
    def single(cls) -> RecursiveTree:
        return cls(())

    @property
    def size(self) -> int:
        return len(self.parents) + 1

    def parent(self, node: int) -> int:
        if node < 2 or node > self.size:
            raise IndexError(f"node {node} has no parent in a tree of size {self.size}")
        return self.parents[node - 2]

    def child_counts(self) -> list[int]:
        """Number of children per node, indexed by label (slot 0 unused)."""
        counts = [0] * (self.size + 1)
        for par in self.parents:
            counts[par] += 1
        return counts

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v: [] for v in range(1, self.size + 1)}
        for i, par in enumerate(self.parents, start=2):
            out[par].append(i)
        return out

    def attach(self, parent: int) -> RecursiveTree:
        """Return the tree with a new highest-labelled node under ``parent``."""
        if not 1 <= parent <= self.size:
            raise ValueError(f"parent {parent} not in 1..{self.size}")
        return RecursiveTree(self.parents + (parent,))

    def __repr__(self):
        return f"RecursiveTree({list(self.parents)})"


class TreeIndex(NamedTuple):
    k: int
    idx: int


def stratum_number(t: RecursiveTree) -> int:
    return t.size - 1


def leaf_count(t: RecursiveTree) -> int:
    """Nodes without children; a lone root counts as one leaf."""
    counts = t.child_counts()
    return sum(1 for v in range(1, t.size + 1) if counts[v] == 0)


def root_degree(t: RecursiveTree) -> int:
    return sum(1 for par in t.parents if par == 1)


def canonical_rank(parents: tuple[int, ...] | list[int]) -> int:
    """0-based lexicographic rank of a parent vector within its stratum."""
    rank = 0
    for i, par in enumerate(parents, start=2):
        rank = rank * (i - 1) + (par - 1)
    return rank


def canonical_index(t: RecursiveTree) -> TreeIndex:
    return TreeIndex(stratum_number(t), canonical_rank(t.parents) + 1)


def tree_from_rank(k: int, rank: int) -> RecursiveTree:
    digits = []
    for radix in range(k, 0, -1):
        rank, d = divmod(rank, radix)
        digits.append(d + 1)
    return RecursiveTree(tuple(reversed(digits)))


def tree_from_index(ix: TreeIndex | tuple[int, int]) -> RecursiveTree:
    k, idx = ix
    if k < 0:
        raise ValueError(f"stratum number must be >= 0, got {k}")
    if not 1 <= idx <= math.factorial(k):
        raise ValueError(f"index {idx} outside 1..{math.factorial(k)} for stratum {k}")
    return tree_from_rank(k, idx - 1)


def _check_cap(k: int, cap: int) -> None:
    if k < 0:
        raise ValueError(f"stratum number must be >= 0, got {k}")
    if k > cap:
        raise StratumCapError(f"stratum {k} exceeds cap {cap} ({math.factorial(k)} trees)")


def iter_stratum(k: int, cap: int = DEFAULT_STRATUM_CAP) -> Iterator[RecursiveTree]:
    _check_cap(k, cap)
    level = [()]
    for i in range(2, k + 2):
        level = [pv + (c,) for pv in level for c in range(1, i)]
    for pv in level:
        yield RecursiveTree(pv)


def enumerate_stratum(k: int, cap: int = DEFAULT_STRATUM_CAP) -> list[RecursiveTree]:
    """All ``k!`` trees of stratum ``k`` in canonical order."""
    return list(iter_stratum(k, cap))
