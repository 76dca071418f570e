"""Union-find over hashable keys; the backbone of every clustering stage."""

from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Iterable


class UnionFind:
    """Disjoint sets with path compression and union by size.

    The final partition depends only on the set of union calls, never on
    their order, which is what makes the pipeline's parallel and shuffled
    processing modes equivalent to the sequential reference.
    """

    def __init__(self, keys: Iterable[Hashable] = ()) -> None:
        self._parent: dict[Hashable, Hashable] = {}
        self._size: dict[Hashable, int] = {}
        for key in keys:
            self.add(key)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    def add(self, key: Hashable) -> None:
        if key not in self._parent:
            self._parent[key] = key
            self._size[key] = 1

    def find(self, key: Hashable) -> Hashable:
        self.add(key)
        root = key
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[key] != root:
            self._parent[key], key = root, self._parent[key]
        return root

    def union(self, a: Hashable, b: Hashable) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def connected(self, a: Hashable, b: Hashable) -> bool:
        return self.find(a) == self.find(b)

    def groups(self) -> dict[Hashable, list[Hashable]]:
        """Root -> members; member lists are in insertion order."""
        out: dict[Hashable, list[Hashable]] = defaultdict(list)
        for key in self._parent:
            out[self.find(key)].append(key)
        return dict(out)

    def n_groups(self) -> int:
        return sum(1 for key, parent in self._parent.items() if key == parent)
