"""Disjoint-set forest with path halving and union by size."""

from __future__ import annotations

import numpy as np


class UnionFind:
    """Union-find over the integers ``0..n-1``.

    ``parent`` and ``size`` are plain Python lists; element access on lists is
    several times faster than on numpy arrays inside the interpreter loop,
    which dominates sweeps over 10^5 edges.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_components = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> int:
        """Merge the sets of ``x`` and ``y``; return the surviving root."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.n_components -= 1
        return rx

    def labels(self) -> np.ndarray:
        """Component label per element: the minimum element of its component."""
        n = len(self.parent)
        roots = np.fromiter((self.find(i) for i in range(n)), dtype=np.int64, count=n)
        # first occurrence of each root is its minimum member
        _, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
        return first[inverse].astype(np.int64)


def components(n: int, edges) -> np.ndarray:
    """Canonical component labels (minimum member id) of a graph on ``n`` vertices."""
    uf = UnionFind(n)
    for u, v in edges:
        uf.union(int(u), int(v))
    return uf.labels()
