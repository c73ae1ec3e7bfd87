"""Finite permutation groups and their actions on finite point sets.

Group elements are permutation tuples of a faithful representation of the
group; an action is a homomorphism into the permutations of a point set,
given on generators and extended by breadth-first closure.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

Perm = tuple


def compose(a: Perm, b: Perm) -> Perm:
    """The permutation ``x -> a[b[x]]``."""
    return tuple(a[i] for i in b)


def inverse(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, j in enumerate(a):
        inv[j] = i
    return tuple(inv)


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_permutation(a: Sequence[int], n: int | None = None) -> bool:
    n = len(a) if n is None else n
    return len(a) == n and sorted(a) == list(range(n))


class FiniteGroup:
    """Group generated by permutations of ``range(degree)``.

    Elements are enumerated in breadth-first order from the identity, trying
    generators in the order given, so element order is reproducible.
    """

    def __init__(self, generators: Sequence[Sequence[int]]):
        gens = [tuple(int(v) for v in g) for g in generators]
        if not gens:
            raise ValueError("a finite group needs at least one generator")
        degree = len(gens[0])
        for g in gens:
            if not is_permutation(g, degree):
                raise ValueError(f"generator {g} is not a permutation of range({degree})")
        self.generators = gens
        self.degree = degree
        self.identity = identity(degree)
        order = [self.identity]
        seen = {self.identity}
        queue = deque(order)
        while queue:
            g = queue.popleft()
            for s in gens:
                h = compose(s, g)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    queue.append(h)
        self.elements = order
        self.index = {g: i for i, g in enumerate(order)}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return tuple(g) in self.index

    def mul(self, a: Perm, b: Perm) -> Perm:
        return compose(a, b)

    def inv(self, a: Perm) -> Perm:
        return inverse(a)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([tuple((i + 1) % n for i in range(n))])

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls([(0,)])


class GroupAction:
    """Action of a :class:`FiniteGroup` on ``range(n_points)``.

    Parameters
    ----------
    group : FiniteGroup
    generator_images : list of permutations
        Image of each group generator, in the order of ``group.generators``.

    Raises
    ------
    ValueError
        If the generator images do not extend to a homomorphism.
    """

    def __init__(self, group: FiniteGroup, generator_images: Sequence[Sequence[int]]):
        images = [tuple(int(v) for v in g) for g in generator_images]
        if len(images) != len(group.generators):
            raise ValueError("need one image per group generator")
        n = len(images[0]) if images else 0
        for img in images:
            if not is_permutation(img, n):
                raise ValueError(f"generator image {img} is not a permutation of range({n})")
        self.group = group
        self.n_points = n
        table = {group.identity: identity(n)}
        queue = deque([group.identity])
        while queue:
            g = queue.popleft()
            for s, img in zip(group.generators, images):
                h = compose(s, g)
                act = compose(img, table[g])
                if h in table:
                    if table[h] != act:
                        raise ValueError(
                            f"generator images are not a homomorphism: element {h} "
                            f"acts both as {table[h]} and {act}"
                        )
                else:
                    table[h] = act
                    queue.append(h)
        self._table = table

    def perm(self, g: Perm) -> Perm:
        return self._table[tuple(g)]

    def act(self, g: Perm, x: int) -> int:
        return self._table[tuple(g)][x]

    def is_free(self) -> bool:
        """No non-identity element fixes any point (exhaustive)."""
        ident = self.group.identity
        for g, p in self._table.items():
            if g == ident:
                continue
            if any(p[x] == x for x in range(self.n_points)):
                return False
        return True

    def orbits(self) -> list[list[int]]:
        seen = [False] * self.n_points
        out = []
        for x in range(self.n_points):
            if seen[x]:
                continue
            orb = sorted({p[x] for p in self._table.values()})
            for y in orb:
                seen[y] = True
            out.append(orb)
        return out

    def transporter(self, x: int, y: int) -> list[Perm]:
        """All group elements ``g`` with ``g . x == y``."""
        return [g for g, p in self._table.items() if p[x] == y]

    @classmethod
    def regular(cls, group: FiniteGroup) -> "GroupAction":
        """Left multiplication of the group on itself, points in element order."""
        idx = group.index
        images = [
            tuple(idx[compose(s, g)] for g in group.elements) for s in group.generators
        ]
        return cls(group, images)
