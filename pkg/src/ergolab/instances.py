"""Seeded random finite instances for the exhaustive suites.

Every generator takes a :class:`random.Random` and returns exact-weight
objects, so an instance is a pure function of its seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .bernoulli import BaseSpace
from .eqrel import EqRel, PartialIso
from .groups import FiniteGroup, GroupAction, compose
from .spectral import Graphing


def random_base(rng: random.Random, max_k: int = 3, denom: int = 6) -> BaseSpace:
    """``k <= max_k`` symbols with positive rational weights; the trivial base is drawn rarely."""
    k = 1 if max_k == 1 or rng.random() < 0.1 else rng.randint(2, max_k)
    raw = [rng.randint(1, denom) for _ in range(k)]
    tot = sum(raw)
    return BaseSpace(tuple(range(k)), tuple(Fraction(r, tot) for r in raw))


def class_weights(rng: random.Random, sizes, denom: int = 5) -> list:
    """Class-constant exact point weights for classes of the given sizes."""
    a = [rng.randint(1, denom) for _ in sizes]
    tot = sum(ai * s for ai, s in zip(a, sizes))
    return [Fraction(ai, tot) for ai in a]


def _split(rng: random.Random, n: int, max_class: int) -> list:
    sizes = []
    while n:
        s = rng.randint(1, min(n, max_class))
        sizes.append(s)
        n -= s
    return sizes


def _relation(rng: random.Random, sizes) -> EqRel:
    n = sum(sizes)
    pts = list(range(n))
    rng.shuffle(pts)
    classes, weights = [], [None] * n
    cw = class_weights(rng, sizes)
    i = 0
    for s, wt in zip(sizes, cw):
        c = pts[i:i + s]
        i += s
        classes.append(c)
        for x in c:
            weights[x] = wt
    return EqRel.from_classes(weights, classes)


def extension_points(sizes, k: int) -> int:
    return sum(s * k ** s for s in sizes)


@dataclass
class ExtensionInstance:
    """A relation with a base, a sub-relation of constant index and a compression family."""

    seed: int
    rel: EqRel
    base: BaseSpace
    sub: EqRel
    index: int
    Y: list
    isos: list  # PartialIso


def random_extension_instance(seed: int, max_points: int = 12, max_k: int = 3,
                              max_ext_points: int = 20_000) -> ExtensionInstance:
    """Draw ``(R, K, S, Y, theta)`` with ``|X| <= max_points`` and ``|K| <= max_k``.

    Class sizes are multiples of the index ``N`` so that ``S`` splits every
    class into ``N`` equal blocks. Shapes whose extension would exceed
    ``max_ext_points`` are redrawn.
    """
    rng = random.Random(seed)
    while True:
        base = random_base(rng, max_k)
        k = len(base.symbols)
        N = rng.randint(1, 3)
        blocks = _split(rng, rng.randint(1, max(1, max_points // N)), 4)
        sizes = [N * b for b in blocks]
        if extension_points(sizes, k) <= max_ext_points:
            break
    rel = _relation(rng, sizes)
    sub_classes = []
    for c in rel.classes:
        members = list(c)
        rng.shuffle(members)
        s = len(members) // N
        sub_classes.extend(members[j * s:(j + 1) * s] for j in range(N))
    sub = EqRel.from_classes(rel.weights, sub_classes)
    Y, per_class = [], []
    for c in rel.classes:
        members = list(c)
        rng.shuffle(members)
        m = rng.randint(1, len(members))
        Y.extend(members[:m])
        per_class.append((members[:m], members))
    n_maps = max(-(-len(mem) // len(yc)) for yc, mem in per_class)
    doms = [([], []) for _ in range(n_maps)]
    for yc, mem in per_class:
        for t, z in enumerate(mem):
            j, i = divmod(t, len(yc))
            doms[j][0].append(yc[i])
            doms[j][1].append(z)
    isos = [PartialIso(tuple(d), tuple(im)) for d, im in doms]
    return ExtensionInstance(seed, rel, base, sub, N, sorted(Y), isos)


def random_graphing(seed: int, max_points: int = 8, max_gens: int = 2) -> Graphing:
    """Random permutations of a small space, uniform exact weights."""
    rng = random.Random(seed)
    n = rng.randint(1, max_points)
    gens = []
    for _ in range(rng.randint(1, max_gens)):
        p = list(range(n))
        rng.shuffle(p)
        gens.append(tuple(p))
    return Graphing.from_perms(gens, [Fraction(1, n)] * n, exact=True)


_SMALL_GROUPS = (
    ((1, 0),),
    ((1, 2, 0),),
    ((1, 2, 3, 0),),
    ((1, 0, 3, 2), (2, 3, 0, 1)),
    ((1, 2, 3, 4, 5, 0),),
    ((1, 2, 0, 4, 5, 3), (3, 5, 4, 0, 2, 1)),  # S_3 acting regularly
)


@dataclass
class CoinductionInstance:
    seed: int
    rel: EqRel
    beta: GroupAction
    alpha: GroupAction
    y_weights: tuple


def free_action(group: FiniteGroup, n_orbits: int) -> GroupAction:
    """``n_orbits`` disjoint copies of the left-regular action."""
    m = len(group)
    idx = group.index
    images = []
    for s in group.generators:
        img = []
        for o in range(n_orbits):
            img.extend(o * m + idx[compose(s, g)]
                       for g in group.elements)
        images.append(tuple(img))
    return GroupAction(group, images)


def random_action(rng: random.Random, group: FiniteGroup, max_points: int = 3) -> GroupAction:
    """An action on ``<= max_points`` points through a random homomorphism, or the trivial one."""
    q = rng.randint(1, max_points)
    for _ in range(50):
        imgs = []
        for _s in group.generators:
            p = list(range(q))
            rng.shuffle(p)
            imgs.append(tuple(p))
        try:
            return GroupAction(group, imgs)
        except ValueError:
            continue
    return GroupAction(group, [tuple(range(q))] * len(group.generators))


def random_coinduction_instance(seed: int, max_x: int = 24, max_budget: int = 20_000
                                ) -> CoinductionInstance:
    """A free ``beta``, a relation whose classes join ``N`` of its orbits, and an ``alpha``.

    The orbits inside a class are visited in a random order, so the choice
    functions are not aligned with the point labels.
    """
    rng = random.Random(seed)
    while True:
        group = FiniteGroup(rng.choice(_SMALL_GROUPS))
        m = len(group)
        N = rng.randint(1, 3)
        n_classes = rng.randint(1, max(1, max_x // (m * N)))
        beta = free_action(group, N * n_classes)
        alpha = random_action(rng, group)
        q = alpha.n_points
        n = beta.n_points
        if n <= max_x and n * q ** N <= max_budget:
            break
    orbits = list(range(N * n_classes))
    rng.shuffle(orbits)
    classes = []
    for c in range(n_classes):
        pts = []
        for o in orbits[c * N:(c + 1) * N]:
            pts.extend(range(o * m, (o + 1) * m))
        classes.append(pts)
    cw = class_weights(rng, [len(c) for c in classes])
    weights = [None] * n
    for c, wt in zip(classes, cw):
        for x in c:
            weights[x] = wt
    rel = EqRel.from_classes(weights, classes)
    raw = [0] * alpha.n_points
    for orb in alpha.orbits():
        r = rng.randint(1, 4)
        for y in orb:
            raw[y] = r
    yw = tuple(Fraction(r, sum(raw)) for r in raw)  # alpha-invariant
    return CoinductionInstance(seed, rel, beta, alpha, yw)

