"""Co-induced relations built from choice functions on finite models.

Setting: a finite group ``G`` acts freely on ``X`` (action ``beta``) and its
orbit relation ``R0`` refines ``R`` with constant index ``N``. Choice
functions ``C_0 = id, ..., C_{N-1}`` in the full group pick, for every ``x``,
one point in each ``R0``-class of ``[x]_R``. They induce

* ``pi(x, x')``, the permutation of ``0..N-1`` with
  ``[C_k(x)]_R0 = [C_{pi(x,x')(k)}(x')]_R0``;
* ``delta(x, x')``, the vector of group elements with
  ``C_n(x') = delta(x,x')(n) . C_k(x)`` where ``n = pi(x,x')(k)``.

As maps of indices ``pi(x, x'') = pi(x', x'') o pi(x, x')``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bernoulli import BudgetError, DEFAULT_BUDGET, verify_iso
from .eqrel import (Automorphism, EqRel, ExtensionMap, NonConstantIndex, check_extension,
                    index as rel_index, weights_equal)
from .groups import GroupAction, compose


class ChoiceError(ValueError):
    pass


@dataclass(eq=False)
class ChoiceSystem:
    rel: EqRel
    beta: GroupAction
    choices: list  # Automorphism, choices[0] is the identity
    perm: dict  # (x, x') -> tuple, pi(x, x')(k) = perm[(x, x')][k]
    delta: dict  # (x, x') -> tuple of group elements indexed by n
    order: str = "equivariant"

    @property
    def N(self) -> int:
        return len(self.choices)

    def to_json(self) -> str:
        gidx = self.beta.group.index
        doc = {
            "order": self.order,
            "choices": [list(c.perm) for c in self.choices],
            "perm": [[x, y, list(p)] for (x, y), p in sorted(self.perm.items())],
            "delta": [[x, y, [gidx[g] for g in d]] for (x, y), d in sorted(self.delta.items())],
            "group": [list(g) for g in self.beta.group.elements],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def orbit_relation(beta: GroupAction, weights, exact: bool = True) -> EqRel:
    return EqRel.from_classes(weights, beta.orbits(), exact)


def _unique_transporter(beta: GroupAction, a: int, b: int):
    ts = beta.transporter(a, b)
    if len(ts) != 1:
        raise ChoiceError(f"action is not free: {len(ts)} elements carry {a} to {b}")
    return ts[0]


def build_choice_system(rel: EqRel, beta: GroupAction, order: str = "equivariant") -> ChoiceSystem:
    """Choice functions, permutation cocycle and group cocycle.

    Inside each ``R``-class the ``R0``-orbits ``O_0 < O_1 < ...`` are ordered
    by minimum id, with base points ``b_a = min O_a``. ``C_j`` sends
    ``g . b_a`` to ``g . b_{(a+j) mod N}`` for ``order="equivariant"``; with
    ``order="sorted"`` it sends the ``t``-th smallest point of ``O_a`` to the
    ``t``-th smallest of ``O_{(a+j) mod N}``; ``order="reverse"`` uses
    ``O_{(a-j) mod N}`` with the equivariant matching.

    Raises
    ------
    ChoiceError
        If the action is not free, the orbit relation does not refine
        ``rel``, or the index is not constant.
    """
    if order not in ("equivariant", "sorted", "reverse"):
        raise ChoiceError(f"unknown order {order!r}")
    if not beta.is_free():
        raise ChoiceError("the action beta must be free")
    if beta.n_points != rel.n:
        raise ChoiceError("action and relation live on different point sets")
    sub = orbit_relation(beta, rel.weights, rel.exact)
    if not sub.refines(rel):
        raise ChoiceError("orbit relation does not refine the relation")
    N = rel_index(rel, sub)
    if isinstance(N, NonConstantIndex):
        raise ChoiceError(str(N))
    G = beta.group
    perms = [list(range(rel.n)) for _ in range(N)]
    for rc in rel.classes:
        orbs = sorted({sub.members(x) for x in rc})
        for j in range(N):
            for a, O in enumerate(orbs):
                t = (a - j) % N if order == "reverse" else (a + j) % N
                T = orbs[t]
                if order == "sorted":
                    for u, v in zip(O, T):
                        perms[j][u] = v
                else:
                    for g in G.elements:
                        perms[j][beta.act(g, O[0])] = beta.act(g, T[0])
    choices = [Automorphism(tuple(p)).validate(rel) for p in perms]
    # sub-class id of C_k(x), per x and k
    tag = {x: [sub.class_of[c.perm[x]] for c in choices] for x in range(rel.n)}
    perm, delta = {}, {}
    for rc in rel.classes:
        for x in rc:
            for x2 in rc:
                pos = {cid: n for n, cid in enumerate(tag[x2])}
                p = tuple(pos[tag[x][k]] for k in range(N))
                perm[(x, x2)] = p
                d = [None] * N
                for k in range(N):
                    n = p[k]
                    d[n] = _unique_transporter(beta, choices[k].perm[x], choices[n].perm[x2])
                delta[(x, x2)] = tuple(d)
    return ChoiceSystem(rel, beta, choices, perm, delta, order)


@dataclass
class CocycleReport:
    triples: int
    perm_failures: list
    delta_failures: list
    defining_failures: list
    choice_failures: list

    def __bool__(self):
        return not (self.perm_failures or self.delta_failures
                    or self.defining_failures or self.choice_failures)


def verify_cocycles(cs: ChoiceSystem, max_failures: int = 10) -> CocycleReport:
    """Exhaustive check of the choice property, the defining relation and both cocycle rules."""
    rel, beta, C = cs.rel, cs.beta, cs.choices
    sub = orbit_relation(beta, rel.weights, rel.exact)
    cf, df, pf, gf = [], [], [], []
    for x in range(rel.n):
        tags = [sub.class_of[c.perm[x]] for c in C]
        expected = {sub.class_of[y] for y in rel.members(x)}
        if len(set(tags)) != len(tags) or set(tags) != expected or C[0].perm[x] != x:
            cf.append(x)
    triples = 0
    for rc in rel.classes:
        for x, x2 in itertools.product(rc, repeat=2):
            p, d = cs.perm[(x, x2)], cs.delta[(x, x2)]
            for k in range(cs.N):
                n = p[k]
                if beta.act(d[n], C[k].perm[x]) != C[n].perm[x2]:
                    df.append((x, x2, k))
            for x3 in rc:
                triples += 1
                p2, p3 = cs.perm[(x2, x3)], cs.perm[(x, x3)]
                if tuple(p2[p[k]] for k in range(cs.N)) != p3:
                    pf.append((x, x2, x3))
                d2, d3 = cs.delta[(x2, x3)], cs.delta[(x, x3)]
                inv2 = {v: i for i, v in enumerate(p2)}
                for n in range(cs.N):
                    if compose(d2[n], d[inv2[n]]) != d3[n]:
                        gf.append((x, x2, x3, n))
                        break
    return CocycleReport(triples, pf[:max_failures], gf[:max_failures],
                         df[:max_failures], cf[:max_failures])


# -------------------------------------------------------------- co-induction

@dataclass(eq=False)
class CoinducedRelation:
    cs: ChoiceSystem
    alpha: GroupAction
    y_weights: tuple
    points: list  # (x, ys)
    rel: EqRel
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {pt: i for i, pt in enumerate(self.points)}

    def to_json(self) -> str:
        doc = {"points": [[x, list(ys)] for x, ys in self.points],
               "classes": [list(c) for c in self.rel.classes]}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _related_image(cs: ChoiceSystem, alpha: GroupAction, x: int, ys: tuple, x2: int) -> tuple:
    """``y'`` with ``y'_n = delta(x,x')(n) . y_{pi(x,x')^-1(n)}``."""
    p, d = cs.perm[(x, x2)], cs.delta[(x, x2)]
    inv = [0] * len(p)
    for k, n in enumerate(p):
        inv[n] = k
    return tuple(alpha.act(d[n], ys[inv[n]]) for n in range(len(p)))


def coinduce(cs: ChoiceSystem, alpha: GroupAction, y_weights: Sequence,
             budget: int = DEFAULT_BUDGET, verify: bool = True) -> CoinducedRelation:
    """Materialize the co-induced relation on ``X x Y^N`` with product weights.

    With ``verify=True`` the relation defined pointwise by the formula is
    checked to be reflexive, symmetric and transitive on every point.
    """
    if alpha.group is not cs.beta.group and alpha.group.elements != cs.beta.group.elements:
        raise ChoiceError("alpha and beta must be actions of the same group")
    ny = alpha.n_points
    yw = tuple(Fraction(w) if cs.rel.exact else float(w) for w in y_weights)
    if len(yw) != ny:
        raise ValueError("need one weight per point of Y")
    for orb in alpha.orbits():
        if any(not weights_equal(yw[y], yw[orb[0]]) for y in orb):
            raise ValueError("alpha does not preserve the weights on Y")
    N = cs.N
    size = cs.rel.n * ny ** N
    if size > budget:
        raise BudgetError(f"co-induced relation needs {size} points, budget is {budget}")
    points = [(x, ys) for x in range(cs.rel.n) for ys in itertools.product(range(ny), repeat=N)]
    idx = {pt: i for i, pt in enumerate(points)}
    weights = [cs.rel.weights[x] * math.prod((yw[y] for y in ys), start=Fraction(1) if cs.rel.exact else 1.0)
               for x, ys in points]
    cls_of = [-1] * len(points)
    classes = []
    for i, (x, ys) in enumerate(points):
        if cls_of[i] != -1:
            continue
        members = [idx[(x2, _related_image(cs, alpha, x, ys, x2))] for x2 in cs.rel.members(x)]
        for j in members:
            if cls_of[j] != -1:
                raise AssertionError(f"formula classes overlap at point {j}: not transitive")
            cls_of[j] = len(classes)
        classes.append(members)
    rel = EqRel.from_classes(weights, classes, cs.rel.exact)
    out = CoinducedRelation(cs, alpha, yw, points, rel, idx)
    if verify:
        bad = verify_equivalence(out)
        if bad:
            raise AssertionError(f"co-induced relation fails {bad[0][0]} at point {bad[0][1]}")
    return out


def verify_equivalence(cr: CoinducedRelation) -> list:
    """Reflexivity, symmetry and transitivity of the formula relation, point by point."""
    cs, alpha = cr.cs, cr.alpha
    bad = []
    for i, (x, ys) in enumerate(cr.points):
        if _related_image(cs, alpha, x, ys, x) != ys:
            bad.append(("reflexive", i))
        cls_i = {cr.index[(x2, _related_image(cs, alpha, x, ys, x2))] for x2 in cs.rel.members(x)}
        for j in cls_i:
            x2, ys2 = cr.points[j]
            cls_j = {cr.index[(x3, _related_image(cs, alpha, x2, ys2, x3))] for x3 in cs.rel.members(x2)}
            if i not in cls_j:
                bad.append(("symmetric", (i, j)))
            if cls_j != cls_i:
                bad.append(("transitive", (i, j)))
        if len(bad) > 10:
            break
    return bad


@dataclass
class CindReport:
    part1: object  # ExtensionReport for (x, y) -> x
    part3: object  # ExtensionReport for (x, y) -> y_0
    injectivity_failure: object
    alpha_free: bool

    @property
    def extension_ok(self) -> bool:
        return self.part1.is_extension

    @property
    def expansion_containment_ok(self) -> bool:
        return self.part3.conditions["1"] and self.part3.conditions["3'"]


def verify_cind_props(cr: CoinducedRelation) -> CindReport:
    """Extension over ``R`` via ``x``; containment of the ``alpha``-orbit relation via ``y_0``.

    The measure of the points whose class is not mapped injectively by
    ``y_0`` is reported; at finite scale it is typically positive.
    """
    cs = cr.cs
    part1 = check_extension(ExtensionMap(cr.rel, cs.rel, tuple(x for x, _ in cr.points)))
    arel = orbit_relation(cr.alpha, cr.y_weights, cs.rel.exact)
    part3 = check_extension(ExtensionMap(cr.rel, arel, tuple(ys[0] for _, ys in cr.points)))
    return CindReport(part1, part3, part3.injectivity_failure, cr.alpha.is_free())


def injectivity_failure_oracle(cr: CoinducedRelation):
    """Brute-force double count: measure of points with two class members sharing ``y_0``."""
    total = 0
    for c in cr.rel.classes:
        seen = [cr.points[i][1][0] for i in c]
        if len(set(seen)) != len(seen):
            total += sum(cr.rel.weights[i] for i in c)
    return total


def lifted_generator(cr: CoinducedRelation, theta: Automorphism) -> Automorphism:
    """The lift of ``theta`` in the full group of ``R`` to the co-induced relation."""
    cs, alpha = cr.cs, cr.alpha
    img = [cr.index[(theta.perm[x], _related_image(cs, alpha, x, ys, theta.perm[x]))]
           for x, ys in cr.points]
    return Automorphism(tuple(img))


@dataclass
class SwapReport:
    orders: tuple
    same_class_sizes: bool
    isomorphic: bool
    failures: list


def swap_choice_test(rel: EqRel, beta: GroupAction, alpha: GroupAction, y_weights,
                     orders=("equivariant", "reverse"), budget: int = DEFAULT_BUDGET) -> SwapReport:
    """Compare co-induced relations from two choice orders.

    Candidate map: write ``C'_n(x) = gamma_x(n) . C_{rho_x(n)}(x)`` and send
    ``(x, y)`` to ``(x, y')`` with ``y'_n = gamma_x(n) . y_{rho_x(n)}``. The
    report says whether this map is an isomorphism of extensions; it makes no
    claim in the negative case.
    """
    a = build_choice_system(rel, beta, orders[0])
    b = build_choice_system(rel, beta, orders[1])
    ra = coinduce(a, alpha, y_weights, budget)
    rb = coinduce(b, alpha, y_weights, budget)
    sizes_a = sorted(len(c) for c in ra.rel.classes)
    sizes_b = sorted(len(c) for c in rb.rel.classes)
    sub = orbit_relation(beta, rel.weights, rel.exact)
    mapping = []
    for x, ys in ra.points:
        tags = [sub.class_of[c.perm[x]] for c in a.choices]
        ys2 = []
        for n, cb in enumerate(b.choices):
            k = tags.index(sub.class_of[cb.perm[x]])
            g = _unique_transporter(beta, a.choices[k].perm[x], cb.perm[x])
            ys2.append(alpha.act(g, ys[k]))
        mapping.append(rb.index[(x, tuple(ys2))])
    proj_a = tuple(x for x, _ in ra.points)
    proj_b = tuple(x for x, _ in rb.points)
    rep = verify_iso(ra.rel, rb.rel, mapping, proj_a, proj_b)
    return SwapReport(tuple(orders), sizes_a == sizes_b, bool(rep), rep.failures)
