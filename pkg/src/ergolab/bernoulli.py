"""Bernoulli extensions of finite relations and explicit isomorphisms between them.

A point of the extension ``X_K`` is a pair ``(x, omega)`` where ``omega`` is a
labelling of the class of ``x`` by symbol indices, stored as a tuple indexed
by the sorted class. Two points are related iff their base points are related
and their labellings agree.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .eqrel import (Automorphism, EqRel, ExtensionMap, PartialIso, check_extension,
                    index as rel_index, NonConstantIndex, restrict, weights_equal)
from .groups import GroupAction, compose, inverse

DEFAULT_BUDGET = 10 ** 6
STAR = -1  # padding symbol index; base symbols are indexed from 0


class BudgetError(RuntimeError):
    """The explicit construction would exceed the point budget."""


@dataclass(frozen=True)
class BaseSpace:
    """Finite base ``(K, kappa)``; ``atomless`` marks a non-atomic base (entropy infinite)."""

    symbols: tuple
    weights: tuple
    atomless: bool = False

    def __post_init__(self):
        ws = tuple(w if isinstance(w, Fraction) else Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if self.atomless:
            return
        if len(ws) != len(self.symbols) or not ws:
            raise ValueError("need one positive weight per symbol")
        if any(w < 0 for w in ws) or sum(ws) != 1:
            raise ValueError("symbol weights must be nonnegative and sum to 1")

    def __len__(self):
        return len(self.symbols)

    def entropy(self) -> float:
        if self.atomless:
            return math.inf
        return -sum(float(w) * math.log(w) for w in self.weights if w > 0)

    @classmethod
    def uniform(cls, k: int) -> "BaseSpace":
        return cls(tuple(range(k)), tuple([Fraction(1, k)] * k))

    @classmethod
    def bernoulli(cls, p) -> "BaseSpace":
        """``{0, 1}`` with ``P(1) = p``."""
        p = Fraction(p)
        return cls((0, 1), (1 - p, p))

    @classmethod
    def atomless_marker(cls) -> "BaseSpace":
        return cls((), (), atomless=True)

    def power(self, n: int) -> "BaseSpace":
        return product_base([self] * n)

    def to_dict(self) -> dict:
        return {"symbols": list(self.symbols),
                "weights": [f"{w.numerator}/{w.denominator}" for w in self.weights],
                "atomless": self.atomless}


def product_base(bases: Sequence[BaseSpace]) -> BaseSpace:
    """Product base; symbols are tuples of symbol indices in lexicographic order."""
    if any(b.atomless for b in bases):
        return BaseSpace.atomless_marker()
    syms = tuple(itertools.product(*(range(len(b)) for b in bases)))
    ws = tuple(math.prod((b.weights[i] for b, i in zip(bases, s)), start=Fraction(1))
               for s in syms)
    return BaseSpace(syms, ws)


@dataclass(eq=False)
class FiniteExtension:
    """Explicit finite extension: points ``(x, label)``, relation and projection to ``x``."""

    base_rel: EqRel
    points: list
    rel: EqRel
    base: BaseSpace | None = None
    index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.index:
            self.index = {pt: i for i, pt in enumerate(self.points)}

    @property
    def proj(self) -> tuple:
        return tuple(x for x, _ in self.points)

    def extension_map(self) -> ExtensionMap:
        return ExtensionMap(self.rel, self.base_rel, self.proj)

    def to_json(self) -> str:
        ws = [f"{w.numerator}/{w.denominator}" if isinstance(w, Fraction) else w
              for w in self.rel.weights]
        doc = {
            "base": self.base.to_dict() if self.base is not None else None,
            "points": [[x, list(om)] for x, om in self.points],
            "weights": ws,
            "classes": [list(c) for c in self.rel.classes],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


BernoulliExtension = FiniteExtension


def extension_size(rel: EqRel, k: int) -> int:
    return sum(len(c) * k ** len(c) for c in rel.classes)


def _assemble(base_rel: EqRel, blocks, base=None) -> FiniteExtension:
    """``blocks`` yields ``(class members, label, label weight)``; one extension class each.

    Labels of weight zero form a null set and are left out.
    """
    points, weights, classes = [], [], []
    for members, label, lw in blocks:
        if lw == 0:
            continue
        start = len(points)
        w = base_rel.weights[members[0]] * lw  # class-constant
        for x in members:
            points.append((x, label))
        weights.extend([w] * len(members))
        classes.append(range(start, len(points)))
    rel = EqRel.from_classes(weights, classes, base_rel.exact)
    return FiniteExtension(base_rel, points, rel, base)


def build_extension(rel: EqRel, base: BaseSpace, budget: int = DEFAULT_BUDGET) -> FiniteExtension:
    """The Bernoulli extension ``R_K`` as an explicit finite relation.

    Raises
    ------
    BudgetError
        If ``sum |c| |K|^|c|`` over classes exceeds ``budget``; use a
        percolation window instead of the exhaustive extension.
    """
    if base.atomless:
        raise ValueError("an atomless base has no finite extension")
    size = extension_size(rel, len(base))
    if size > budget:
        raise BudgetError(f"extension needs {size} points, budget is {budget}; "
                          "use the window-based percolation path for large classes")
    kw = base.weights
    k = len(base)
    cache = {}

    def label_weight(om):
        counts = tuple(om.count(s) for s in range(k))
        w = cache.get(counts)
        if w is None:
            w = cache[counts] = math.prod((kw[s] ** e for s, e in enumerate(counts)), start=Fraction(1))
        return w

    def blocks():
        for c in rel.classes:
            for om in itertools.product(range(k), repeat=len(c)):
                yield c, om, label_weight(om)

    return _assemble(rel, blocks(), base)


def inhomogeneous_extension(rel: EqRel, alphabets: Sequence[Sequence[BaseSpace | None]],
                            budget: int = DEFAULT_BUDGET) -> FiniteExtension:
    """Extension with independent, point-dependent label laws.

    ``alphabets[y]`` lists, per coordinate, a base or ``None`` for the padding
    symbol (a point mass at ``STAR``). Labels are tuples of per-point tuples.
    """
    def coord_choices(y):
        return [range(len(b)) if b is not None else (STAR,) for b in alphabets[y]]

    size = sum(len(c) * math.prod(math.prod(len(r) for r in coord_choices(y)) for y in c)
               for c in rel.classes)
    if size > budget:
        raise BudgetError(f"extension needs {size} points, budget is {budget}")

    def point_weight(y, sym):
        return math.prod((b.weights[s] for b, s in zip(alphabets[y], sym) if b is not None),
                         start=Fraction(1))

    def blocks():
        for c in rel.classes:
            per_point = [list(itertools.product(*coord_choices(y))) for y in c]
            for om in itertools.product(*per_point):
                lw = math.prod((point_weight(y, s) for y, s in zip(c, om)), start=Fraction(1))
                yield c, om, lw

    return _assemble(rel, blocks())


# ------------------------------------------------------------- isomorphisms

@dataclass
class IsoReport:
    bijective: bool
    measure_preserving: bool
    relation_preserving: bool
    commutes: bool
    failures: list

    def __bool__(self):
        return self.bijective and self.measure_preserving and self.relation_preserving and self.commutes


@dataclass(eq=False)
class IsoWitness:
    """A map ``source point -> target point`` together with its exhaustive verification."""

    source: EqRel
    target: EqRel
    mapping: tuple
    report: IsoReport
    source_proj: tuple | None = None
    target_proj: tuple | None = None
    ledger: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.report)

    def to_json(self) -> str:
        doc = {"pairs": [[i, j] for i, j in enumerate(self.mapping)],
               "ledger": {k: str(v) for k, v in sorted(self.ledger.items())}}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def verify_iso(source: EqRel, target: EqRel, mapping: Sequence[int],
               source_proj=None, target_proj=None, pairwise: bool = False,
               max_failures: int = 10) -> IsoReport:
    """Exhaustive check that ``mapping`` is an isomorphism of finite relations.

    Relation preservation in both directions is checked class by class (each
    source class lands inside one target class of the same size, and distinct
    classes in distinct ones); ``pairwise=True`` also compares all pairs.
    When projections are given, ``target_proj[mapping[i]] == source_proj[i]``
    is required as well (an isomorphism of extensions).
    """
    failures = []

    def fail(kind, witness):
        if len(failures) < max_failures:
            failures.append((kind, witness))

    mapping = tuple(mapping)
    bij = len(mapping) == source.n == target.n and len(set(mapping)) == target.n
    if not bij:
        fail("bijective", (len(mapping), source.n, target.n))
        return IsoReport(False, False, False, False, failures)
    meas = True
    for i, j in enumerate(mapping):
        if not weights_equal(source.weights[i], target.weights[j]):
            meas = False
            fail("measure", i)
    rel_ok = True
    used = set()
    for c in source.classes:
        tc = target.class_of[mapping[c[0]]]
        if any(target.class_of[mapping[x]] != tc for x in c):
            rel_ok = False
            fail("relation", c[0])
        if len(target.members(mapping[c[0]])) != len(c) or tc in used:
            rel_ok = False
            fail("relation-inverse", c[0])
        used.add(tc)
    if pairwise and rel_ok:
        for a in range(source.n):
            for b in range(source.n):
                if source.related(a, b) != target.related(mapping[a], mapping[b]):
                    rel_ok = False
                    fail("relation-pair", (a, b))
    comm = True
    if source_proj is not None and target_proj is not None:
        for i, j in enumerate(mapping):
            if target_proj[j] != source_proj[i]:
                comm = False
                fail("commutes", i)
    return IsoReport(bij, meas, rel_ok, comm, failures)


# ------------------------------------------- percolation labels as an extension

def edge_list(g, cls: Sequence[int]) -> list:
    """Edges ``(y, theta_i(y), i)`` of the class graph in canonical sorted order."""
    edges = [(y, a.perm[y], i) for y in cls for i, a in enumerate(g.gens)]
    return sorted(edges, key=lambda e: (min(e[0], e[1]), max(e[0], e[1]), e[2], e[0]))


def percolation_extension(g, p, budget: int = DEFAULT_BUDGET) -> FiniteExtension:
    """Points ``(x, omega)`` with ``omega`` in ``{0,1}^{E_x}`` under ``lambda_p``."""
    p = Fraction(p)
    rel = g.rel
    n = g.n
    size = sum(len(c) * 2 ** (n * len(c)) for c in rel.classes)
    if size > budget:
        raise BudgetError(f"percolation extension needs {size} points, budget is {budget}")

    def blocks():
        for c in rel.classes:
            m = n * len(c)
            table = [p ** k * (1 - p) ** (m - k) for k in range(m + 1)]
            for om in itertools.product((0, 1), repeat=m):
                yield c, om, table[sum(om)]

    return _assemble(rel, blocks(), BaseSpace.bernoulli(p))


def perc_label_iso(g, p, budget: int = DEFAULT_BUDGET, pairwise: bool = False) -> IsoWitness:
    """Identify edge labellings with ``{0,1}^n``-labellings of vertices.

    The edge ``(y, theta_i(y))`` is the ``i``-th coordinate of the label of
    ``y``: ``omega'(y)_i = omega(y, theta_i y)``.
    """
    src = percolation_extension(g, p, budget)
    base = BaseSpace.bernoulli(p).power(g.n)
    tgt = build_extension(g.rel, base, budget)
    sym_index = {s: i for i, s in enumerate(base.symbols)}
    n_gens = g.n
    edge_pos = {}
    for c in g.rel.classes:
        for pos, (y, _, i) in enumerate(edge_list(g, c)):
            edge_pos[(y, i)] = pos
    # per class: for each member y, the coordinates of its n outgoing edges
    coords = {c[0]: [[edge_pos[(y, i)] for i in range(n_gens)] for y in c] for c in g.rel.classes}
    mapping = []
    for x, om in src.points:
        lab = tuple(sym_index[tuple(om[j] for j in cy)] for cy in coords[g.rel.class_of[x]])
        mapping.append(tgt.index[(x, lab)])
    rep = verify_iso(src.rel, tgt.rel, mapping, src.proj, tgt.proj, pairwise)
    return IsoWitness(src.rel, tgt.rel, tuple(mapping), rep, src.proj, tgt.proj,
                      {"points": src.rel.n, "generators": g.n})


# ------------------------------------------------- subrelations and transversals

class TransversalError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


def transversal_maps(rel: EqRel, sub: EqRel) -> list:
    """Full-group elements ``theta_0 = id, ..., theta_{N-1}`` translating ``sub``-classes.

    Inside each ``rel``-class the ``sub``-classes ``s_0 < s_1 < ...`` (by minimum id)
    must all have the same size; ``theta_i`` sends the ``t``-th point of ``s_j``
    to the ``t``-th point of ``s_{(j+i) mod N}``.
    """
    N = rel_index(rel, sub)
    if isinstance(N, NonConstantIndex):
        raise TransversalError(str(N), N.witness)
    perms = [list(range(rel.n)) for _ in range(N)]
    for rc in rel.classes:
        subs = sorted({sub.members(x) for x in rc})
        sizes = {len(s) for s in subs}
        if len(sizes) != 1:
            raise TransversalError(f"sub-classes of different sizes inside class {rc[0]}", rc[0])
        for i in range(N):
            for j, s in enumerate(subs):
                t = subs[(j + i) % N]
                for a, b in zip(s, t):
                    perms[i][a] = b
    return [Automorphism(tuple(p)).validate(rel) for p in perms]


def check_transversal(rel: EqRel, sub: EqRel, maps: Sequence[Automorphism]) -> None:
    """``theta_i([x]_S)`` must be disjoint and cover ``[x]_R`` for every ``x``."""
    for th in maps:
        th.validate(rel)
    for c in sub.classes:
        seen = {}
        for i, th in enumerate(maps):
            for y in c:
                z = th.perm[y]
                if z in seen:
                    raise TransversalError(
                        f"overlap: theta_{seen[z]} and theta_{i} both reach {z} from class {c[0]}",
                        (c[0], z))
                seen[z] = i
        gap = set(rel.members(c[0])) - set(seen)
        if gap:
            raise TransversalError(f"gap: {min(gap)} is not reached from class {c[0]}",
                                   (c[0], min(gap)))


def lift_subrelation_iso(rel: EqRel, sub: EqRel, base: BaseSpace,
                         maps: Sequence[Automorphism] | None = None,
                         budget: int = DEFAULT_BUDGET, pairwise: bool = False) -> IsoWitness:
    """``Phi(x, omega) = (x, omega')`` with ``omega'(y)_n = omega(theta_n y)`` for ``y`` in ``[x]_S``.

    Source is the lift of ``sub`` to ``R_K``; target is the Bernoulli
    extension of ``sub`` with base ``K^N``.
    """
    if maps is None:
        maps = transversal_maps(rel, sub)
    maps = list(maps)
    check_transversal(rel, sub, maps)
    N = len(maps)
    ext = build_extension(rel, base, budget)
    lifted = EqRel.from_labels(ext.rel.weights,
                               [(sub.class_of[x], om) for x, om in ext.points], rel.exact)
    lbase = base.power(N)
    tgt = build_extension(sub, lbase, budget)
    sym_index = {s: i for i, s in enumerate(lbase.symbols)}
    mapping = []
    for x, om in ext.points:
        rc = rel.members(x)
        pos = {y: i for i, y in enumerate(rc)}
        lab = tuple(sym_index[tuple(om[pos[th.perm[y]]] for th in maps)] for y in sub.members(x))
        mapping.append(tgt.index[(x, lab)])
    rep = verify_iso(lifted, tgt.rel, mapping, ext.proj, tgt.proj, pairwise)
    H = base.entropy()
    return IsoWitness(lifted, tgt.rel, tuple(mapping), rep, ext.proj, tgt.proj,
                      {"index": N, "entropy_base": H, "entropy_target": lbase.entropy(),
                       "entropy_predicted": N * H})


# ---------------------------------------------------------------- compressions

def check_compression_family(rel: EqRel, Y: Sequence[int], isos: Sequence[PartialIso]) -> None:
    Yset = set(Y)
    seen = {}
    for i, th in enumerate(isos):
        th.validate(rel)
        for x, z in zip(th.domain, th.images):
            if x not in Yset:
                raise TransversalError(f"domain of theta_{i} leaves Y at {x}", x)
            if z in seen:
                raise TransversalError(f"images of theta_{seen[z]} and theta_{i} overlap at {z}", z)
            seen[z] = i
    gap = set(range(rel.n)) - set(seen)
    if gap:
        raise TransversalError(f"images do not cover {min(gap)}", min(gap))


def compression_iso(rel: EqRel, Y: Sequence[int], base: BaseSpace,
                    isos: Sequence[PartialIso], budget: int = DEFAULT_BUDGET,
                    pairwise: bool = False) -> IsoWitness:
    """Restriction of ``R_K`` to the lift of ``Y`` as an inhomogeneous extension of ``R|Y``.

    ``omega'(y)_n`` is the padding symbol when ``y`` is outside the domain of
    ``theta_n`` and ``omega(theta_n y)`` otherwise. The ledger records the
    entropy integral ``mu(Y)^-1 int_Y H(phi) dmu`` and the prediction ``H(K)/mu(Y)``.
    """
    isos = list(isos)
    check_compression_family(rel, Y, isos)
    ext = build_extension(rel, base, budget)
    lift_pts = [i for i, (x, _) in enumerate(ext.points) if x in set(Y)]
    src = restrict(ext.rel, lift_pts)
    ry = restrict(rel, Y)
    yid = {x: i for i, x in enumerate(ry.points)}
    doms = [th.as_dict() for th in isos]
    alphabets = [[base if y in d else None for d in doms] for y in ry.points]
    tgt = inhomogeneous_extension(ry.rel, alphabets, budget)
    mapping = []
    for old in src.points:
        x, om = ext.points[old]
        pos = {y: i for i, y in enumerate(rel.members(x))}
        cls_y = ry.rel.members(yid[x])
        lab = tuple(tuple(om[pos[d[ry.points[y]]]] if ry.points[y] in d else STAR for d in doms)
                    for y in cls_y)
        mapping.append(tgt.index[(yid[x], lab)])
    src_proj = tuple(yid[ext.points[i][0]] for i in src.points)
    rep = verify_iso(src.rel, tgt.rel, mapping, src_proj, tgt.proj, pairwise)
    muY = ry.scale
    coverage = sum(rel.weights[y] * sum(1 for d in doms if y in d) for y in ry.points)
    factor = coverage / muY  # int_Y |S(y)| dmu_Y
    H = base.entropy()
    return IsoWitness(src.rel, tgt.rel, tuple(mapping), rep, src_proj, tgt.proj,
                      {"mu_Y": muY, "entropy_factor": factor,
                       "entropy_factor_predicted": 1 / muY,
                       "entropy_target": float(factor) * H,
                       "entropy_predicted": H / float(muY)})


# -------------------------------------------------------------- shift conjugacy

@dataclass(eq=False)
class ConjugacyWitness:
    sigma: tuple  # product point id -> extension point id
    product_points: list  # (x, k) with k[i][j] = k_{i,j}
    conjugates: bool
    bijective: bool
    measure_preserving: bool
    orbit_lengths_ok: bool
    cycle_lengths: dict
    failures: list

    def __bool__(self):
        return self.conjugates and self.bijective and self.measure_preserving and self.orbit_lengths_ok


def _require_full_support(base: BaseSpace) -> None:
    if base.atomless or any(w == 0 for w in base.weights):
        raise ValueError("base symbols must all have positive weight")


def _cycle_length(theta: Automorphism, x: int) -> int:
    L, y = 1, theta.perm[x]
    while y != x:
        y = theta.perm[y]
        L += 1
    return L


def _shift_period(k: tuple) -> int:
    L = len(k[0]) if k else 1
    for t in range(1, L + 1):
        if L % t == 0 and all(row[t:] + row[:t] == row for row in k):
            return t
    return L


def shift_conjugacy(rel: EqRel, theta: Automorphism, base: BaseSpace,
                    maps: Sequence[Automorphism] | None = None,
                    budget: int = DEFAULT_BUDGET) -> ConjugacyWitness:
    """``sigma(x, k) = (x, omega)`` with ``omega(theta_i theta^j x) = k_{i,j}``.

    Here ``j`` runs over the ``theta``-cycle of ``x``. The lifted
    ``theta~(x, omega) = (theta x, omega)`` corresponds to ``theta`` times the
    cyclic shift ``k_{i,j} -> k_{i,j+1}``; every identity is checked on all points.
    """
    theta.validate(rel)
    _require_full_support(base)
    sub = EqRel.generated_by(rel.weights, [theta.perm], rel.exact)
    if maps is None:
        maps = transversal_maps(rel, sub)
    maps = list(maps)
    check_transversal(rel, sub, maps)
    N = len(maps)
    ext = build_extension(rel, base, budget)
    K = len(base)
    cyc = {x: _cycle_length(theta, x) for x in range(rel.n)}
    prod_pts, sigma, fails = [], [], []
    meas = True
    for x in range(rel.n):
        L = cyc[x]
        orbit = [x]
        for _ in range(L - 1):
            orbit.append(theta.perm[orbit[-1]])
        pos = {y: i for i, y in enumerate(rel.members(x))}
        for flat in itertools.product(range(K), repeat=N * L):
            k = tuple(tuple(flat[i * L:(i + 1) * L]) for i in range(N))
            om = [None] * len(pos)
            for i, th in enumerate(maps):
                for j, y in enumerate(orbit):
                    om[pos[th.perm[y]]] = k[i][j]
            e = ext.index[(x, tuple(om))]
            w = rel.weights[x] * math.prod((base.weights[s] for s in flat), start=Fraction(1))
            if not weights_equal(w, ext.rel.weights[e]):
                meas = False
                fails.append(("measure", len(prod_pts)))
            prod_pts.append((x, k))
            sigma.append(e)
    bij = len(set(sigma)) == len(sigma) == ext.rel.n
    if not bij:
        fails.append(("bijective", len(sigma)))
    where = {pt: i for i, pt in enumerate(prod_pts)}
    conj = orbit_ok = True
    for i, (x, k) in enumerate(prod_pts):
        ex, om = ext.points[sigma[i]]
        lifted = ext.index[(theta.perm[ex], om)]
        shifted = (theta.perm[x], tuple(row[1:] + row[:1] for row in k))
        if sigma[where[shifted]] != lifted:
            conj = False
            fails.append(("conjugacy", i))
        # orbit of (x, omega) under theta~ has length lcm(L(x), shift period of k)
        predicted = math.lcm(cyc[x], _shift_period(k))
        t, cur = 1, lifted
        while cur != sigma[i]:
            cx, com = ext.points[cur]
            cur = ext.index[(theta.perm[cx], com)]
            t += 1
        if t != predicted:
            orbit_ok = False
            fails.append(("orbit-length", i))
    return ConjugacyWitness(tuple(sigma), prod_pts, conj, bij, meas, orbit_ok,
                            {x: cyc[x] for x in range(rel.n)}, fails[:10])


# ------------------------------------------------------- orbit-relation case

def orbit_extension_iso(action: GroupAction, weights, base: BaseSpace,
                        budget: int = DEFAULT_BUDGET) -> IsoWitness:
    """``R_K`` of a free action as the orbit relation of ``Gamma`` on ``X x K^Gamma``.

    ``(x, omega) -> (x, eta)`` with ``eta(g) = omega(g^-1 x)``; the target
    relation is generated by ``g (x, eta) = (g x, eta(g^-1 .))``.
    """
    if not action.is_free():
        raise ValueError("the action must be free")
    _require_full_support(base)
    G = action.group
    elems = G.elements
    rel = EqRel.from_classes(weights, action.orbits())
    ext = build_extension(rel, base, budget)
    K = len(base)
    tpoints = [(x, eta) for x in range(rel.n) for eta in itertools.product(range(K), repeat=len(elems))]
    tindex = {pt: i for i, pt in enumerate(tpoints)}
    tweights = [rel.weights[x] * math.prod((base.weights[s] for s in eta), start=Fraction(1))
                for x, eta in tpoints]
    gidx = G.index
    gens = []
    for s in G.generators:
        s_inv = inverse(s)
        img = []
        for x, eta in tpoints:
            # (s.eta)(h) = eta(s^-1 h)
            new_eta = tuple(eta[gidx[compose(s_inv, h)]] for h in elems)
            img.append(tindex[(action.act(s, x), new_eta)])
        gens.append(img)
    trel = EqRel.generated_by(tweights, gens, rel.exact)
    mapping = []
    for x, om in ext.points:
        pos = {y: i for i, y in enumerate(rel.members(x))}
        eta = tuple(om[pos[action.act(inverse(g), x)]] for g in elems)
        mapping.append(tindex[(x, eta)])
    tproj = tuple(x for x, _ in tpoints)
    rep = verify_iso(ext.rel, trel, mapping, ext.proj, tproj)
    return IsoWitness(ext.rel, trel, tuple(mapping), rep, ext.proj, tproj,
                      {"group_order": len(elems)})


def check_bernoulli(ext: FiniteExtension):
    """Extension axioms of the projection ``(x, omega) -> x``."""
    return check_extension(ext.extension_map())
