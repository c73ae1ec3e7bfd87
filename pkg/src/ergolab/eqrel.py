"""Finite models of countable pmp equivalence relations.

A finite relation lives on the points ``0..N-1`` of a probability space with
strictly positive weights. Classes are identified by their minimum member.
Weights are exact :class:`fractions.Fraction` by default; passing
``exact=False`` stores floats instead and relaxes equality checks to 1e-12.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .unionfind import UnionFind

FLOAT_TOL = 1e-12


class NotRefinement(ValueError):
    """Raised when a relation that should refine another does not."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


def _as_weight(w, exact: bool):
    if exact:
        return w if isinstance(w, Fraction) else Fraction(w)
    return float(w)


def weights_equal(a, b) -> bool:
    if a is b:
        return True
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= FLOAT_TOL


@dataclass(frozen=True)
class ProbSpace:
    """Finite probability space on the points ``0..len(weights)-1``."""

    weights: tuple
    exact: bool = True

    def __post_init__(self):
        ws = tuple(_as_weight(w, self.exact) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if not ws:
            raise ValueError("empty probability space")
        if any(w <= 0 for w in ws):
            raise ValueError("weights must be strictly positive")
        if self.exact:
            # extensions share one weight object per class; group by identity
            by_id = {id(w): w for w in ws}
            total = sum(by_id[i] * c for i, c in Counter(map(id, ws)).items())
            if total != 1:
                raise ValueError(f"weights sum to {total}, not 1")
        elif abs(sum(ws) - 1.0) > FLOAT_TOL:
            raise ValueError(f"weights sum to {sum(ws)}, not 1")

    def __len__(self):
        return len(self.weights)

    def measure(self, points: Iterable[int]):
        return sum((self.weights[x] for x in points), Fraction(0) if self.exact else 0.0)

    @classmethod
    def uniform(cls, n: int, exact: bool = True) -> "ProbSpace":
        w = Fraction(1, n) if exact else 1.0 / n
        return cls(tuple([w] * n), exact)


@dataclass(frozen=True, eq=False)
class EqRel:
    """Partition of a finite probability space into classes.

    The pmp condition forces weights to be constant on each class (any
    transposition inside a class is in the full group), and this is checked.
    """

    space: ProbSpace
    class_of: tuple
    classes: tuple = field(repr=False)

    @classmethod
    def from_classes(cls, weights: Sequence, classes: Iterable[Iterable[int]],
                     exact: bool = True) -> "EqRel":
        """Build a relation; points of weight zero are dropped and ids compacted."""
        weights = list(weights)
        keep = [i for i, w in enumerate(weights) if w]
        if len(keep) != len(weights):
            relabel = {old: new for new, old in enumerate(keep)}
            weights = [weights[i] for i in keep]
            classes = [[relabel[x] for x in c if x in relabel] for c in classes]
        space = ProbSpace(tuple(weights), exact)
        n = len(space)
        class_of = [-1] * n
        canon = []
        for c in classes:
            members = sorted(set(int(x) for x in c))
            if not members:
                continue
            root = members[0]
            for x in members:
                if not 0 <= x < n:
                    raise ValueError(f"point {x} out of range")
                if class_of[x] != -1:
                    raise ValueError(f"point {x} lies in two classes")
                class_of[x] = root
            canon.append(tuple(members))
        missing = [x for x in range(n) if class_of[x] == -1]
        if missing:
            raise ValueError(f"classes do not cover points {missing}")
        canon.sort()
        for members in canon:
            w0 = space.weights[members[0]]
            for x in members[1:]:
                if not weights_equal(space.weights[x], w0):
                    raise ValueError(
                        f"not pmp: points {members[0]} and {x} share a class "
                        f"but have weights {w0} and {space.weights[x]}"
                    )
        return cls(space, tuple(class_of), tuple(canon))

    @classmethod
    def from_labels(cls, weights: Sequence, labels: Sequence, exact: bool = True) -> "EqRel":
        groups: dict = {}
        for x, lab in enumerate(labels):
            groups.setdefault(lab, []).append(x)
        return cls.from_classes(weights, groups.values(), exact)

    @classmethod
    def identity(cls, weights: Sequence, exact: bool = True) -> "EqRel":
        return cls.from_classes(weights, [[x] for x in range(len(weights))], exact)

    @classmethod
    def full(cls, n: int, exact: bool = True) -> "EqRel":
        return cls.from_classes(ProbSpace.uniform(n, exact).weights, [range(n)], exact)

    @classmethod
    def generated_by(cls, weights: Sequence, perms: Iterable[Sequence[int]],
                     exact: bool = True) -> "EqRel":
        """Smallest relation containing the graphs of ``perms`` (union-find)."""
        uf = UnionFind(len(weights))
        for perm in perms:
            for x, y in enumerate(perm):
                uf.union(x, int(y))
        return cls.from_labels(weights, uf.labels().tolist(), exact)

    @property
    def n(self) -> int:
        return len(self.class_of)

    @property
    def weights(self) -> tuple:
        return self.space.weights

    @property
    def exact(self) -> bool:
        return self.space.exact

    def members(self, x: int) -> tuple:
        """Sorted class of ``x``."""
        return self._class_index[self.class_of[x]]

    @property
    def _class_index(self) -> dict:
        idx = self.__dict__.get("_cidx")
        if idx is None:
            idx = {c[0]: c for c in self.classes}
            object.__setattr__(self, "_cidx", idx)
        return idx

    def related(self, x: int, y: int) -> bool:
        return self.class_of[x] == self.class_of[y]

    def is_ergodic_proxy(self) -> bool:
        """Transitivity (a single class); the finite stand-in for ergodicity."""
        return len(self.classes) == 1

    def refines(self, other: "EqRel") -> bool:
        return other.n == self.n and all(
            other.class_of[x] == other.class_of[c[0]] for c in self.classes for x in c
        )

    def same_as(self, other: "EqRel") -> bool:
        return (self.class_of == other.class_of
                and all(weights_equal(a, b) for a, b in zip(self.weights, other.weights)))

    def to_json(self, automorphisms: Sequence["Automorphism"] = ()) -> str:
        """Canonical JSON: exact weights as ``"p/q"`` strings, sorted ids."""
        if self.exact:
            ws = [f"{w.numerator}/{w.denominator}" for w in self.weights]
        else:
            ws = [float(w) for w in self.weights]
        doc = {
            "weights": ws,
            "classes": [list(c) for c in self.classes],
            "automorphisms": [list(a.perm) for a in automorphisms],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str):
        """Inverse of :meth:`to_json`; returns ``(rel, automorphisms)``."""
        doc = json.loads(text)
        ws = doc["weights"]
        exact = all(isinstance(w, str) for w in ws)
        weights = [Fraction(w) if exact else float(w) for w in ws]
        rel = cls.from_classes(weights, doc["classes"], exact)
        autos = [Automorphism(tuple(p)) for p in doc.get("automorphisms", [])]
        for a in autos:
            a.validate(rel)
        return rel, autos


@dataclass(frozen=True)
class Automorphism:
    """Element of the full group, stored as a permutation of point ids."""

    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(v) for v in self.perm))
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("automorphism must be a bijection of the point set")

    def __call__(self, x: int) -> int:
        return self.perm[x]

    def __len__(self):
        return len(self.perm)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self`` after ``other``."""
        return Automorphism(tuple(self.perm[i] for i in other.perm))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return Automorphism(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def violations(self, rel: EqRel) -> list:
        out = []
        if len(self.perm) != rel.n:
            return [("size", len(self.perm))]
        for x, y in enumerate(self.perm):
            if not rel.related(x, y):
                out.append(("class-preserving", x))
            elif not weights_equal(rel.weights[x], rel.weights[y]):
                out.append(("measure-preserving", x))
        return out

    def validate(self, rel: EqRel) -> "Automorphism":
        bad = self.violations(rel)
        if bad:
            raise ValueError(f"not in the full group: {bad[0][0]} fails at point {bad[0][1]}")
        return self

    @classmethod
    def identity(cls, n: int) -> "Automorphism":
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class PartialIso:
    """Element of the partial full group: an injection from ``domain``."""

    domain: tuple
    images: tuple

    def __post_init__(self):
        if len(self.domain) != len(self.images):
            raise ValueError("domain and images differ in length")
        if len(set(self.images)) != len(self.images) or len(set(self.domain)) != len(self.domain):
            raise ValueError("partial isomorphism must be injective")

    def as_dict(self) -> dict:
        return dict(zip(self.domain, self.images))

    def validate(self, rel: EqRel) -> "PartialIso":
        for x, y in zip(self.domain, self.images):
            if not rel.related(x, y):
                raise ValueError(f"partial isomorphism leaves the class of {x}")
            if not weights_equal(rel.weights[x], rel.weights[y]):
                raise ValueError(f"partial isomorphism is not measure preserving at {x}")
        return self


@dataclass(frozen=True)
class Restriction:
    rel: EqRel
    scale: object
    points: tuple  # original ids, in new-id order


def restrict(rel: EqRel, subset: Iterable[int]) -> Restriction:
    """Restriction to ``subset`` with weights renormalized by ``1/mu(subset)``.

    New point ids follow the sorted order of ``subset``.
    """
    pts = tuple(sorted(set(int(x) for x in subset)))
    if not pts:
        raise ValueError("null restriction")
    scale = rel.space.measure(pts)
    if scale <= 0:
        raise ValueError("null restriction")
    new_id = {x: i for i, x in enumerate(pts)}
    weights = [rel.weights[x] / scale for x in pts]
    groups: dict = {}
    for x in pts:
        groups.setdefault(rel.class_of[x], []).append(new_id[x])
    sub = EqRel.from_classes(weights, groups.values(), rel.exact)
    return Restriction(sub, scale, pts)


@dataclass(frozen=True)
class NonConstantIndex:
    """Tagged result: the index differs between two classes of the big relation."""

    witness: tuple  # ((class id, count), (class id, count))

    def __str__(self):
        (a, na), (b, nb) = self.witness
        return f"non-constant index: class {a} has {na} subclasses, class {b} has {nb}"


def _check_refinement(rel: EqRel, sub: EqRel):
    if sub.n != rel.n:
        raise NotRefinement("relations live on different point sets", None)
    for c in sub.classes:
        for x in c:
            if rel.class_of[x] != rel.class_of[c[0]]:
                raise NotRefinement(f"point {x} leaves the class of {c[0]}", x)


def subclass_counts(rel: EqRel, sub: EqRel) -> dict:
    """Number of ``sub``-classes inside each ``rel``-class."""
    _check_refinement(rel, sub)
    counts = {c[0]: 0 for c in rel.classes}
    for c in sub.classes:
        counts[rel.class_of[c[0]]] += 1
    return counts


def index(rel: EqRel, sub: EqRel):
    """``[rel : sub]`` as an int, or :class:`NonConstantIndex` with a witness."""
    counts = subclass_counts(rel, sub)
    items = sorted(counts.items())
    first = items[0]
    for item in items[1:]:
        if item[1] != first[1]:
            return NonConstantIndex((first, item))
    return first[1]


@dataclass(frozen=True)
class ExtensionMap:
    source: EqRel
    target: EqRel
    proj: tuple


@dataclass
class ExtensionReport:
    is_extension: bool
    is_expansion: bool
    violations: list
    conditions: dict
    injectivity_failure: object = 0

    def __bool__(self):
        return self.is_extension


def check_extension(ext: ExtensionMap, max_witnesses: int = 10) -> ExtensionReport:
    """Exhaustively verify the class-bijective extension axioms.

    Conditions: (1) ``proj`` pushes the source measure onto the target
    measure; (2) ``proj`` is injective on every source class; (3) it maps
    each source class onto the target class; (3') the image of each source
    class contains the target class.
    ``injectivity_failure`` is the source measure of points whose class
    violates (2).
    """
    src, tgt, proj = ext.source, ext.target, ext.proj
    if len(proj) != src.n:
        raise ValueError("proj must be defined on every source point")
    violations = []

    def flag(cond, witness):
        if sum(1 for v in violations if v[0] == cond) < max_witnesses:
            violations.append((cond, witness))

    zero = Fraction(0) if src.exact else 0.0
    pushed = [zero] * tgt.n
    for x, y in enumerate(proj):
        pushed[y] += src.weights[x]
    ok1 = True
    for y in range(tgt.n):
        if not weights_equal(pushed[y], tgt.weights[y]):
            ok1 = False
            flag("1", y)

    ok2 = ok3 = ok3p = True
    failure = zero
    for c in src.classes:
        images = [proj[x] for x in c]
        image_set = set(images)
        if len(image_set) != len(images):
            ok2 = False
            failure += src.space.measure(c)
            seen = {}
            for x, y in zip(c, images):
                if y in seen:
                    flag("2", (seen[y], x))
                    break
                seen[y] = x
        target_class = set(tgt.members(images[0]))
        if not image_set >= target_class:
            ok3 = ok3p = False
            flag("3'", c[0])
        elif image_set != target_class:
            ok3 = False
            flag("3", c[0])
    conditions = {"1": ok1, "2": ok2, "3": ok3, "3'": ok3p}
    return ExtensionReport(
        is_extension=ok1 and ok2 and ok3,
        is_expansion=ok1 and ok2 and ok3p,
        violations=violations,
        conditions=conditions,
        injectivity_failure=failure,
    )


@dataclass(frozen=True)
class Quotient:
    transversal: tuple
    rel: EqRel  # the restriction to the transversal, identified with R/F
    mu_transversal: object
    class_size: int | None  # common F-class size, if constant


def quotient_by_finite(rel: EqRel, finite_sub: EqRel) -> Quotient:
    """Transversal of a finite subrelation and the quotient relation on it.

    The transversal takes the minimum id of every ``finite_sub`` class.
    When all those classes have size ``m`` the transversal has measure
    ``1/m`` (checked; weights are class-constant).
    """
    _check_refinement(rel, finite_sub)
    transversal = tuple(c[0] for c in finite_sub.classes)
    res = restrict(rel, transversal)
    sizes = {len(c) for c in finite_sub.classes}
    m = sizes.pop() if len(sizes) == 1 else None
    if m is not None:
        expected = Fraction(1, m) if rel.exact else 1.0 / m
        if not weights_equal(res.scale, expected):
            raise AssertionError(f"transversal measure {res.scale} != 1/{m}")
    return Quotient(res.points, res.rel, res.scale, m)
