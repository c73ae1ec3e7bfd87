"""Shannon entropy of base spaces and a ledger of upper bounds on beta(R).

All logarithms are natural. Bounds are stored with the chain of inputs that
produced them, and the ledger reports the smallest one.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bernoulli import BaseSpace
from .groups import FiniteGroup, GroupAction

C_LEM2 = 1.0 + math.log(5.0 / 3.0)
ALPHA_TARGET = 0.25
RULES = ("direct-witness", "lem2", "lem3", "lem4", "thm5-limit")


@dataclass(frozen=True)
class EntropyValue:
    nats: float
    weights: tuple | None = None  # the weight multiset, when finite

    @property
    def finite(self) -> bool:
        return math.isfinite(self.nats)


def _log(w) -> float:
    # exact rationals near 1: subtract exactly, then log1p
    if isinstance(w, Fraction) and w > Fraction(1, 2):
        return math.log1p(float(w - 1))
    return math.log(w)


def _h(weights) -> float:
    return -math.fsum(float(w) * _log(w) for w in weights if w > 0)


def shannon_entropy(base: BaseSpace) -> EntropyValue:
    """``-sum kappa(k) log kappa(k)`` with ``0 log 0 = 0``; infinite for an atomless base."""
    if base.atomless:
        return EntropyValue(math.inf)
    return EntropyValue(_h(base.weights), tuple(sorted(base.weights)))


def entropy_of_product(bases: Sequence[BaseSpace]) -> EntropyValue:
    vals = [shannon_entropy(b) for b in bases]
    if any(not v.finite for v in vals):
        return EntropyValue(math.inf)
    return EntropyValue(math.fsum(v.nats for v in vals))


def binary_entropy(p: float) -> float:
    return _h((p, 1.0 - p))


# ------------------------------------------------------------------ alpha

@dataclass
class AlphaEstimate:
    n: int
    words: list  # Automorphism
    achieved_norm: float
    word_length: int
    subspace: str

    @property
    def alpha(self) -> float:
        return math.log(self.n)

    @property
    def valid(self) -> bool:
        return self.n >= 3 and self.achieved_norm < ALPHA_TARGET


@dataclass
class NotFound:
    reason: str
    best_norm: float


def alpha_search(g, word_length_cap: int = 3, beam_width: int = 8, seed: int = 0,
                 subspace: str = "mean-zero", max_words: int = 4096):
    """Smallest certified ``n`` with ``||(1/n) sum u(psi_j)|| < 1/4``.

    For each length ``m <= word_length_cap`` the pool is the multiset ``S^m``
    of all length-``m`` products of the generators (the power trick). A beam
    search grows sub-multisets of the pool one word at a time, keeping the
    ``beam_width`` lowest norms; the full pool ``S^m`` is always tried. Every
    returned norm is certified by an exact eigensolve. Ties are broken by a
    seeded shuffle of the pool, so the search is deterministic given ``seed``.
    """
    from .spectral import average_norm, word_products

    rng = random.Random(seed)
    best = math.inf
    found = None
    for m in range(1, word_length_cap + 1):
        if len(g.gens) ** m > max_words:
            break
        pool = word_products(g.gens, m)
        order = list(range(len(pool)))
        rng.shuffle(order)

        def norm(sel):
            return average_norm(g, [pool[i] for i in sel], subspace)

        beam = [((), math.inf)]
        for size in range(1, len(pool) + 1):
            if found is not None and size >= found.n:
                break
            cand = {}
            for sel, _ in beam:
                for i in order:
                    key = tuple(sorted(sel + (i,)))
                    if key not in cand:
                        cand[key] = norm(key)
            ranked = sorted(cand.items(), key=lambda kv: (round(kv[1], 12), kv[0]))
            beam = ranked[:beam_width]
            if size >= 3:
                sel, val = beam[0]
                best = min(best, val)
                if val < ALPHA_TARGET:
                    found = AlphaEstimate(size, [pool[i] for i in sel], val, m, subspace)
                    break
        full = norm(tuple(range(len(pool))))
        best = min(best, full)
        if len(pool) >= 3 and full < ALPHA_TARGET and (found is None or len(pool) < found.n):
            found = AlphaEstimate(len(pool), pool, full, m, subspace)
        if found is not None:
            return found
    return NotFound(f"no witness among products of length <= {word_length_cap}", best)


# ----------------------------------------------------------------- ledger

@dataclass
class LedgerEntry:
    value: float
    rule: str
    chain: list
    note: str = ""

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")

    def to_dict(self) -> dict:
        return {"value": self.value, "rule": self.rule, "chain": self.chain, "note": self.note}


@dataclass
class BetaLedger:
    entries: list = field(default_factory=list)

    def add(self, entry: LedgerEntry) -> LedgerEntry:
        self.entries.append(entry)
        return entry

    @property
    def bound(self) -> float:
        return min((e.value for e in self.entries), default=math.inf)

    def best(self) -> LedgerEntry | None:
        return min(self.entries, key=lambda e: e.value, default=None)

    def to_json(self) -> str:
        return json.dumps({"entries": [e.to_dict() for e in self.entries], "bound": self.bound},
                          sort_keys=True, separators=(",", ":"))

    def table(self) -> str:
        rows = [f"{'rule':<15}{'value':>16}  chain"]
        for e in self.entries:
            rows.append(f"{e.rule:<15}{format(e.value, '.7g'):>16}  {' <- '.join(map(str, e.chain))}")
        rows.append(f"{'bound':<15}{format(self.bound, '.7g'):>16}")
        return "\n".join(rows)


def direct_witness(entropy: float, label: str) -> LedgerEntry:
    return LedgerEntry(entropy, "direct-witness", [label])


def lem2_terms(n) -> tuple:
    """``(intermediate, log(n+2)+1, log n + C)`` for the alpha-to-beta bound.

    ``intermediate`` is the entropy of ``({0,1}^{n+1}, lambda_p^{n+1})`` at
    ``p = 1/(n+2)``. Accepts scalars or numpy arrays.
    """
    n = np.asarray(n, dtype=np.float64)
    p = 1.0 / (n + 2.0)
    inter = -(n + 1.0) * (p * np.log(p) + (1.0 - p) * np.log1p(-p))
    mid = np.log(n + 2.0) + 1.0
    final = np.log(n) + C_LEM2
    if inter.ndim == 0:
        return float(inter), float(mid), float(final)
    return inter, mid, final


def lem2_bound(alpha: AlphaEstimate | int) -> LedgerEntry:
    """``beta(R) <= log n + 1 + log(5/3)`` from an alpha witness of size ``n``."""
    n = alpha.n if isinstance(alpha, AlphaEstimate) else int(alpha)
    if n < 3:
        raise ValueError("alpha witnesses have n >= 3")
    inter, mid, final = lem2_terms(n)
    chain = [f"alpha witness n={n}",
             f"H({{0,1}}^{n + 1}, lambda_1/{n + 2})={format(inter, '.12g')}",
             f"log({n + 2})+1={format(mid, '.12g')}"]
    return LedgerEntry(final, "lem2", chain, note=f"intermediate={format(inter, '.12g')}")


def lem3_bound(beta_of_sub: float, index) -> LedgerEntry:
    """``beta(R) <= beta(S) / [R:S]``; an infinite index gives 0."""
    if index != math.inf and (index < 1 or int(index) != index):
        raise ValueError("index must be a positive integer or infinity")
    value = 0.0 if index == math.inf else beta_of_sub / index
    return LedgerEntry(value, "lem3", [f"beta(S)={format(beta_of_sub, '.12g')}", f"index={index}"])


def lem4_bound(beta_of_restriction: float, mu_y) -> LedgerEntry:
    """``beta(R) <= beta(R|Y) mu(Y)`` for ``0 < mu(Y) <= 1``."""
    if not 0 < mu_y <= 1:
        raise ValueError(f"mu(Y) = {mu_y} outside (0, 1]")
    return LedgerEntry(beta_of_restriction * float(mu_y), "lem4",
                       [f"beta(R|Y)={format(beta_of_restriction, '.12g')}", f"mu(Y)={mu_y}"])


def infinite_fundamental_group() -> LedgerEntry:
    """Compressions by arbitrarily small ``mu(Y)`` drive the bound to 0."""
    return LedgerEntry(0.0, "lem4", ["infinite fundamental group"], note="limit mu(Y) -> 0")


def thm5_schedule(n: int, m: int) -> LedgerEntry:
    """``(log n + C)/m``: the alpha bound on ``R/F`` compressed by a finite ``F`` with classes of size ``m``."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    inner = lem2_bound(n)
    value = inner.value / m
    return LedgerEntry(value, "thm5-limit", inner.chain + [f"mu(Y)=1/{m}"],
                       note="tends to 0 as m grows")


# ------------------------------------------------- lifted vs quotient norms

@dataclass
class NormComparison:
    m_values: list
    lhs: list  # Fractions: int mu(x) [(A*A)^m]_xx
    rhs: list  # Fractions: [(B*B)^m]_ee
    termwise_ok: bool
    norm_lhs: float
    norm_rhs: float
    norm_ok: bool

    def __bool__(self):
        return self.termwise_ok and self.norm_ok


def _int_matrix_power_diag(M, m: int):
    P = np.identity(M.shape[0], dtype=object)
    MtM = M.T.dot(M)
    out = []
    for _ in range(m):
        P = P.dot(MtM)
        out.append(np.diag(P).copy())
    return out


def norm_comparison_check(action: GroupAction, weights, quotient: FiniteGroup,
                          quotient_images: Sequence, words: Sequence, m_cap: int = 6,
                          tol: float = 1e-9) -> NormComparison:
    """Moments of the lifted average against those of its image in the quotient group.

    Parameters
    ----------
    action : GroupAction
        ``G`` acting on the points; its orbits are the relation.
    quotient, quotient_images
        A finite group ``Q`` and the images in ``Q`` of the generators of ``G``
        (must define a homomorphism).
    words : sequence of elements of ``G``
        ``theta_i``; the lifted operator is ``A = (1/n) sum u(theta_i)`` and
        the quotient one is ``B = (1/n) sum lambda(q(theta_i))``.

    Raises
    ------
    ValueError
        If the images do not define a homomorphism, or some ``g`` with
        ``q(g) != e`` fixes a point (then the moment inequality has no reason to hold).
    """
    G = action.group
    reg = GroupAction.regular(quotient)
    qidx = quotient.index
    img_perms = [reg.perm(qi) for qi in quotient_images]
    hom = GroupAction(G, img_perms)  # raises if not a homomorphism
    e_idx = qidx[quotient.identity]

    def q_of(g):
        return quotient.elements[hom.perm(g)[e_idx]]

    for g in G.elements:
        if q_of(g) != quotient.identity:
            p = action.perm(g)
            if any(p[x] == x for x in range(action.n_points)):
                raise ValueError(f"invalid quotient data: element {g} with nontrivial image fixes a point")

    n = len(words)
    npts = action.n_points
    A = np.zeros((npts, npts), dtype=object)
    for w in words:
        p = action.perm(w)
        for x in range(npts):
            A[p[x], x] += 1
    nq = len(quotient)
    B = np.zeros((nq, nq), dtype=object)
    for w in words:
        p = reg.perm(q_of(w))
        for x in range(nq):
            B[p[x], x] += 1
    wts = [Fraction(wt) for wt in weights]
    lhs, rhs = [], []
    for m, (da, db) in enumerate(zip(_int_matrix_power_diag(A, m_cap),
                                     _int_matrix_power_diag(B, m_cap)), start=1):
        scale = Fraction(1, n ** (2 * m))
        lhs.append(sum((wts[x] * int(da[x]) for x in range(npts)), Fraction(0)) * scale)
        rhs.append(Fraction(int(db[e_idx])) * scale)
    termwise = all(a <= b for a, b in zip(lhs, rhs))
    na = float(np.linalg.norm(A.astype(float) / n, 2))
    nb = float(np.linalg.norm(B.astype(float) / n, 2))
    return NormComparison(list(range(1, m_cap + 1)), lhs, rhs, termwise, na, nb, na <= nb + tol)
