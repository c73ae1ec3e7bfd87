"""Class graphs of a graphing, operator norms and edge-isoperimetric constants.

The operator ``T = sum_i u(theta_i) + u(theta_i^-1)`` on ``L^2(R, m)`` splits
into one block per class, and on each block it is the adjacency matrix of the
class multigraph (a self-loop contributes 2 on the diagonal). Its norm is the
maximum of the block norms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .eqrel import Automorphism, EqRel
from .unionfind import UnionFind
from .windows import Window

EXACT_EIGEN_MAX = 2000
EXACT_ISO_MAX = 24
POWER_TOL = 1e-8
POWER_MAXITER = 100_000


@dataclass(frozen=True, eq=False)
class Graphing:
    """Ordered list of full-group elements of a finite relation."""

    rel: EqRel
    gens: tuple

    def __post_init__(self):
        gens = tuple(g if isinstance(g, Automorphism) else Automorphism(tuple(g)) for g in self.gens)
        for g in gens:
            g.validate(self.rel)
        object.__setattr__(self, "gens", gens)

    @property
    def n(self) -> int:
        return len(self.gens)

    def is_generating(self) -> bool:
        """Whether the generator edges connect every class (union-find)."""
        uf = UnionFind(self.rel.n)
        for g in self.gens:
            for x, y in enumerate(g.perm):
                uf.union(x, y)
        labels = uf.labels()
        return all(labels[x] == labels[c[0]] for c in self.rel.classes for x in c) and \
            len(set(labels.tolist())) == len(self.rel.classes)

    def psi(self) -> list:
        """``theta_1..theta_n, theta_1^-1..theta_n^-1``: one step along each edge end."""
        return list(self.gens) + [g.inverse() for g in self.gens]

    @classmethod
    def from_perms(cls, perms: Sequence[Sequence[int]], weights=None, exact: bool = True) -> "Graphing":
        """Graphing of explicit permutations on the relation they generate."""
        n = len(perms[0])
        if weights is None:
            from fractions import Fraction
            weights = [Fraction(1, n) if exact else 1.0 / n] * n
        rel = EqRel.generated_by(weights, perms, exact)
        return cls(rel, tuple(Automorphism(tuple(p)) for p in perms))


@dataclass(frozen=True)
class ClassGraph:
    vertices: tuple
    edges: tuple  # (u, v, generator index), one per (vertex, generator)

    def adjacency(self) -> np.ndarray:
        idx = {v: i for i, v in enumerate(self.vertices)}
        A = np.zeros((len(self.vertices),) * 2)
        for u, v, _ in self.edges:
            A[idx[u], idx[v]] += 1
            A[idx[v], idx[u]] += 1
        return A

    def degrees(self) -> dict:
        deg = {v: 0 for v in self.vertices}
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def as_window(self, degree: int) -> Window:
        idx = {v: i for i, v in enumerate(self.vertices)}
        edges = [(idx[u], idx[v]) for u, v, _ in self.edges]
        labels = [i for _, _, i in self.edges]
        return Window.from_edges(len(self.vertices), edges, boundary=(), degree=degree,
                                 labels=labels, name="class-graph")


def class_graphs(g: Graphing) -> list:
    """One multigraph per class; point ``y`` contributes ``(y, theta_i(y))`` for each ``i``."""
    out = []
    for c in g.rel.classes:
        edges = tuple((y, g.gens[i].perm[y], i) for y in c for i in range(g.n))
        out.append(ClassGraph(tuple(c), edges))
    return out


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    method: str  # "exact-eigensolve" | "power-iteration"
    iterations: int = 0
    residual: float = 0.0


def _start_vector(n: int) -> np.ndarray:
    i = np.arange(n, dtype=np.float64)
    x = 1.0 + 1e-3 * np.sin(i + 1.0)
    return x / np.linalg.norm(x)


def power_norm(A, tol: float = POWER_TOL, maxiter: int = POWER_MAXITER) -> SpectralEstimate:
    """Largest singular value of a symmetric operator by power iteration on ``A^2``.

    Iterating with ``A^2`` makes bipartite spectra (``+-lambda``) harmless.
    The residual is ``||A^2 x - lambda^2 x||`` for the unit iterate ``x``,
    scaled by ``lambda^2``; iteration stops once it falls below ``tol``.
    """
    n = A.shape[0]
    x = _start_vector(n)
    lam2 = 0.0
    res = math.inf
    it = 0
    for it in range(1, maxiter + 1):
        y = A @ (A @ x)
        lam2 = float(x @ y)
        if lam2 <= 0:
            return SpectralEstimate(0.0, "power-iteration", it, 0.0)
        res = float(np.linalg.norm(y - lam2 * x)) / lam2
        nrm = np.linalg.norm(y)
        x = y / nrm
        if res < tol:
            break
    return SpectralEstimate(math.sqrt(lam2), "power-iteration", it, res)


def _block_norm(A: np.ndarray) -> SpectralEstimate:
    if A.shape[0] <= EXACT_EIGEN_MAX:
        ev = np.linalg.eigvalsh(A)
        return SpectralEstimate(float(np.max(np.abs(ev))), "exact-eigensolve")
    return power_norm(sp.csr_matrix(A))


def operator_norm(g: Graphing) -> SpectralEstimate:
    """``||T||`` as the maximum over classes of the class adjacency norm."""
    best = SpectralEstimate(0.0, "exact-eigensolve")
    for cg in class_graphs(g):
        est = _block_norm(cg.adjacency())
        if est.value > best.value:
            best = est
    return best


def window_norm(w: Window, tol: float = POWER_TOL, maxiter: int = POWER_MAXITER) -> SpectralEstimate:
    """Top singular value of the window adjacency by power iteration.

    This increases towards the norm of the infinite graph as the window grows.
    """
    if w.n_vertices == 0 or not w.is_connected():
        raise ValueError("window must be non-empty and connected")
    return power_norm(w.adjacency(), tol, maxiter)


def _class_perm_matrix(word: Automorphism, members: Sequence[int]) -> np.ndarray:
    idx = {x: i for i, x in enumerate(members)}
    P = np.zeros((len(members),) * 2)
    for x in members:
        P[idx[word.perm[x]], idx[x]] = 1.0
    return P


def average_operator_blocks(g: Graphing, words: Sequence[Automorphism]) -> list:
    """Per-class matrices of ``(1/m) sum_j u(psi_j)``."""
    blocks = []
    m = len(words)
    for c in g.rel.classes:
        M = sum(_class_perm_matrix(w, c) for w in words) / m
        blocks.append(M)
    return blocks


def average_norm(g: Graphing, words: Sequence, subspace: str = "mean-zero") -> float:
    """Norm of ``(1/m) sum_j u(psi_j)`` over all classes.

    ``subspace="full"`` is the norm on all of ``L^2``, which is always 1 on a
    finite model because class-constant functions are invariant.
    ``"mean-zero"`` restricts to functions with zero mean on every class, the
    finite stand-in for the spectral gap (a singleton class contributes 0).
    """
    words = [w if isinstance(w, Automorphism) else Automorphism(tuple(w)) for w in words]
    if not words:
        raise ValueError("need at least one word")
    if subspace not in ("full", "mean-zero"):
        raise ValueError(f"unknown subspace {subspace!r}")
    best = 0.0
    for c, M in zip(g.rel.classes, average_operator_blocks(g, words)):
        k = len(c)
        if subspace == "mean-zero":
            if k == 1:
                continue
            J = np.full((k, k), 1.0 / k)
            Q = np.eye(k) - J
            M = Q @ M @ Q
        best = max(best, float(np.linalg.norm(M, 2)))
    return best


def word_products(gens: Sequence[Automorphism], length: int) -> list:
    """All ``len(gens)**length`` products ``g_{i1} ... g_{ik}`` in lexicographic order."""
    out = []
    for combo in itertools.product(range(len(gens)), repeat=length):
        w = gens[combo[0]]
        for i in combo[1:]:
            w = w.compose(gens[i])
        out.append(w)
    return out


# ---------------------------------------------------------------- isoperimetry

@dataclass(frozen=True)
class IsoResult:
    lower: float | None        # certified lower bound (exact mode only)
    upper: float               # best ratio found
    certificate: tuple         # the subset achieving ``upper``
    exact: bool
    label: str = ""


def _graph_arrays(graph):
    if isinstance(graph, ClassGraph):
        idx = {v: i for i, v in enumerate(graph.vertices)}
        edges = np.array([(idx[u], idx[v]) for u, v, _ in graph.edges], dtype=np.int64).reshape(-1, 2)
        return len(graph.vertices), edges, np.zeros(len(graph.vertices), dtype=bool), tuple(graph.vertices), False
    return graph.n_vertices, graph.edges, graph.boundary, tuple(range(graph.n_vertices)), True


def edge_boundary(edges: np.ndarray, subset) -> int:
    """Number of edges with exactly one endpoint in ``subset``."""
    mask = np.zeros(int(edges.max()) + 1 if edges.size else 0, dtype=bool)
    mask[list(subset)] = True
    return int(np.count_nonzero(mask[edges[:, 0]] != mask[edges[:, 1]]))


def isoperimetric(graph, mode: str = "exact", samples: int = 2000, seed: int = 0) -> IsoResult:
    """Edge-isoperimetric ratio ``min |dF|/|F|``.

    For a finite class graph the minimum is over ``0 < |F| <= |V|/2`` (taking
    ``F = V`` would make it 0). For a window, ``F`` ranges over non-empty sets
    of interior vertices, whose edge boundary is not truncated. ``exact``
    enumerates all subsets and is limited to 24 candidate vertices;
    ``annealed-sample`` returns an upper bound with its certificate.
    """
    n, edges, boundary, names, is_window = _graph_arrays(graph)
    cand = np.flatnonzero(~boundary) if is_window else np.arange(n)
    cap = None if is_window else n // 2
    if mode == "exact":
        k = cand.size
        if k > EXACT_ISO_MAX:
            raise ValueError(f"exact mode limited to {EXACT_ISO_MAX} vertices, got {k}")
        if k == 0:
            raise ValueError("no candidate vertices")
        ratio, best = _exhaustive_iso(n, edges, cand, cap)
        cert = tuple(names[v] for v in best)
        return IsoResult(ratio, ratio, cert, True, "exact")
    if mode == "annealed-sample":
        ratio, best = _sampled_iso(n, edges, cand, cap, samples, seed)
        cert = tuple(names[v] for v in best)
        return IsoResult(None, ratio, cert, False, "sampled upper bound")
    raise ValueError(f"unknown mode {mode!r}")


def _exhaustive_iso(n, edges, cand, cap):
    k = cand.size
    pos = np.full(n, -1, dtype=np.int64)
    pos[cand] = np.arange(k)
    pu, pv = pos[edges[:, 0]], pos[edges[:, 1]]
    best_ratio, best_mask = math.inf, 0
    chunk = 1 << min(k, 20)
    total = 1 << k
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        size = np.zeros(masks.size, dtype=np.int64)
        for j in range(k):
            size += (masks >> j) & 1
        bnd = np.zeros(masks.size, dtype=np.int64)
        for a, b in zip(pu.tolist(), pv.tolist()):
            ia = (masks >> a) & 1 if a >= 0 else 0
            ib = (masks >> b) & 1 if b >= 0 else 0
            bnd += ia ^ ib
        ok = size > 0 if cap is None else (size > 0) & (size <= cap)
        if not np.any(ok):
            continue
        ratio = np.where(ok, bnd / np.maximum(size, 1), np.inf)
        i = int(np.argmin(ratio))
        if ratio[i] < best_ratio:
            best_ratio, best_mask = float(ratio[i]), int(masks[i])
    best = [int(cand[j]) for j in range(k) if (best_mask >> j) & 1]
    return best_ratio, best


def _sampled_iso(n, edges, cand, cap, samples, seed):
    rng = np.random.default_rng(seed)
    nbrs = [[] for _ in range(n)]
    for u, v in edges.tolist():
        if u != v:
            nbrs[u].append(v)
            nbrs[v].append(u)
    allowed = np.zeros(n, dtype=bool)
    allowed[cand] = True
    limit = cap if cap is not None else cand.size
    best_ratio, best = math.inf, []

    def ratio_of(inF, size):
        return np.count_nonzero(inF[edges[:, 0]] != inF[edges[:, 1]]) / size

    for _ in range(samples):
        start = int(rng.choice(cand))
        target = int(rng.integers(1, max(2, limit) + 1))
        F = [start]
        inF = np.zeros(n, dtype=bool)
        inF[start] = True
        frontier = [v for v in nbrs[start] if allowed[v]]
        while len(F) < min(target, limit) and frontier:
            v = frontier.pop(int(rng.integers(len(frontier))))
            if inF[v]:
                continue
            inF[v] = True
            F.append(v)
            frontier.extend(u for u in nbrs[v] if allowed[u] and not inF[u])
        r = ratio_of(inF, len(F))
        # greedy descent: add boundary-adjacent vertices while it helps
        improved = True
        while improved and len(F) < limit:
            improved = False
            cands = {u for v in F for u in nbrs[v] if allowed[u] and not inF[u]}
            for u in sorted(cands):
                inF[u] = True
                r2 = ratio_of(inF, len(F) + 1)
                if r2 < r:
                    F.append(u)
                    r = r2
                    improved = True
                    break
                inF[u] = False
        if r < best_ratio:
            best_ratio, best = r, sorted(F)
    return float(best_ratio), best


@dataclass
class IsoBoundReport:
    passed: bool
    bound: float
    min_ratio: float
    n_checked: int
    violation: tuple | None = None
    ratios: list = field(default_factory=list, repr=False)


def iso_bound_check(w: Window, norm_oracle: float, samples: int, seed: int = 0) -> IsoBoundReport:
    """Check ``|dF| >= (2n - ||T||) |F|`` on random interior subsets and interior balls.

    A violation falsifies the implementation (the inequality is a theorem).
    """
    bound = w.degree - norm_oracle
    rng = np.random.default_rng(seed)
    interior = np.flatnonzero(w.interior)
    if interior.size == 0:
        raise ValueError("window has no interior vertices")
    nbrs = w.neighbours()
    subsets = []
    if w.depth is not None:
        for r in range(int(w.depth[interior].max()) + 1):
            ball = np.flatnonzero((w.depth <= r) & w.interior)
            if ball.size:
                subsets.append(ball)
    for _ in range(samples):
        start = int(rng.choice(interior))
        target = int(rng.integers(1, min(interior.size, 200) + 1))
        inF = {start}
        frontier = [v for v, _ in nbrs[start] if w.interior[v]]
        while len(inF) < target and frontier:
            v = frontier.pop(int(rng.integers(len(frontier))))
            if v in inF:
                continue
            inF.add(v)
            frontier.extend(u for u, _ in nbrs[v] if w.interior[u] and u not in inF)
        subsets.append(np.fromiter(inF, dtype=np.int64))
    mask = np.zeros(w.n_vertices, dtype=bool)
    ratios = []
    for F in subsets:
        mask[:] = False
        mask[F] = True
        dF = int(np.count_nonzero(mask[w.edges[:, 0]] != mask[w.edges[:, 1]]))
        ratio = dF / F.size
        ratios.append(ratio)
        if dF < bound * F.size - 1e-9:
            return IsoBoundReport(False, bound, min(ratios), len(ratios), tuple(sorted(F.tolist())), ratios)
    return IsoBoundReport(True, bound, min(ratios), len(ratios), None, ratios)


def tree_norm(degree: int) -> float:
    """Norm of the adjacency operator of the infinite ``degree``-regular tree."""
    return 2.0 * math.sqrt(degree - 1)


def tree_ball_norm_oracle(degree: int, radius: int) -> float:
    """Top eigenvalue of a tree ball via its radial (level) reduction.

    The Perron vector of a ball is radial, so the top eigenvalue equals that
    of the tridiagonal matrix on levels ``0..radius`` with off-diagonal
    entries ``sqrt(d)`` then ``sqrt(d-1)``.
    """
    if radius == 0:
        return 0.0
    off = np.array([math.sqrt(degree)] + [math.sqrt(degree - 1)] * (radius - 1))
    M = np.diag(off, 1) + np.diag(off, -1)
    return float(np.linalg.eigvalsh(M)[-1])
